#include <algorithm>
#include <cmath>
#include <random>

#include "covctl/distributed.hpp"
#include "covctl/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace covctl;

namespace {

const ConvexPolygon kSquare = ConvexPolygon::rectangle(-1, -1, 1, 1);

CoverageProblem uniform_problem() {
    return {kSquare, DensityField::uniform(), SensingPerformance::quadratic()};
}

std::vector<double> costs_along(const CoverageProblem& problem, const NetworkTrace& trace) {
    std::vector<double> out;
    for (const auto& r : trace.records) out.push_back(coverage_cost_voronoi(problem, r.positions).total);
    return out;
}

bool same_records(const NetworkTrace& a, const NetworkTrace& b) {
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        const auto& x = a.records[k];
        const auto& y = b.records[k];
        if (x.time != y.time || x.kind != y.kind || x.agent != y.agent || x.active != y.active) return false;
        for (std::size_t i = 0; i < x.positions.size(); ++i)
            if (x.positions[i].x != y.positions[i].x || x.positions[i].y != y.positions[i].y) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("candidate cell with an unbounded radius is the Voronoi cell") {
    std::mt19937_64 rng(1);
    const auto p = oracle::random_configuration(kSquare, 9, rng);
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<Point2> others;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (j != i) others.push_back(p[j]);
        const auto w = candidate_cell(kSquare, p[i], 10.0, others);
        CHECK(symmetric_difference_area(w, voronoi_cell(kSquare, p, i)) < 1e-12);
    }
}

TEST_CASE("sensing radius recovers the centralized cells and neighbors") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> count(2, 20);
    for (int t = 0; t < 50; ++t) {
        const auto p = oracle::random_configuration(kSquare, count(rng), rng);
        const auto diagram = voronoi_diagram(kSquare, p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto s = adjust_sensing_radius(kSquare, i, p, 0.0);
            CHECK(symmetric_difference_area(s.cell, diagram.cells[i]) < 1e-9 * kSquare.area());
            CHECK(s.neighbors == diagram.neighbors[i]);
            CHECK(s.radius == doctest::Approx(2.0 * diagram.cells[i].max_distance_from(p[i])));
        }
    }
}

TEST_CASE("sensing radius only depends on agents inside the final radius") {
    std::mt19937_64 rng(3);
    const auto p = oracle::random_configuration(kSquare, 25, rng);
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<double> reads;
        const Detector detect = [&](double r) {
            std::vector<std::pair<std::size_t, Point2>> out;
            for (std::size_t j = 0; j < p.size(); ++j)
                if (j != i && distance(p[j], p[i]) <= r) {
                    out.emplace_back(j, p[j]);
                    reads.push_back(distance(p[j], p[i]));
                }
            return out;
        };
        const auto s = adjust_radius(kSquare, i, p[i], 0.0, detect);
        // Agents beyond the largest radius ever used cannot matter: move them.
        const double reach = reads.empty() ? s.radius : std::max(s.radius, *std::max_element(reads.begin(), reads.end()));
        auto moved = p;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (j != i && distance(p[j], p[i]) > 2.0 * reach) moved[j] = moved[j] + Point2{1e-3, -1e-3};
        const auto again = adjust_sensing_radius(kSquare, i, moved, 0.0);
        CHECK(again.radius == s.radius);
        CHECK(symmetric_difference_area(again.cell, s.cell) == 0.0);
    }
}

TEST_CASE("radius adjustment gives up after the iteration guard") {
    // The radius roughly doubles per round; 1e-10 -> 1e15 needs about 83.
    const ConvexPolygon huge = ConvexPolygon::rectangle(-1e15, -1e15, 1e15, 1e15);
    const Detector nobody = [](double) { return std::vector<std::pair<std::size_t, Point2>>{}; };
    CHECK_THROWS_AS(adjust_radius(huge, 7, {0, 0}, 1e-10, nobody), NonTermination);
    CHECK(adjust_radius(huge, 7, {0, 0}, 1e14, nobody).iterations < 64);
}

TEST_CASE("weight map and monitor") {
    const std::vector<std::size_t> nb{1, 3};
    const auto w = weight_map(5, nb, {false, true, true, false, true});
    CHECK(w == std::vector<int>{0, 3, 0, 1, 0});

    Monitor m({0, 1, 3, 1});
    CHECK(m.update({0, 0, 3, 1}).empty());  // drops never warn
    CHECK(m.weights() == std::vector<int>{0, 1, 3, 1});
    const auto jumps = m.update({3, 1, 0, 3});
    REQUIRE(jumps.size() == 2);
    CHECK(jumps[0].neighbor == 0);
    CHECK(jumps[0].from == 0);
    CHECK(jumps[0].to == 3);
    CHECK(jumps[1].neighbor == 3);
    CHECK(m.weights() == std::vector<int>{3, 1, 0, 3});
    CHECK(m.update({3, 1, 1, 3}).empty());  // 0 -> 1 is below the threshold
}

TEST_CASE("monitoring run on a scripted three-agent world") {
    // Agent 1 (a neighbor) moves during [1, 2); agent 2 starts outside
    // agent 0's neighborhood and drives next to it during [3, 5).
    const ConvexPolygon strip = ConvexPolygon::rectangle(0, 0, 3, 1);
    auto along = [](double t, double a, double b) { return std::clamp((t - a) / (b - a), 0.0, 1.0); };
    MotionScript script;
    script.positions = [&](double t) {
        const double s1 = along(t, 1, 2), s2 = along(t, 3, 5);
        return Configuration{{0.5, 0.5}, {1.0, 0.5 + 0.05 * s1}, {2.5 - 1.9 * s2, 0.5 + 0.4 * s2}};
    };
    script.active = [](double t) {
        return std::vector<bool>{false, t >= 1 && t < 2, t >= 3 && t < 5};
    };
    const auto events = monitoring_run(strip, 0, script, 0.0, 6.0, 0.01);
    REQUIRE(events.size() == 2);
    REQUIRE(events[0].jumps.size() == 1);
    CHECK(events[0].jumps[0].neighbor == 1);
    CHECK(events[0].jumps[0].from == 1);
    CHECK(events[0].jumps[0].to == 3);
    CHECK(events[0].time == doctest::Approx(1.0));
    REQUIRE(events[1].jumps.size() == 1);
    CHECK(events[1].jumps[0].neighbor == 2);
    CHECK(events[1].jumps[0].from == 0);
    CHECK(events[1].jumps[0].to == 3);
    CHECK(events[1].time > 3.0);
    CHECK(events[1].time < 5.0);
}

TEST_CASE("communication radius matches sensing on a static network") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const auto p = oracle::random_configuration(kSquare, 12, rng);
        const std::size_t i = static_cast<std::size_t>(t) % p.size();
        const auto sensed = adjust_sensing_radius(kSquare, i, p, 0.0);
        MessageOptions quick;
        const auto a = adjust_communication_radius(kSquare, p, i, 0.0, quick, 5);
        CHECK(symmetric_difference_area(a.sensed.cell, sensed.cell) < 1e-9 * kSquare.area());
        CHECK(a.sensed.radius == sensed.radius);
        CHECK(a.finished_at == 0.0);
        MessageOptions slow;
        slow.latency = 0.01;
        slow.jitter = 0.005;
        const auto b = adjust_communication_radius(kSquare, p, i, 0.0, slow, 5);
        CHECK(symmetric_difference_area(b.sensed.cell, sensed.cell) < 1e-9 * kSquare.area());
        CHECK(b.sensed.neighbors == sensed.neighbors);
        CHECK(b.finished_at > 0.0);
        CHECK(b.messages > 0);
    }
}

TEST_CASE("stale responses trigger re-queries and clear once motion stops") {
    std::mt19937_64 rng(5);
    const auto p = oracle::random_configuration(kSquare, 8, rng, 0.2);
    std::vector<ScriptedMotion> motions(p.size());
    for (std::size_t j = 1; j < p.size(); ++j) motions[j] = {0.2 * (Point2{0, 0} - p[j]), 1.0};
    MessageOptions msg;
    msg.latency = 0.02;
    msg.staleness_budget = 0.01;
    const auto during = adjust_communication_radius(kSquare, p, 0, 0.0, msg, 1, motions, 0.1);
    CHECK(during.stale_views > 0);
    CHECK(during.requeries == msg.max_requeries);

    const auto after = adjust_communication_radius(kSquare, p, 0, 0.0, msg, 1, motions, 2.0);
    CHECK(after.stale_views == 0);
    Configuration frozen = p;
    for (std::size_t j = 1; j < p.size(); ++j) frozen[j] = p[j] + motions[j].until * motions[j].velocity;
    const auto truth = voronoi_cell(kSquare, frozen, 0);
    CHECK(symmetric_difference_area(after.sensed.cell, truth) < 1e-9 * kSquare.area());
}

TEST_CASE("coverage behavior II descends and replays identically") {
    std::mt19937_64 rng(6);
    const auto start = oracle::random_configuration(kSquare, 6, rng, 0.05);
    BehaviorOptions opt;
    opt.schedule.clock_rates = {0.5, 0.8, 1.0, 1.3, 1.7, 2.0};
    opt.horizon = 40.0;
    opt.seed = 11;
    const auto problem = uniform_problem();
    const auto trace = coverage_behavior_II(problem, start, opt);
    CHECK(trace.converged);
    CHECK(trace.residual < opt.tol);
    CHECK(trace.motion_segments > 0);
    const auto costs = costs_along(problem, trace);
    double worst = 0.0;
    for (std::size_t k = 1; k < costs.size(); ++k) worst = std::max(worst, costs[k] - costs[k - 1]);
    CHECK(worst <= 1e-6);
    CHECK(costs.back() < costs.front());

    const auto again = coverage_behavior_II(problem, start, opt);
    CHECK(same_records(trace, again));
}

TEST_CASE("coverage behavior II under a Gaussian density") {
    std::mt19937_64 rng(7);
    const auto start = oracle::random_configuration(kSquare, 5, rng, 0.05);
    const CoverageProblem problem{kSquare, density::Gaussian{{0.3, -0.2}, 2.0}, SensingPerformance::quadratic()};
    BehaviorOptions opt;
    opt.horizon = 5.0;
    const auto trace = coverage_behavior_II(problem, start, opt);
    const auto costs = costs_along(problem, trace);
    for (std::size_t k = 1; k < costs.size(); ++k) CHECK(costs[k] <= costs[k - 1] + 1e-6);
}

TEST_CASE("coverage behavior I converges with messages in flight") {
    std::mt19937_64 rng(8);
    const auto start = oracle::random_configuration(kSquare, 6, rng, 0.05);
    BehaviorOptions opt;
    opt.messages.latency = 0.005;
    opt.messages.jitter = 0.005;
    opt.horizon = 200.0;
    opt.tol = 1e-2;
    opt.seed = 3;
    const auto trace = coverage_behavior_I(uniform_problem(), start, opt);
    CHECK(trace.converged);
    CHECK(trace.residual < 1e-2);
    CHECK(trace.messages > 0);
    const auto again = coverage_behavior_I(uniform_problem(), start, opt);
    CHECK(same_records(trace, again));
}

TEST_CASE("coverage behavior I reports a starved thread") {
    std::mt19937_64 rng(9);
    const auto start = oracle::random_configuration(kSquare, 4, rng, 0.05);
    BehaviorOptions opt;
    opt.horizon = 5.0;
    opt.fairness_bound = 3;
    opt.chooser = [](std::size_t, std::size_t) { return ThreadChoice{true, false}; };
    CHECK_THROWS_AS(coverage_behavior_I(uniform_problem(), start, opt), FairnessViolation);
    opt.chooser = [](std::size_t, std::size_t wake) { return ThreadChoice{true, wake % 3 == 2}; };
    CHECK_NOTHROW(coverage_behavior_I(uniform_problem(), start, opt));
}
