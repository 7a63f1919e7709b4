#include <cmath>
#include <numbers>
#include <random>

#include "covctl/descent.hpp"
#include "covctl/dynamics.hpp"
#include "covctl/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace covctl;

namespace {

const ConvexPolygon kUnitSquare = ConvexPolygon::rectangle(0, 0, 1, 1);
const ConvexPolygon kBigSquare = ConvexPolygon::rectangle(-100, -100, 100, 100);
const ConvexPolygon kSquare2 = ConvexPolygon::rectangle(-1, -1, 1, 1);
constexpr double kPi = std::numbers::pi;

// Closest point of the polygon boundary, by scanning every edge.
Point2 nearest_on_boundary(const ConvexPolygon& poly, Point2 q) {
    Point2 best{};
    double best_d = 1e300;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point2 a = poly[k], b = poly.next(k);
        const double t = std::clamp(dot(q - a, b - a) / norm2(b - a), 0.0, 1.0);
        const Point2 c = a + t * (b - a);
        if (distance(q, c) < best_d) {
            best_d = distance(q, c);
            best = c;
        }
    }
    return best;
}

CoverageProblem gaussian_problem() {
    return {kSquare2, density::Gaussian{{0.0, 0.0}, 5}, SensingPerformance::quadratic()};
}

}  // namespace

TEST_CASE("saturate") {
    CHECK(saturate({0.5, 0}) == Vec2{0.5, 0});
    CHECK(distance(saturate({3, 4}), {0.6, 0.8}) < 1e-15);
    CHECK(saturate({0, 0}) == Vec2{0, 0});
}

TEST_CASE("step_first_order") {
    CHECK(step_first_order({{0.3, 0.4}}, {0, 0}, 0.1, kUnitSquare).p == Point2{0.3, 0.4});
    CHECK(distance(step_first_order({{0, 0}}, {3, 4}, 1.0, kBigSquare).p, {0.6, 0.8}) < 1e-15);

    std::mt19937_64 rng(5);
    const auto poly = oracle::random_convex_polygon(rng);
    for (int t = 0; t < 50; ++t) {
        const Point2 start = oracle::random_point_in(poly, rng);
        std::uniform_real_distribution<double> angle(0, 2 * kPi);
        const double a = angle(rng);
        const Vec2 u{std::cos(a), std::sin(a)};
        const Point2 free = start + 3.0 * u;
        const Point2 got = step_first_order({start}, u, 3.0, poly).p;
        if (oracle::inside(poly, free))
            CHECK(distance(got, free) < 1e-12);
        else
            CHECK(distance(got, nearest_on_boundary(poly, free)) < 1e-12);
    }
}

TEST_CASE("pd_control") {
    CHECK(pd_control({{0.2, 0.3}, {0, 0}}, 1.0, {0.2, 0.3}, 6, 1) == Vec2{0, 0});
    CHECK(pd_control({{1, 0}, {0, 0}}, 1.0, {0, 0}, 6, 1) == Vec2{-6, 0});
    CHECK(pd_control({{0, 0}, {1, 0}}, 1.0, {0, 0}, 6, 1) == Vec2{-1, 0});
}

TEST_CASE("step_second_order") {
    const SecondOrder rest{{0.5, 0.5}, {0, 0}};
    const auto same = step_second_order(rest, {0, 0}, 0.1, kUnitSquare);
    CHECK(same.p == rest.p);
    CHECK(same.v == rest.v);
    const auto coast = step_second_order({{0.2, 0.5}, {1, 0}}, {0, 0}, 0.1, kUnitSquare);
    CHECK(distance(coast.p, {0.3, 0.5}) < 1e-15);
    // Constant acceleration: p + v h + u h^2 / 2.
    const auto accel = step_second_order({{0.2, 0.5}, {0.3, -0.1}}, {2, 1}, 0.2, kUnitSquare);
    CHECK(distance(accel.p, {0.2 + 0.06 + 0.04, 0.5 - 0.02 + 0.02}) < 1e-15);
    CHECK(distance(accel.v, {0.7, 0.1}) < 1e-15);
    // Hitting a wall keeps the tangential velocity only.
    const auto wall = step_second_order({{0.95, 0.5}, {1, 0.2}}, {0, 0}, 0.1, kUnitSquare);
    CHECK(distance(wall.p, {1.0, 0.52}) < 1e-15);
    CHECK(distance(wall.v, {0.0, 0.2}) < 1e-15);
}

TEST_CASE("unicycle_control") {
    const double k = 2.0;
    const auto aligned = unicycle_control({kPi, 1, 0, 1}, {0, 0}, k);
    CHECK(aligned.omega == doctest::Approx(0.0));
    CHECK(aligned.v == doctest::Approx(k));
    CHECK(aligned.state.dir == 1);

    const auto flipped = unicycle_control({0, 1, 0, 1}, {0, 0}, k);
    CHECK(flipped.state.theta == doctest::Approx(kPi));
    CHECK(flipped.state.dir == -1);
    CHECK(flipped.omega == doctest::Approx(0.0));
    CHECK(flipped.v == doctest::Approx(k));

    const auto at_target = unicycle_control({0.3, 0.2, 0.1, 1}, {0.2, 0.1}, k);
    CHECK(at_target.omega == 0.0);
    CHECK(at_target.v == 0.0);

    // Perpendicular heading: no forward speed, full turn rate toward the target.
    const auto side = unicycle_control({kPi / 2, 1, 0, 1}, {0, 0}, k);
    CHECK(side.v == doctest::Approx(0.0));
    CHECK(std::abs(side.omega) == doctest::Approx(k * kPi));
    const auto turned = step_unicycle(side.state, side.omega, side.v, 0.01);
    CHECK(dot(Vec2{std::cos(turned.theta), std::sin(turned.theta)}, Point2{0, 0} - turned.position()) > 0);

    // Slightly off the line of sight: turns back toward it.
    const auto off = unicycle_control({kPi - 0.1, 1, 0, 1}, {0, 0}, k);
    CHECK(off.omega == doctest::Approx(2 * k * 0.1));
}

TEST_CASE("step_unicycle") {
    const auto straight = step_unicycle({0, 0.2, 0.3, 1}, 0.0, 1.0, 0.1);
    CHECK(straight.x == doctest::Approx(0.3));
    CHECK(straight.y == doctest::Approx(0.3));
    const auto spin = step_unicycle({0, 0.2, 0.3, 1}, 1.0, 0.0, 0.5);
    CHECK(spin.x == 0.2);
    CHECK(spin.y == 0.3);
    CHECK(spin.theta == doctest::Approx(0.5));

    // omega = v = 1 traces the unit circle; after 2 pi it is back.
    Unicycle s{0.0, 0.0, 0.0, 1};
    const int steps = 1000;
    const double h = 2 * kPi / steps;
    double worst = 0.0;
    for (int k = 1; k <= steps; ++k) {
        s = step_unicycle(s, 1.0, 1.0, h);
        const double t = k * h;
        worst = std::max(worst, distance(s.position(), {std::sin(t), 1 - std::cos(t)}));
    }
    CHECK(worst < 1e-6);
    CHECK(distance(s.position(), {0, 0}) < 1e-6);
    CHECK(s.theta > -kPi);
    CHECK(s.theta <= kPi);
}

TEST_CASE("unicycle flip leaves the position trajectory unchanged") {
    const Point2 target{0.1, -0.2};
    Unicycle a{0.7, 0.8, 0.6, 1};
    Unicycle b{0.7 - kPi, 0.8, 0.6, -1};
    for (int k = 0; k < 300; ++k) {
        const auto ca = unicycle_control(a, target, 3.0);
        const auto cb = unicycle_control(b, target, 3.0);
        a = step_unicycle(ca.state, ca.omega, ca.v, 0.01);
        b = step_unicycle(cb.state, cb.omega, cb.v, 0.01);
        REQUIRE(distance(a.position(), b.position()) < 1e-12);
    }
}

TEST_CASE("unicycle distance to a fixed target is non-increasing") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int t = 0; t < 16; ++t) {
        Unicycle s{angle(rng), 0, 0, 1};
        const Point2 p = oracle::random_point_in(kSquare2, rng);
        s.x = p.x;
        s.y = p.y;
        const Point2 target = oracle::random_point_in(kSquare2, rng);
        double d = distance(s.position(), target);
        for (int k = 0; k < 500; ++k) {
            const auto c = unicycle_control(s, target, 3.0);
            s = step_unicycle(c.state, c.omega, c.v, 0.01, &kSquare2);
            const double next = distance(s.position(), target);
            REQUIRE(next <= d + 1e-14);
            d = next;
        }
        CHECK(d < 0.1);
    }
}

TEST_CASE("PD closed loop dissipates energy") {
    std::mt19937_64 rng(3);
    std::vector<SecondOrder> start;
    for (const Point2& p : oracle::random_configuration(kSquare2, 8, rng, 0.05)) start.push_back({p, {0, 0}});
    start[0].v = {0.5, -0.3};
    PdOptions opt;
    opt.h = 0.005;
    opt.max_steps = 1500;
    const auto trace = pd_closed_loop(gaussian_problem(), start, opt);
    REQUIRE(trace.energies.size() == 1501);
    for (std::size_t k = 1; k < trace.energies.size(); ++k)
        CHECK(trace.energies[k].E <= trace.energies[k - 1].E + 1e-6);
    CHECK(trace.energies.back().E < trace.energies.front().E);
    for (std::size_t k = 0; k < trace.energies.size(); ++k) {
        const auto& e = trace.energies[k];
        CHECK(e.E == doctest::Approx(3.0 * e.coverage + e.kinetic).epsilon(1e-14));
        CHECK(std::abs(trace.tracked_kinetic[k] - e.kinetic) < 1e-9);
    }
}

TEST_CASE("energy record") {
    const auto e = energy(6.0, 0.5, {{{0, 0}, {1, 0}}, {{1, 1}, {0, 2}}});
    CHECK(e.kinetic == doctest::Approx(2.5));
    CHECK(e.E == doctest::Approx(4.0));
}

TEST_CASE("local rounds with first-order vehicles satisfy the Lloyd properties") {
    const auto problem = gaussian_problem();
    std::mt19937_64 rng(8);
    std::vector<VehicleState> states;
    for (const Point2& p : oracle::random_configuration(kSquare2, 10, rng)) states.push_back(FirstOrder{p});
    const auto controller = first_order_controller(kSquare2, 0.01);
    double residual = 1e9;
    for (std::size_t round = 1; round <= 100; ++round) {
        const auto r = local_controller_round(problem, states, 0.2, controller);
        Configuration before, after;
        for (std::size_t i = 0; i < states.size(); ++i) {
            before.push_back(position(states[i]));
            after.push_back(position(r.states[i]));
            if (r.targets[i] && r.before[i] > 0) CHECK(r.after[i] < r.before[i]);
        }
        CHECK_NOTHROW(check_lloyd_properties(before, after, r.targets, round, false));
        states = r.states;
        Configuration now;
        for (const auto& s : states) now.push_back(position(s));
        residual = centroid_residual(problem, now);
    }
    CHECK(residual < 1e-2);
}

TEST_CASE("local rounds with unicycles") {
    const auto problem = gaussian_problem();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::vector<VehicleState> states;
    for (const Point2& p : oracle::random_configuration(kSquare2, 6, rng)) states.push_back(Unicycle{angle(rng), p.x, p.y, 1});
    const auto controller = unicycle_controller(kSquare2, 3.0, 0.01);
    for (int round = 0; round < 10; ++round) {
        const auto r = local_controller_round(problem, states, 0.5, controller);
        for (std::size_t i = 0; i < states.size(); ++i)
            if (r.targets[i] && r.before[i] > 0) CHECK(r.after[i] < r.before[i]);
        states = r.states;
    }
}

TEST_CASE("overshooting controller violates the contract") {
    const auto problem = gaussian_problem();
    const LocalController overshoot = [](const VehicleState& s, Point2 target, double) -> VehicleState {
        const Point2 p = position(s);
        return FirstOrder{target + 1.5 * (target - p)};
    };
    std::vector<VehicleState> states{FirstOrder{{-0.5, 0.1}}, FirstOrder{{0.4, 0.2}}};
    try {
        local_controller_round(problem, states, 0.5, overshoot);
        FAIL("expected ControllerContractViolation");
    } catch (const ControllerContractViolation& e) {
        CHECK(e.vehicle == 0);
    }
}
