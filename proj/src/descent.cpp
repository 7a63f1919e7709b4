#include "covctl/descent.hpp"

#include "covctl/errors.hpp"

namespace covctl {

namespace {

// Velocity field -k (p - C) for the current snapshot.
std::vector<Vec2> lloyd_velocity(const CellSnapshot& snap, const Configuration& p, double k) {
    std::vector<Vec2> v(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        if (snap.moments[i]) v[i] = -k * (p[i] - snap.moments[i]->centroid);
    return v;
}

Configuration advance(const ConvexPolygon& region, const Configuration& p, const std::vector<Vec2>& v,
                      double dt) {
    Configuration out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = project_onto(region, p[i] + dt * v[i]);
    return out;
}

}  // namespace

FlowTrace continuous_lloyd_flow(const CoverageProblem& problem, const Configuration& start,
                                const FlowOptions& options, const FlowObserver& observer) {
    FlowTrace trace;
    Configuration p = start;
    const double h = options.h;
    const double k = options.k_prop;
    double t = 0.0;
    for (std::size_t step = 0;; ++step) {
        const CellSnapshot snap = snapshot(problem, p);
        const CostBreakdown cost = coverage_cost_voronoi(problem, p, snap);
        const double residual = centroid_residual(snap, p);
        trace.times.push_back(t);
        trace.states.push_back(p);
        trace.costs.push_back(cost);
        trace.residuals.push_back(residual);
        if (observer) observer(t, p, snap, cost, residual);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (!snap.moments[i]) trace.zero_mass_events.emplace_back(t, i);
        if (residual < options.tol) {
            trace.converged = true;
            break;
        }
        if (step >= options.max_steps) break;

        const auto k1 = lloyd_velocity(snap, p, k);
        const Configuration p2 = advance(problem.region, p, k1, 0.5 * h);
        const auto k2 = lloyd_velocity(snapshot(problem, p2), p2, k);
        const Configuration p3 = advance(problem.region, p, k2, 0.5 * h);
        const auto k3 = lloyd_velocity(snapshot(problem, p3), p3, k);
        const Configuration p4 = advance(problem.region, p, k3, h);
        const auto k4 = lloyd_velocity(snapshot(problem, p4), p4, k);
        std::vector<Vec2> v(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) v[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
        p = advance(problem.region, p, v, h);
        t = h * static_cast<double>(step + 1);
    }
    return trace;
}

Configuration lloyd_map(const CoverageProblem& problem, const Configuration& positions) {
    const CellSnapshot snap = snapshot(problem, positions);
    Configuration out = positions;
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (snap.moments[i]) out[i] = snap.moments[i]->centroid;
    return out;
}

void check_lloyd_properties(const Configuration& before, const Configuration& after,
                            const std::vector<std::optional<Point2>>& centroids,
                            std::size_t iteration, bool before_is_centroidal) {
    bool some_strict = false;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (!centroids[i]) continue;
        const double d_before = distance(before[i], *centroids[i]);
        const double d_after = distance(after[i], *centroids[i]);
        if (d_after > d_before + 1e-12 * (1.0 + d_before)) throw PropertyViolation('a', i, iteration);
        if (d_after < d_before) some_strict = true;
    }
    if (!before_is_centroidal && !some_strict) {
        // Report the agent farthest from its centroid.
        std::size_t worst = 0;
        double worst_d = -1.0;
        for (std::size_t i = 0; i < before.size(); ++i)
            if (centroids[i] && distance(before[i], *centroids[i]) > worst_d) {
                worst_d = distance(before[i], *centroids[i]);
                worst = i;
            }
        throw PropertyViolation('b', worst, iteration);
    }
}

DescentReport descent_iterate(const CoverageProblem& problem, const ConfigurationMap& map,
                              const Configuration& start, double tol, std::size_t max_iterations,
                              const FlowObserver& observer) {
    DescentReport report;
    Configuration p = start;
    for (std::size_t it = 0;; ++it) {
        const CellSnapshot snap = snapshot(problem, p);
        const CostBreakdown cost = coverage_cost_voronoi(problem, p, snap);
        const double residual = centroid_residual(snap, p);
        report.costs.push_back(cost.total);
        if (observer) observer(static_cast<double>(it), p, snap, cost, residual);
        report.residual = residual;
        report.iterations = it;
        if (residual < tol) {
            report.converged = true;
            break;
        }
        if (it >= max_iterations) break;
        std::vector<std::optional<Point2>> centroids(p.size());
        for (std::size_t i = 0; i < p.size(); ++i)
            if (snap.moments[i]) centroids[i] = snap.moments[i]->centroid;
        Configuration next = map(p);
        check_lloyd_properties(p, next, centroids, it + 1, false);
        p = std::move(next);
    }
    report.final = p;
    return report;
}

double centroid_residual(const CoverageProblem& problem, const Configuration& positions) {
    return centroid_residual(snapshot(problem, positions), positions);
}

bool is_centroidal(const CoverageProblem& problem, const Configuration& positions, double tol) {
    return centroid_residual(problem, positions) < tol;
}

Configuration p_center_step(const ConvexPolygon& region, const Configuration& positions) {
    const VoronoiDiagram diagram = voronoi_diagram(region, positions);
    Configuration out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) out[i] = min_enclosing_ball_center(diagram.cells[i]);
    return out;
}

}  // namespace covctl
