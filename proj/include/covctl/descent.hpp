#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "covctl/objective.hpp"

namespace covctl {

// Sampled trajectory of a descent flow. costs[k] and residuals[k] belong to
// states[k] at times[k].
struct FlowTrace {
    std::vector<double> times;
    std::vector<Configuration> states;
    std::vector<CostBreakdown> costs;
    std::vector<double> residuals;
    // (time, agent) whenever an agent held position because its cell had
    // no mass.
    std::vector<std::pair<double, std::size_t>> zero_mass_events;
    bool converged = false;
};

struct FlowOptions {
    double k_prop = 1.0;
    double h = 0.05;
    std::size_t max_steps = 1000;
    double tol = 1e-6;  // stop once max_i |p_i - C_i| < tol
};

// Called once per recorded state.
using FlowObserver = std::function<void(double t, const Configuration& state,
                                        const CellSnapshot& snap, const CostBreakdown& cost,
                                        double residual)>;

// Integrates p_i' = -k_prop (p_i - C_{V_i}) with fixed-step RK4, rebuilding
// the Voronoi diagram at every stage.
FlowTrace continuous_lloyd_flow(const CoverageProblem& problem, const Configuration& start,
                                const FlowOptions& options, const FlowObserver& observer = {});

// Moves every agent to the centroid of its cell. Agents whose cell has no
// mass stay put.
Configuration lloyd_map(const CoverageProblem& problem, const Configuration& positions);

struct DescentReport {
    Configuration final;
    std::size_t iterations = 0;
    bool converged = false;
    double residual = 0.0;
    std::vector<double> costs;  // H_V before each iteration and at the end
};

using ConfigurationMap = std::function<Configuration(const Configuration&)>;

// Checks the Lloyd-variant properties for one application of a map:
// (a) no agent increases its distance to the centroid of its cell at
// `before`, (b) unless `before` is centroidal, some agent strictly
// decreases it. Agents without a centroid are skipped. Throws
// PropertyViolation.
void check_lloyd_properties(const Configuration& before, const Configuration& after,
                            const std::vector<std::optional<Point2>>& centroids,
                            std::size_t iteration, bool before_is_centroidal);

// Iterates `map` until the centroid residual drops below tol, checking the
// Lloyd-variant properties at every step.
DescentReport descent_iterate(const CoverageProblem& problem, const ConfigurationMap& map,
                              const Configuration& start, double tol, std::size_t max_iterations,
                              const FlowObserver& observer = {});

double centroid_residual(const CoverageProblem& problem, const Configuration& positions);
bool is_centroidal(const CoverageProblem& problem, const Configuration& positions, double tol);

// Moves every agent to the center of the smallest disk enclosing its cell.
Configuration p_center_step(const ConvexPolygon& region, const Configuration& positions);

}  // namespace covctl
