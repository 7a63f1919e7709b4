#pragma once

#include <optional>
#include <vector>

#include "covctl/density.hpp"
#include "covctl/geometry.hpp"
#include "covctl/moments.hpp"

namespace covctl {

// Agent positions p_1..p_n, the optimization variable.
using Configuration = std::vector<Point2>;
// One region per agent; W_i is assigned to agent i.
using Partition = std::vector<ConvexPolygon>;

// Environment, density and sensing performance of one coverage problem.
struct CoverageProblem {
    ConvexPolygon region;
    DensityField density;
    SensingPerformance performance = SensingPerformance::quadratic();
};

// H_V with its quantization (sum of J_{V_i,C_i}) and displacement
// (sum of M_i |p_i - C_i|^2) terms. The split exists for quadratic f only.
struct CostBreakdown {
    double total = 0.0;
    std::optional<double> quantization;
    std::optional<double> displacement;
};

// Voronoi diagram of a configuration plus the moments of every cell.
// A cell with (numerically) zero mass has no moments.
struct CellSnapshot {
    VoronoiDiagram diagram;
    std::vector<std::optional<CellMoments>> moments;

    std::size_t zero_mass_cells() const;
};

CellSnapshot snapshot(const CoverageProblem& problem, const Configuration& positions);

// max_i |p_i - C_{V_i}| over cells with mass.
double centroid_residual(const CellSnapshot& snap, const Configuration& positions);

// H(P, W) = sum_i int_{W_i} f(|q - p_i|) phi(q) dq by direct quadrature.
// Throws PartitionMismatch when |W| != |P|.
double coverage_cost(const Configuration& positions, const Partition& partition,
                     const SensingPerformance& f, const DensityField& phi);

CostBreakdown coverage_cost_voronoi(const CoverageProblem& problem, const Configuration& positions);
CostBreakdown coverage_cost_voronoi(const CoverageProblem& problem, const Configuration& positions,
                                    const CellSnapshot& snap);

// dH_V/dp_i. Quadratic f uses 2 M_i (p_i - C_i); other f integrate
// f'(|q - p_i|) (p_i - q)/|q - p_i| over V_i.
std::vector<Vec2> gradient(const CoverageProblem& problem, const Configuration& positions);

// max_i max_{q in V_i} |q - p_i|, attained at cell vertices.
double p_center_cost(const ConvexPolygon& region, const Configuration& positions);

}  // namespace covctl
