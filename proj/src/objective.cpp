#include "covctl/objective.hpp"

#include <algorithm>

#include "covctl/errors.hpp"
#include "covctl/quadrature.hpp"
#include "covctl/tolerances.hpp"

namespace covctl {

std::size_t CellSnapshot::zero_mass_cells() const {
    return static_cast<std::size_t>(
        std::count_if(moments.begin(), moments.end(), [](const auto& m) { return !m.has_value(); }));
}

CellSnapshot snapshot(const CoverageProblem& problem, const Configuration& positions) {
    CellSnapshot snap;
    snap.diagram = voronoi_diagram(problem.region, positions);
    snap.moments.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const ConvexPolygon& cell = snap.diagram.cells[i];
        if (cell.empty()) continue;
        try {
            snap.moments[i] = region_moments(cell, problem.density);
        } catch (const ZeroMass&) {
        }
        if (snap.moments[i] && snap.moments[i]->mass < kTol.zero_mass) snap.moments[i].reset();
    }
    return snap;
}

double centroid_residual(const CellSnapshot& snap, const Configuration& positions) {
    double r = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (snap.moments[i]) r = std::max(r, distance(positions[i], snap.moments[i]->centroid));
    return r;
}

double coverage_cost(const Configuration& positions, const Partition& partition,
                     const SensingPerformance& f, const DensityField& phi) {
    if (partition.size() != positions.size())
        throw PartitionMismatch(partition.size(), positions.size());
    double total = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Point2 p = positions[i];
        auto integrand = [&](Point2 q) -> quadrature::Values<1> {
            return {f(distance(q, p)) * phi(q)};
        };
        total += quadrature::integrate<1>(partition[i], integrand, {}, quadrature::log_range_of(phi))[0];
    }
    return total;
}

CostBreakdown coverage_cost_voronoi(const CoverageProblem& problem, const Configuration& positions) {
    if (!problem.performance.is_quadratic()) {
        const VoronoiDiagram diagram = voronoi_diagram(problem.region, positions);
        return {coverage_cost(positions, diagram.cells, problem.performance, problem.density), {}, {}};
    }
    return coverage_cost_voronoi(problem, positions, snapshot(problem, positions));
}

CostBreakdown coverage_cost_voronoi(const CoverageProblem& problem, const Configuration& positions,
                                    const CellSnapshot& snap) {
    if (!problem.performance.is_quadratic())
        return {coverage_cost(positions, snap.diagram.cells, problem.performance, problem.density),
                {}, {}};
    double quantization = 0.0;
    double displacement = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!snap.moments[i]) continue;
        const CellMoments& m = *snap.moments[i];
        quantization += m.polar_moment_centroid;
        displacement += m.mass * norm2(positions[i] - m.centroid);
    }
    return {quantization + displacement, quantization, displacement};
}

std::vector<Vec2> gradient(const CoverageProblem& problem, const Configuration& positions) {
    std::vector<Vec2> grad(positions.size());
    if (problem.performance.is_quadratic()) {
        const CellSnapshot snap = snapshot(problem, positions);
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (snap.moments[i])
                grad[i] = 2.0 * snap.moments[i]->mass * (positions[i] - snap.moments[i]->centroid);
        return grad;
    }
    const VoronoiDiagram diagram = voronoi_diagram(problem.region, positions);
    const SensingPerformance& f = problem.performance;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Point2 p = positions[i];
        auto integrand = [&](Point2 q) -> quadrature::Values<2> {
            const Vec2 d = p - q;
            const double r = norm(d);
            // The integrand is undefined at q = p_i; that point has measure zero.
            if (r <= kTol.duplicate_generators) return {0.0, 0.0};
            const double s = f.derivative(r) * problem.density(q) / r;
            return {s * d.x, s * d.y};
        };
        const auto v = quadrature::integrate<2>(diagram.cells[i], integrand, {}, quadrature::log_range_of(problem.density));
        grad[i] = {v[0], v[1]};
    }
    return grad;
}

double p_center_cost(const ConvexPolygon& region, const Configuration& positions) {
    const VoronoiDiagram diagram = voronoi_diagram(region, positions);
    double worst = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        worst = std::max(worst, diagram.cells[i].max_distance_from(positions[i]));
    return worst;
}

}  // namespace covctl
