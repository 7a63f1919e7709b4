#include "covctl/moments.hpp"

#include <algorithm>

#include "covctl/errors.hpp"
#include "covctl/tolerances.hpp"

namespace covctl {

CellMoments polygon_moments_uniform(const ConvexPolygon& poly) {
    if (poly.empty()) throw EmptyRegion();
    const std::size_t n = poly.size();
    // Shift to the first vertex for conditioning; the formulas are
    // translation covariant.
    const Point2 o = poly[0];
    double twice_area = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Point2 a = poly[k] - o;
        const Point2 b = poly.next(k) - o;
        const double w = a.x * b.y - b.x * a.y;
        twice_area += w;
        cx += (a.x + b.x) * w;
        cy += (a.y + b.y) * w;
    }
    CellMoments m;
    m.mass = 0.5 * twice_area;
    if (m.mass <= 0.0) throw EmptyRegion();
    const Point2 c{cx / (6.0 * m.mass), cy / (6.0 * m.mass)};
    m.centroid = o + c;

    double j = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Point2 a = poly[k] - m.centroid;
        const Point2 b = poly.next(k) - m.centroid;
        const double w = a.x * b.y - b.x * a.y;
        j += w * (a.x * a.x + a.x * b.x + b.x * b.x + a.y * a.y + a.y * b.y + b.y * b.y);
    }
    m.polar_moment_centroid = j / 12.0;
    return m;
}

CellMoments cell_moments(const ConvexPolygon& poly, const DensityField& phi,
                         const quadrature::Options& opt) {
    if (poly.empty()) throw EmptyRegion();
    const Point2 c0 = poly.vertex_mean();
    auto integrand = [&](Point2 q) -> quadrature::Values<4> {
        const double rho = phi(q);
        const Vec2 d = q - c0;
        return {rho, rho * d.x, rho * d.y, rho * norm2(d)};
    };
    const auto v = quadrature::integrate<4>(poly, integrand, opt, quadrature::log_range_of(phi));
    if (!(v[0] >= kTol.zero_mass)) throw ZeroMass(v[0]);
    CellMoments m;
    m.mass = v[0];
    const Vec2 shift{v[1] / v[0], v[2] / v[0]};
    m.centroid = c0 + shift;
    m.polar_moment_centroid = std::max(0.0, v[3] - m.mass * norm2(shift));
    return m;
}

CellMoments region_moments(const ConvexPolygon& poly, const DensityField& phi) {
    return phi.is_uniform() ? polygon_moments_uniform(poly) : cell_moments(poly, phi);
}

}  // namespace covctl
