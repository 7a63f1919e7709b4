#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "covctl/density.hpp"
#include "covctl/geometry.hpp"
#include "covctl/tolerances.hpp"

namespace covctl::quadrature {

// Dunavant's 13-point symmetric rule on the triangle, exact through degree 7.
struct TriangleNode {
    double l0, l1, l2;  // barycentric coordinates
    double weight;      // weights sum to 1
};

inline constexpr std::array<TriangleNode, 13> kDegree7Rule{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -0.149570044467682},
    {0.479308067841920, 0.260345966079040, 0.260345966079040, 0.175615257433208},
    {0.260345966079040, 0.479308067841920, 0.260345966079040, 0.175615257433208},
    {0.260345966079040, 0.260345966079040, 0.479308067841920, 0.175615257433208},
    {0.869739794195568, 0.065130102902216, 0.065130102902216, 0.053347235608838},
    {0.065130102902216, 0.869739794195568, 0.065130102902216, 0.053347235608838},
    {0.065130102902216, 0.065130102902216, 0.869739794195568, 0.053347235608838},
    {0.048690315425316, 0.312865496004874, 0.638444188569810, 0.077113760890257},
    {0.048690315425316, 0.638444188569810, 0.312865496004874, 0.077113760890257},
    {0.312865496004874, 0.048690315425316, 0.638444188569810, 0.077113760890257},
    {0.312865496004874, 0.638444188569810, 0.048690315425316, 0.077113760890257},
    {0.638444188569810, 0.048690315425316, 0.312865496004874, 0.077113760890257},
    {0.638444188569810, 0.312865496004874, 0.048690315425316, 0.077113760890257},
}};

struct Options {
    double rel_tol = kTol.quadrature_rel;
    int max_depth = kTol.quadrature_max_depth;
    // Pre-splitting against a log-density bound: split while log phi may
    // vary by more than log_spread over a triangle's bounding box, and drop
    // triangles whose density times area is below negligible.
    double log_spread = 12.0;
    int max_resolve_depth = 10;
    double negligible = 1e-22;
};

// Bounds [lo, hi] on log phi over an axis-aligned box.
using LogRange = std::function<std::pair<double, double>(Point2 low, Point2 high)>;

template <std::size_t K>
using Values = std::array<double, K>;

template <std::size_t K, class F>
Values<K> triangle_rule(Point2 a, Point2 b, Point2 c, F& f) {
    const double area = 0.5 * std::abs(cross(b - a, c - a));
    Values<K> sum{};
    for (const TriangleNode& n : kDegree7Rule) {
        const Point2 q{n.l0 * a.x + n.l1 * b.x + n.l2 * c.x, n.l0 * a.y + n.l1 * b.y + n.l2 * c.y};
        const Values<K> v = f(q);
        for (std::size_t k = 0; k < K; ++k) sum[k] += n.weight * v[k];
    }
    for (double& s : sum) s *= area;
    return sum;
}

namespace detail {

template <std::size_t K, class F>
Values<K> refine(Point2 a, Point2 b, Point2 c, const Values<K>& coarse, double tol, int depth,
                 const Options& opt, F& f) {
    const Point2 ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    const std::array<std::array<Point2, 3>, 4> kids{{{a, ab, ca}, {ab, b, bc}, {ca, bc, c}, {ab, bc, ca}}};
    std::array<Values<K>, 4> parts;
    Values<K> fine{};
    for (std::size_t s = 0; s < 4; ++s) {
        parts[s] = triangle_rule<K>(kids[s][0], kids[s][1], kids[s][2], f);
        for (std::size_t k = 0; k < K; ++k) fine[k] += parts[s][k];
    }
    double err = 0.0;
    for (std::size_t k = 0; k < K; ++k) err += std::abs(fine[k] - coarse[k]);
    if (err <= tol || depth >= opt.max_depth) return fine;
    Values<K> total{};
    for (std::size_t s = 0; s < 4; ++s) {
        const Values<K> sub =
            refine<K>(kids[s][0], kids[s][1], kids[s][2], parts[s], 0.25 * tol, depth + 1, opt, f);
        for (std::size_t k = 0; k < K; ++k) total[k] += sub[k];
    }
    return total;
}

}  // namespace detail

namespace detail {

struct Triangle {
    Point2 a, b, c;
    double area() const { return 0.5 * std::abs(cross(b - a, c - a)); }
};

// Splits the fan triangles until log phi is nearly flat over each piece.
// Pieces whose density is negligible, either absolutely or next to the
// mass some other piece is known to carry, are dropped.
inline std::vector<Triangle> resolve(std::vector<Triangle> pending, const LogRange& range,
                                     const Options& opt) {
    constexpr double kRelativeDrop = 36.0;  // e^-36 ~ 2e-16
    constexpr double kRelativeSplit = 16.0;  // lighter pieces are not worth splitting
    struct Piece {
        Triangle t;
        double log_peak;  // log of max phi * area
    };
    std::vector<Piece> done;
    double floor = std::log(opt.negligible);
    for (int depth = 0; !pending.empty(); ++depth) {
        std::vector<std::pair<double, double>> bounds(pending.size());
        for (std::size_t k = 0; k < pending.size(); ++k) {
            const Triangle& t = pending[k];
            const Point2 low{std::min({t.a.x, t.b.x, t.c.x}), std::min({t.a.y, t.b.y, t.c.y})};
            const Point2 high{std::max({t.a.x, t.b.x, t.c.x}), std::max({t.a.y, t.b.y, t.c.y})};
            bounds[k] = range(low, high);
            floor = std::max(floor, bounds[k].first + std::log(t.area()) - kRelativeDrop);
        }
        std::vector<Triangle> next;
        for (std::size_t k = 0; k < pending.size(); ++k) {
            const Triangle& t = pending[k];
            const auto [lo, hi] = bounds[k];
            const double log_peak = hi + std::log(t.area());
            if (log_peak < floor) continue;
            if (hi - lo <= opt.log_spread || depth >= opt.max_resolve_depth ||
                log_peak < floor + kRelativeDrop - kRelativeSplit) {
                done.push_back({t, log_peak});
                continue;
            }
            const Point2 ab = midpoint(t.a, t.b), bc = midpoint(t.b, t.c), ca = midpoint(t.c, t.a);
            next.insert(next.end(), {Triangle{t.a, ab, ca}, Triangle{ab, t.b, bc},
                                     Triangle{ca, bc, t.c}, Triangle{ab, bc, ca}});
        }
        pending = std::move(next);
    }
    std::vector<Triangle> out;
    for (const Piece& p : done)
        if (p.log_peak >= floor) out.push_back(p.t);
    return out;
}

}  // namespace detail

// Integrates the K-valued integrand f over a convex polygon: fan
// triangulation from the vertex mean, optional pre-splitting against a
// log-density bound, degree-7 rule per triangle, and 4-split refinement of
// any triangle whose estimate moves by more than its share of rel_tol times
// the total absolute estimate.
template <std::size_t K, class F>
Values<K> integrate(const ConvexPolygon& poly, F&& f, const Options& opt = {},
                    const LogRange& range = {}) {
    Values<K> total{};
    if (poly.empty()) return total;
    const Point2 c = poly.vertex_mean();
    std::vector<detail::Triangle> pieces;
    for (std::size_t k = 0; k < poly.size(); ++k) pieces.push_back({c, poly[k], poly.next(k)});
    if (range) pieces = detail::resolve(std::move(pieces), range, opt);
    std::vector<Values<K>> coarse(pieces.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        coarse[k] = triangle_rule<K>(pieces[k].a, pieces[k].b, pieces[k].c, f);
        for (double v : coarse[k]) scale += std::abs(v);
    }
    const double area = poly.area();
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const detail::Triangle& t = pieces[k];
        const double tol = opt.rel_tol * scale * (t.area() / area);
        const Values<K> v = detail::refine<K>(t.a, t.b, t.c, coarse[k], tol, 1, opt, f);
        for (std::size_t j = 0; j < K; ++j) total[j] += v[j];
    }
    return total;
}

// Log-density bounds for integrands weighted by phi.
inline LogRange log_range_of(const DensityField& phi) {
    if (phi.is_uniform()) return {};
    return [&phi](Point2 low, Point2 high) { return phi.log_range(low, high); };
}

}  // namespace covctl::quadrature
