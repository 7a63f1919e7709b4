#pragma once
// Test-only reference computations. Nothing here calls into the library's
// quadrature, moments or Voronoi code, so they can check those paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "covctl/geometry.hpp"

namespace oracle {

using covctl::ConvexPolygon;
using covctl::Point2;

// Andrew's monotone chain; returns a counterclockwise hull.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(),
              [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    if (pts.size() < 3) return pts;
    std::vector<Point2> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && covctl::cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && covctl::cross(h[k - 1] - h[k - 2], pts[i - 1] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

// Hull of random points in a box; retries until the hull has >= 4 vertices.
template <class Rng>
ConvexPolygon random_convex_polygon(Rng& rng, double lo = -1.0, double hi = 1.0, int points = 12) {
    std::uniform_real_distribution<double> u(lo, hi);
    for (;;) {
        std::vector<Point2> pts;
        for (int k = 0; k < points; ++k) pts.push_back({u(rng), u(rng)});
        auto hull = convex_hull(pts);
        if (hull.size() >= 4) {
            ConvexPolygon poly(hull);
            if (poly.area() > 0.05 * (hi - lo) * (hi - lo)) return poly;
        }
    }
}

inline bool inside(const ConvexPolygon& poly, Point2 q) {
    for (std::size_t k = 0; k < poly.size(); ++k)
        if (covctl::cross(poly.next(k) - poly[k], q - poly[k]) < 0) return false;
    return true;
}

template <class Rng>
Point2 random_point_in(const ConvexPolygon& poly, Rng& rng) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Point2& p : poly.vertices()) {
        x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    }
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    for (;;) {
        Point2 q{ux(rng), uy(rng)};
        if (inside(poly, q)) return q;
    }
}

template <class Rng>
std::vector<Point2> random_configuration(const ConvexPolygon& poly, std::size_t n, Rng& rng,
                                         double min_separation = 1e-3) {
    std::vector<Point2> pts;
    while (pts.size() < n) {
        Point2 q = random_point_in(poly, rng);
        bool ok = true;
        for (const Point2& p : pts) ok = ok && covctl::distance(p, q) > min_separation;
        if (ok) pts.push_back(q);
    }
    return pts;
}

inline double shoelace_area(const ConvexPolygon& poly) {
    double s = 0;
    for (std::size_t k = 0; k < poly.size(); ++k) s += covctl::cross(poly[k], poly.next(k));
    return 0.5 * s;
}

// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
}

// Collapsed-square (Duffy) tensor Gauss-Legendre over a triangle.
inline double duffy_triangle(Point2 a, Point2 b, Point2 c, const std::function<double(Point2)>& f,
                             int order = 24) {
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    const double jac = std::abs(covctl::cross(b - a, c - a));
    double sum = 0.0;
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
            const double s = x[i], t = x[j];
            // (s, t) in [0,1]^2 -> (s, s t) in the reference triangle scaled.
            const double u = s * (1.0 - t), v = s * t;
            const Point2 q = a + u * (b - a) + v * (c - a);
            sum += w[i] * w[j] * s * f(q);
        }
    return jac * sum;
}

// Fan from vertex 0, each triangle uniformly subdivided `splits` times per side.
inline double integrate_polygon(const ConvexPolygon& poly, const std::function<double(Point2)>& f,
                                int order = 24, int splits = 1) {
    double total = 0.0;
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        const Point2 a = poly[0], b = poly[k], c = poly[k + 1];
        const int m = splits;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m - i; ++j) {
                auto node = [&](int ii, int jj) {
                    return a + (double(ii) / m) * (b - a) + (double(jj) / m) * (c - a);
                };
                total += duffy_triangle(node(i, j), node(i + 1, j), node(i, j + 1), f, order);
                if (j < m - i - 1)
                    total += duffy_triangle(node(i + 1, j), node(i + 1, j + 1), node(i, j + 1), f, order);
            }
    }
    return total;
}

template <class Rng>
double monte_carlo(const ConvexPolygon& poly, const std::function<double(Point2)>& f, int samples,
                   Rng& rng) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Point2& p : poly.vertices()) {
        x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    }
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    double sum = 0.0;
    for (int k = 0; k < samples; ++k) {
        Point2 q{ux(rng), uy(rng)};
        if (inside(poly, q)) sum += f(q);
    }
    return sum * (x1 - x0) * (y1 - y0) / samples;
}

inline std::size_t nearest(const std::vector<Point2>& gens, Point2 q) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < gens.size(); ++j)
        if (covctl::norm2(gens[j] - q) < covctl::norm2(gens[best] - q)) best = j;
    return best;
}

// Smallest enclosing circle by enumerating 2- and 3-point supports.
inline covctl::Disk brute_force_enclosing_disk(const std::vector<Point2>& pts) {
    covctl::Disk best{{0, 0}, std::numeric_limits<double>::infinity()};
    auto covers_all = [&](const covctl::Disk& d) {
        for (const Point2& p : pts)
            if (covctl::distance(p, d.center) > d.radius * (1 + 1e-12) + 1e-14) return false;
        return true;
    };
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            covctl::Disk d{covctl::midpoint(pts[i], pts[j]), 0.5 * covctl::distance(pts[i], pts[j])};
            if (d.radius < best.radius && covers_all(d)) best = d;
            for (std::size_t k = j + 1; k < pts.size(); ++k) {
                // Solve the 2x2 equidistance system.
                const Point2 a = pts[i], b = pts[j], c = pts[k];
                const double a11 = 2 * (b.x - a.x), a12 = 2 * (b.y - a.y);
                const double a21 = 2 * (c.x - a.x), a22 = 2 * (c.y - a.y);
                const double r1 = covctl::norm2(b) - covctl::norm2(a);
                const double r2 = covctl::norm2(c) - covctl::norm2(a);
                const double det = a11 * a22 - a12 * a21;
                if (std::abs(det) < 1e-14) continue;
                const Point2 o{(r1 * a22 - r2 * a12) / det, (a11 * r2 - a21 * r1) / det};
                covctl::Disk cand{o, covctl::distance(o, a)};
                if (cand.radius < best.radius && covers_all(cand)) best = cand;
            }
        }
    return best;
}

}  // namespace oracle
