#include "covctl/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>

#include "covctl/errors.hpp"
#include "covctl/tolerances.hpp"

namespace covctl {

namespace {

constexpr long kBoundaryLabel = -1;

// Vertex k carries the label of the edge (k, k+1).
struct LabeledVertex {
    Point2 p;
    long label = kBoundaryLabel;
};

using LabeledPolygon = std::vector<LabeledVertex>;

double shoelace(const std::vector<LabeledVertex>& v) {
    double twice = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const Point2& a = v[k].p;
        const Point2& b = v[(k + 1) % v.size()].p;
        twice += cross(a, b);
    }
    return 0.5 * twice;
}

// Removes consecutive vertices closer than the merge tolerance. When vertex k
// and k+1 coincide the edge k has zero length, so vertex k is dropped and the
// survivor keeps the label of the edge leaving it.
void merge_close_vertices(LabeledPolygon& poly) {
    bool changed = true;
    while (changed && poly.size() >= 2) {
        changed = false;
        for (std::size_t k = 0; k < poly.size() && poly.size() >= 2; ++k) {
            const std::size_t next = (k + 1) % poly.size();
            if (distance(poly[k].p, poly[next].p) <= kTol.vertex_merge) {
                poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(k));
                changed = true;
                break;
            }
        }
    }
    if (poly.size() < 3 || shoelace(poly) <= 0.0) poly.clear();
}

// Sutherland-Hodgman against one half-plane, propagating edge labels.
LabeledPolygon clip_labeled(const LabeledPolygon& poly, const HalfPlane& h, long label) {
    LabeledPolygon out;
    if (poly.size() < 3) return out;
    const double scale = norm(h.normal);
    const double slack = 1e-14 * scale;
    out.reserve(poly.size() + 2);
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const LabeledVertex& cur = poly[k];
        const LabeledVertex& nxt = poly[(k + 1) % poly.size()];
        const double dc = h.signed_value(cur.p);
        const double dn = h.signed_value(nxt.p);
        const bool cur_in = dc >= -slack;
        const bool nxt_in = dn >= -slack;
        auto crossing = [&] {
            double t = dc / (dc - dn);
            t = std::clamp(t, 0.0, 1.0);
            return cur.p + t * (nxt.p - cur.p);
        };
        if (cur_in && nxt_in) {
            out.push_back(cur);
        } else if (cur_in && !nxt_in) {
            out.push_back(cur);
            out.push_back({crossing(), label});
        } else if (!cur_in && nxt_in) {
            out.push_back({crossing(), cur.label});
        }
    }
    merge_close_vertices(out);
    return out;
}

LabeledPolygon to_labeled(const ConvexPolygon& poly) {
    LabeledPolygon out;
    out.reserve(poly.size());
    for (const Point2& p : poly.vertices()) out.push_back({p, kBoundaryLabel});
    return out;
}

ConvexPolygon from_labeled(const LabeledPolygon& poly) {
    std::vector<Point2> v;
    v.reserve(poly.size());
    for (const auto& lv : poly) v.push_back(lv.p);
    return ConvexPolygon(std::move(v));
}

// Clips the region by the bisectors of generator i against all others,
// nearest first. A generator farther than twice the current cell radius
// cannot cut the cell, which ends the loop early.
LabeledPolygon labeled_cell(const ConvexPolygon& region, std::span<const Point2> gens,
                            std::size_t i) {
    LabeledPolygon cell = to_labeled(region);
    std::vector<std::size_t> order;
    order.reserve(gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j)
        if (j != i) order.push_back(j);
    std::vector<double> d2(gens.size());
    for (std::size_t j : order) d2[j] = norm2(gens[j] - gens[i]);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
    });
    double reach2 = std::numeric_limits<double>::infinity();
    auto refresh_reach = [&] {
        double r = 0.0;
        for (const auto& v : cell) r = std::max(r, norm2(v.p - gens[i]));
        reach2 = 4.0 * r * (1.0 + 1e-9);
    };
    refresh_reach();
    for (std::size_t j : order) {
        if (cell.empty()) break;
        if (d2[j] > reach2) break;
        cell = clip_labeled(cell, HalfPlane::bisector(gens[i], gens[j]), static_cast<long>(j));
        refresh_reach();
    }
    return cell;
}

}  // namespace

HalfPlane HalfPlane::bisector(Point2 p_i, Point2 p_j) {
    const Vec2 d = p_i - p_j;
    return {2.0 * d, dot(p_i + p_j, d)};
}

ConvexPolygon ConvexPolygon::from_vertices(std::vector<Point2> vertices) {
    for (const Point2& p : vertices)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValidationError("polygon vertex is not finite");
    // Drop a repeated closing vertex and consecutive duplicates.
    std::vector<Point2> v;
    for (const Point2& p : vertices)
        if (v.empty() || distance(v.back(), p) > kTol.vertex_merge) v.push_back(p);
    while (v.size() > 1 && distance(v.front(), v.back()) <= kTol.vertex_merge) v.pop_back();
    if (v.size() < 3) throw ValidationError("polygon needs at least 3 distinct vertices");

    double twice_area = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) twice_area += cross(v[k], v[(k + 1) % v.size()]);
    if (twice_area == 0.0) throw ValidationError("polygon has zero area");
    if (twice_area < 0.0) std::reverse(v.begin(), v.end());

    const std::size_t n = v.size();
    double winding = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 e0 = v[(k + 1) % n] - v[k];
        const Vec2 e1 = v[(k + 2) % n] - v[(k + 1) % n];
        const double c = cross(e0, e1);
        if (c < -1e-12 * norm(e0) * norm(e1)) throw ValidationError("polygon is nonconvex");
        winding += std::atan2(c, dot(e0, e1));
    }
    // A star polygon turns left at every vertex but winds more than once.
    if (std::abs(winding - 2.0 * std::numbers::pi) > 1e-6)
        throw ValidationError("polygon is nonconvex (self-intersecting)");
    return ConvexPolygon(std::move(v));
}

ConvexPolygon ConvexPolygon::rectangle(double x0, double y0, double x1, double y1) {
    return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ConvexPolygon ConvexPolygon::circumscribed_regular(Point2 center, double radius, int sides) {
    const double r = radius / std::cos(std::numbers::pi / sides);
    std::vector<Point2> v;
    v.reserve(static_cast<std::size_t>(sides));
    for (int k = 0; k < sides; ++k) {
        const double a = 2.0 * std::numbers::pi * k / sides;
        v.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    return ConvexPolygon(std::move(v));
}

double ConvexPolygon::area() const {
    if (empty()) return 0.0;
    double twice = 0.0;
    for (std::size_t k = 0; k < size(); ++k) twice += cross(vertices_[k], next(k));
    return 0.5 * twice;
}

Point2 ConvexPolygon::vertex_mean() const {
    Point2 s;
    for (const Point2& p : vertices_) s += p;
    return s / static_cast<double>(vertices_.size());
}

bool ConvexPolygon::contains(Point2 q, double slack) const {
    if (empty()) return false;
    for (std::size_t k = 0; k < size(); ++k) {
        const Vec2 e = next(k) - vertices_[k];
        if (cross(e, q - vertices_[k]) < -slack * norm(e)) return false;
    }
    return true;
}

double ConvexPolygon::max_distance_from(Point2 p) const {
    double r = 0.0;
    for (const Point2& v : vertices_) r = std::max(r, distance(v, p));
    return r;
}

double ConvexPolygon::diameter() const {
    double d = 0.0;
    for (std::size_t a = 0; a < size(); ++a)
        for (std::size_t b = a + 1; b < size(); ++b)
            d = std::max(d, distance(vertices_[a], vertices_[b]));
    return d;
}

ConvexPolygon clip_halfplane(const ConvexPolygon& poly, const HalfPlane& h) {
    return from_labeled(clip_labeled(to_labeled(poly), h, kBoundaryLabel));
}

ConvexPolygon intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
    LabeledPolygon out = to_labeled(a);
    for (std::size_t k = 0; k < b.size() && !out.empty(); ++k) {
        const Vec2 e = b.next(k) - b[k];
        // Left of a counterclockwise edge is inside.
        const HalfPlane h{{-e.y, e.x}, dot(Vec2{-e.y, e.x}, b[k])};
        out = clip_labeled(out, h, kBoundaryLabel);
    }
    return from_labeled(out);
}

double symmetric_difference_area(const ConvexPolygon& a, const ConvexPolygon& b) {
    const double common = intersect(a, b).area();
    return std::max(0.0, a.area() + b.area() - 2.0 * common);
}

Point2 project_onto(const ConvexPolygon& poly, Point2 q) {
    if (poly.empty()) throw EmptyRegion();
    if (poly.contains(q, 0.0)) return q;
    Point2 best = poly[0];
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point2 a = poly[k];
        const Vec2 e = poly.next(k) - a;
        const double t = std::clamp(dot(q - a, e) / norm2(e), 0.0, 1.0);
        const Point2 c = a + t * e;
        const double d2 = norm2(q - c);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = c;
        }
    }
    return best;
}

void check_distinct(std::span<const Point2> generators) {
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t j = i + 1; j < generators.size(); ++j)
            if (distance(generators[i], generators[j]) < kTol.duplicate_generators)
                throw DuplicateGenerators(i, j);
}

const Segment* VoronoiDiagram::face(std::size_t i, std::size_t j) const {
    const auto it = faces.find({std::min(i, j), std::max(i, j)});
    return it == faces.end() ? nullptr : &it->second;
}

VoronoiDiagram voronoi_diagram(const ConvexPolygon& region, std::span<const Point2> generators) {
    check_distinct(generators);
    const std::size_t n = generators.size();
    VoronoiDiagram diagram;
    diagram.cells.reserve(n);
    diagram.neighbors.assign(n, {});
    std::vector<LabeledPolygon> labeled(n);
    for (std::size_t i = 0; i < n; ++i) {
        labeled[i] = labeled_cell(region, generators, i);
        diagram.cells.push_back(from_labeled(labeled[i]));
    }
    // Faces are read off the lower-indexed cell so that N(i) is symmetric
    // by construction.
    for (std::size_t i = 0; i < n; ++i) {
        const LabeledPolygon& cell = labeled[i];
        for (std::size_t k = 0; k < cell.size(); ++k) {
            const long label = cell[k].label;
            if (label < 0) continue;
            const auto j = static_cast<std::size_t>(label);
            if (j < i) continue;
            const Segment s{cell[k].p, cell[(k + 1) % cell.size()].p};
            if (s.length() <= kTol.face_length) continue;
            diagram.faces[{i, j}] = s;
        }
    }
    for (const auto& [key, seg] : diagram.faces) {
        diagram.neighbors[key.first].push_back(key.second);
        diagram.neighbors[key.second].push_back(key.first);
    }
    for (auto& nb : diagram.neighbors) std::sort(nb.begin(), nb.end());
    return diagram;
}

ConvexPolygon voronoi_cell(const ConvexPolygon& region, std::span<const Point2> generators,
                           std::size_t i) {
    for (std::size_t j = 0; j < generators.size(); ++j)
        if (j != i && distance(generators[i], generators[j]) < kTol.duplicate_generators)
            throw DuplicateGenerators(std::min(i, j), std::max(i, j));
    return from_labeled(labeled_cell(region, generators, i));
}

Point2 circumcenter(Point2 p_i, Point2 p_j, Point2 p_k) {
    const double signed_area = 0.5 * cross(p_j - p_i, p_k - p_i);
    if (std::abs(signed_area) < kTol.degenerate_triangle) throw DegenerateTriangle();
    const Vec2 a_kj = p_k - p_j;
    const Vec2 a_ji = p_j - p_i;
    const Vec2 a_ik = p_i - p_k;
    const double w_i = norm2(a_kj) * dot(a_ji, a_ik);
    const double w_j = norm2(a_ik) * dot(a_kj, a_ji);
    const double w_k = norm2(a_ji) * dot(a_ik, a_kj);
    // The weights sum to -8 M^2, which fixes the normalization.
    const double scale = -1.0 / (8.0 * signed_area * signed_area);
    return scale * (w_i * p_i + w_j * p_j + w_k * p_k);
}

namespace {

Disk disk_from_two(Point2 a, Point2 b) { return {midpoint(a, b), 0.5 * distance(a, b)}; }

Disk disk_from_three(Point2 a, Point2 b, Point2 c) {
    const double twice_area = cross(b - a, c - a);
    const double scale = std::max({norm2(b - a), norm2(c - a), norm2(c - b)});
    if (std::abs(twice_area) <= 1e-14 * scale) {
        // Nearly collinear: the disk on the longest side covers all three.
        Disk d = disk_from_two(a, b);
        for (Disk cand : {disk_from_two(a, c), disk_from_two(b, c)})
            if (cand.radius > d.radius) d = cand;
        return d;
    }
    // Solve |x-a| = |x-b| = |x-c| directly.
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double d = 2.0 * twice_area;
    const Point2 off{(ac.y * norm2(ab) - ab.y * norm2(ac)) / d,
                     (ab.x * norm2(ac) - ac.x * norm2(ab)) / d};
    return {a + off, norm(off)};
}

bool covers(const Disk& d, Point2 p) {
    return distance(d.center, p) <= d.radius * (1.0 + 1e-12) + 1e-15;
}

}  // namespace

Disk min_enclosing_disk(const ConvexPolygon& poly) {
    if (poly.empty()) throw EmptyRegion();
    const auto& v = poly.vertices();
    // Incremental Welzl; vertex counts are small so no shuffling is needed.
    Disk d{v[0], 0.0};
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (covers(d, v[i])) continue;
        d = {v[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (covers(d, v[j])) continue;
            d = disk_from_two(v[i], v[j]);
            for (std::size_t k = 0; k < j; ++k)
                if (!covers(d, v[k])) d = disk_from_three(v[i], v[j], v[k]);
        }
    }
    return d;
}

}  // namespace covctl
