#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace covctl {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2& operator+=(Point2 o) { x += o.x; y += o.y; return *this; }
    Point2& operator-=(Point2 o) { x -= o.x; y -= o.y; return *this; }
    Point2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend bool operator==(Point2, Point2) = default;
};

// Displacements share the representation of points.
using Vec2 = Point2;

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

// Closed half-plane {q : normal . q >= offset}.
struct HalfPlane {
    Vec2 normal;
    double offset = 0.0;

    double signed_value(Point2 q) const { return dot(normal, q) - offset; }
    bool contains(Point2 q) const { return signed_value(q) >= 0.0; }

    // Points at least as close to p_i as to p_j:
    // 2 q.(p_i - p_j) >= (p_i + p_j).(p_i - p_j).
    static HalfPlane bisector(Point2 p_i, Point2 p_j);
};

struct Segment {
    Point2 a;
    Point2 b;
    double length() const { return distance(a, b); }
};

// Counterclockwise vertex list, first vertex not repeated. An empty vertex
// list is the empty polygon.
class ConvexPolygon {
public:
    ConvexPolygon() = default;

    // Trusts the caller: vertices must already be convex and counterclockwise.
    explicit ConvexPolygon(std::vector<Point2> ccw_vertices) : vertices_(std::move(ccw_vertices)) {}

    // Validating constructor. Accepts either orientation, drops repeated
    // closing/consecutive vertices and throws ValidationError when the
    // vertex list is not a convex polygon with positive area.
    static ConvexPolygon from_vertices(std::vector<Point2> vertices);
    static ConvexPolygon rectangle(double x0, double y0, double x1, double y1);
    // Regular polygon whose edges are tangent to the circle (center, radius).
    static ConvexPolygon circumscribed_regular(Point2 center, double radius, int sides);

    const std::vector<Point2>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    bool empty() const { return vertices_.size() < 3; }
    const Point2& operator[](std::size_t k) const { return vertices_[k]; }
    // Vertex k+1 with the wrap-around convention x_N = x_0.
    const Point2& next(std::size_t k) const { return vertices_[(k + 1) % vertices_.size()]; }

    double area() const;
    Point2 vertex_mean() const;
    bool contains(Point2 q, double slack = 1e-12) const;
    double max_distance_from(Point2 p) const;
    double diameter() const;

private:
    std::vector<Point2> vertices_;
};

ConvexPolygon clip_halfplane(const ConvexPolygon& poly, const HalfPlane& h);
ConvexPolygon intersect(const ConvexPolygon& a, const ConvexPolygon& b);
// Area of the symmetric difference of two convex polygons.
double symmetric_difference_area(const ConvexPolygon& a, const ConvexPolygon& b);
// Closest point of the polygon to q (q itself when inside).
Point2 project_onto(const ConvexPolygon& poly, Point2 q);

// Throws DuplicateGenerators if two generators coincide.
void check_distinct(std::span<const Point2> generators);

struct VoronoiDiagram {
    std::vector<ConvexPolygon> cells;
    std::vector<std::vector<std::size_t>> neighbors;
    // Keyed by (i, j) with i < j.
    std::map<std::pair<std::size_t, std::size_t>, Segment> faces;

    const Segment* face(std::size_t i, std::size_t j) const;
};

VoronoiDiagram voronoi_diagram(const ConvexPolygon& region, std::span<const Point2> generators);
// Cell of one generator only; same clipping as voronoi_diagram.
ConvexPolygon voronoi_cell(const ConvexPolygon& region, std::span<const Point2> generators,
                           std::size_t i);

// Circumcenter written in terms of the edge vectors alpha_ls = p_l - p_s.
Point2 circumcenter(Point2 p_i, Point2 p_j, Point2 p_k);

struct Disk {
    Point2 center;
    double radius = 0.0;
};

Disk min_enclosing_disk(const ConvexPolygon& poly);
inline Point2 min_enclosing_ball_center(const ConvexPolygon& poly) {
    return min_enclosing_disk(poly).center;
}

}  // namespace covctl
