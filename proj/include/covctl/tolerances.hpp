#pragma once

namespace covctl {

// Every numerical threshold used by the library lives here.
struct Tolerances {
    double duplicate_generators = 1e-12;  // generator coincidence
    double vertex_merge = 1e-12;          // consecutive polygon vertices
    double face_length = 1e-12;           // shorter faces do not make neighbors
    double degenerate_triangle = 1e-12;   // |area| below this is collinear
    double zero_mass = 1e-14;             // cell mass below this has no centroid
    double quadrature_rel = 1e-6;         // adaptive triangle quadrature, relative
    int quadrature_max_depth = 7;         // 4-split levels per fan triangle
    double active_speed = 1e-9;           // agents faster than this are active
    int radius_max_iterations = 64;       // adjust-radius guard
    int disk_polygon_sides = 64;          // circumscribed polygon for sensing disks
};

inline constexpr Tolerances kTol{};

}  // namespace covctl
