#pragma once

#include "covctl/density.hpp"
#include "covctl/geometry.hpp"
#include "covctl/quadrature.hpp"

namespace covctl {

// Mass M_V, centroid C_V and polar moment J_{V,C_V} of a region.
struct CellMoments {
    double mass = 0.0;
    Point2 centroid;
    double polar_moment_centroid = 0.0;

    // Parallel-axis shift: J_{V,p} = J_{V,C} + M |p - C|^2.
    double polar_moment_about(Point2 p) const {
        return polar_moment_centroid + mass * norm2(p - centroid);
    }
};

// Closed-form shoelace moments for unit density. Throws EmptyRegion.
CellMoments polygon_moments_uniform(const ConvexPolygon& poly);

// Moments under a general density by adaptive triangle quadrature.
// Throws EmptyRegion for an empty polygon and ZeroMass when the mass is
// below the zero-mass tolerance.
CellMoments cell_moments(const ConvexPolygon& poly, const DensityField& phi,
                         const quadrature::Options& opt = {});

// Closed form for uniform fields, quadrature otherwise.
CellMoments region_moments(const ConvexPolygon& poly, const DensityField& phi);

}  // namespace covctl
