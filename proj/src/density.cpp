#include "covctl/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "covctl/errors.hpp"

namespace covctl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(std::initializer_list<double> values) {
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("density parameter is not finite");
}

struct Interval {
    double lo, hi;
};

// {(t - c)^2 : t in [lo, hi]}
Interval square_offset(double lo, double hi, double c) {
    const double a = (lo - c) * (lo - c);
    const double b = (hi - c) * (hi - c);
    if (lo <= c && c <= hi) return {0.0, std::max(a, b)};
    return {std::min(a, b), std::max(a, b)};
}

Interval scale(Interval i, double s) {
    return s >= 0.0 ? Interval{s * i.lo, s * i.hi} : Interval{s * i.hi, s * i.lo};
}

Interval square(Interval i) { return square_offset(i.lo, i.hi, 0.0); }

// a (x - xc)^2 + b (y - yc)^2 - r^2 over the box.
Interval conic(double a, double b, double xc, double yc, double r, Point2 low, Point2 high) {
    const Interval x = scale(square_offset(low.x, high.x, xc), a);
    const Interval y = scale(square_offset(low.y, high.y, yc), b);
    return {x.lo + y.lo - r * r, x.hi + y.hi - r * r};
}

}  // namespace

double smooth_ramp(double ell, double x) {
    return x * (std::atan(ell * x) / std::numbers::pi + 0.5);
}

DensityField::DensityField(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const density::Uniform&) {},
                   [](const density::Gaussian& g) { require_finite({g.center.x, g.center.y, g.gain}); },
                   [](const density::Line& l) {
                       require_finite({l.a, l.b, l.c, l.k});
                       if (l.a == 0.0 && l.b == 0.0)
                           throw ValidationError("line density needs (a, b) != (0, 0)");
                   },
                   [](const density::Ellipse& e) { require_finite({e.a, e.b, e.xc, e.yc, e.r, e.k}); },
                   [](const density::Disk& d) {
                       require_finite({d.a, d.b, d.xc, d.yc, d.r, d.k, d.ell});
                       if (d.ell <= 0.0) throw ValidationError("smooth ramp needs l > 0");
                   },
               },
               v_);
}

double DensityField::operator()(Point2 q) const {
    return std::visit(
        overloaded{
            [](const density::Uniform&) { return 1.0; },
            [&](const density::Gaussian& g) {
                const double dx = q.x - g.center.x;
                const double dy = q.y - g.center.y;
                return std::exp(g.gain * (-dx * dx - dy * dy));
            },
            [&](const density::Line& l) {
                const double s = l.a * q.x + l.b * q.y + l.c;
                return std::exp(-l.k * s * s);
            },
            [&](const density::Ellipse& e) {
                const double dx = q.x - e.xc;
                const double dy = q.y - e.yc;
                const double s = e.a * dx * dx + e.b * dy * dy - e.r * e.r;
                return std::exp(-e.k * s * s);
            },
            [&](const density::Disk& d) {
                const double dx = q.x - d.xc;
                const double dy = q.y - d.yc;
                const double s = d.a * dx * dx + d.b * dy * dy - d.r * d.r;
                return std::exp(-d.k * smooth_ramp(d.ell, s));
            },
        },
        v_);
}

std::pair<double, double> DensityField::log_range(Point2 low, Point2 high) const {
    const auto as_pair = [](Interval i) { return std::pair{i.lo, i.hi}; };
    return std::visit(
        overloaded{
            [](const density::Uniform&) { return std::pair{0.0, 0.0}; },
            [&](const density::Gaussian& g) {
                return as_pair(scale(conic(1.0, 1.0, g.center.x, g.center.y, 0.0, low, high), -g.gain));
            },
            [&](const density::Line& l) {
                const double c0 = l.a * (l.a >= 0 ? low.x : high.x) + l.b * (l.b >= 0 ? low.y : high.y) + l.c;
                const double c1 = l.a * (l.a >= 0 ? high.x : low.x) + l.b * (l.b >= 0 ? high.y : low.y) + l.c;
                return as_pair(scale(square({c0, c1}), -l.k));
            },
            [&](const density::Ellipse& e) {
                return as_pair(scale(square(conic(e.a, e.b, e.xc, e.yc, e.r, low, high)), -e.k));
            },
            [&](const density::Disk& d) {
                // The smooth ramp is increasing.
                const Interval s = conic(d.a, d.b, d.xc, d.yc, d.r, low, high);
                return as_pair(scale({smooth_ramp(d.ell, s.lo), smooth_ramp(d.ell, s.hi)}, -d.k));
            },
        },
        v_);
}

std::string DensityField::name() const {
    static constexpr const char* names[] = {"uniform", "gaussian", "line", "ellipse", "disk"};
    return names[v_.index()];
}

SensingPerformance SensingPerformance::quadratic() {
    return {"quadratic", [](double d) { return d * d; }, [](double d) { return 2.0 * d; }, true};
}

SensingPerformance SensingPerformance::custom(std::string name, Fn f, Fn derivative) {
    if (!f || !derivative) throw ValidationError("sensing performance needs f and f'");
    if (f(0.0) < 0.0) throw ValidationError("sensing performance must satisfy f(0) >= 0");
    double prev = f(0.0);
    for (int k = 1; k <= 200; ++k) {
        const double v = f(0.05 * k);
        if (v < prev) throw ValidationError("sensing performance must be non-decreasing");
        prev = v;
    }
    return {std::move(name), std::move(f), std::move(derivative), false};
}

SensingPerformance SensingPerformance::power(double p) {
    if (!(p >= 1.0)) throw ValidationError("power sensing performance needs p >= 1");
    if (p == 2.0) return quadratic();
    return custom(
        "power " + std::to_string(p), [p](double d) { return std::pow(d, p); },
        [p](double d) { return p * std::pow(d, p - 1.0); });
}

}  // namespace covctl
