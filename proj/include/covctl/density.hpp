#pragma once

#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "covctl/geometry.hpp"

namespace covctl {

namespace density {

struct Uniform {};

// exp(gain * (-(x - xc)^2 - (y - yc)^2))
struct Gaussian {
    Point2 center;
    double gain = 1.0;
};

// exp(-k (a x + b y + c)^2)
struct Line {
    double a = 1.0, b = 0.0, c = 0.0, k = 1.0;
};

// exp(-k (a (x - xc)^2 + b (y - yc)^2 - r^2)^2)
struct Ellipse {
    double a = 1.0, b = 1.0, xc = 0.0, yc = 0.0, r = 1.0, k = 1.0;
};

// exp(-k SR_l(a (x - xc)^2 + b (y - yc)^2 - r^2))
struct Disk {
    double a = 1.0, b = 1.0, xc = 0.0, yc = 0.0, r = 1.0, k = 1.0, ell = 10.0;
};

}  // namespace density

double smooth_ramp(double ell, double x);

class DensityField {
public:
    using Variant = std::variant<density::Uniform, density::Gaussian, density::Line,
                                 density::Ellipse, density::Disk>;

    DensityField() = default;
    // Throws ValidationError on non-finite parameters or a degenerate line.
    DensityField(Variant v);  // NOLINT(google-explicit-constructor)
    template <class T>
        requires(!std::is_same_v<std::decay_t<T>, Variant> &&
                 !std::is_same_v<std::decay_t<T>, DensityField> &&
                 std::is_constructible_v<Variant, T>)
    DensityField(T&& alternative)  // NOLINT(google-explicit-constructor)
        : DensityField(Variant(std::forward<T>(alternative))) {}

    static DensityField uniform() { return {density::Uniform{}}; }

    double operator()(Point2 q) const;
    // Bounds [lo, hi] on log phi over the box [low, high]. Loose but valid.
    std::pair<double, double> log_range(Point2 low, Point2 high) const;
    bool is_uniform() const { return std::holds_alternative<density::Uniform>(v_); }
    const Variant& variant() const { return v_; }
    std::string name() const;

private:
    Variant v_;
};

inline double eval_density(const DensityField& phi, Point2 q) { return phi(q); }

// Sensing performance f(d) with its derivative. The quadratic case is
// special-cased wherever the parallel-axis decomposition applies.
class SensingPerformance {
public:
    using Fn = std::function<double(double)>;

    static SensingPerformance quadratic();
    // Throws ValidationError if f is decreasing on a sample grid or f(0) < 0.
    static SensingPerformance custom(std::string name, Fn f, Fn derivative);
    // f(d) = d^p, p >= 1.
    static SensingPerformance power(double p);

    bool is_quadratic() const { return quadratic_; }
    double operator()(double d) const { return f_(d); }
    double derivative(double d) const { return df_(d); }
    const std::string& name() const { return name_; }

private:
    SensingPerformance(std::string name, Fn f, Fn df, bool quadratic)
        : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)), quadratic_(quadratic) {}

    std::string name_;
    Fn f_;
    Fn df_;
    bool quadratic_ = false;
};

}  // namespace covctl
