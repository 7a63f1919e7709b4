#include "covctl/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "covctl/errors.hpp"

namespace covctl {

namespace {

double wrap_angle(double theta) {
    const double r = std::remainder(theta, 2.0 * std::numbers::pi);
    return r <= -std::numbers::pi ? r + 2.0 * std::numbers::pi : r;
}

struct Pose {
    double theta, x, y;
};

Pose unicycle_rate(const Pose& s, double omega, double v) {
    return {omega, v * std::cos(s.theta), v * std::sin(s.theta)};
}

Pose offset(const Pose& s, const Pose& d, double h) {
    return {s.theta + h * d.theta, s.x + h * d.x, s.y + h * d.y};
}

}  // namespace

Point2 position(const VehicleState& s) {
    return std::visit(
        [](const auto& v) -> Point2 {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Unicycle>)
                return v.position();
            else
                return v.p;
        },
        s);
}

EnergyRecord energy(double k_prop, double h_v, const std::vector<SecondOrder>& states) {
    EnergyRecord e;
    for (const SecondOrder& s : states) e.kinetic += 0.5 * norm2(s.v);
    e.coverage = h_v;
    e.E = 0.5 * k_prop * h_v + e.kinetic;
    return e;
}

Vec2 saturate(Vec2 x) {
    const double n = norm(x);
    return n <= 1.0 ? x : x / n;
}

FirstOrder step_first_order(const FirstOrder& s, Vec2 u, double h, const ConvexPolygon& region) {
    return {project_onto(region, s.p + h * saturate(u))};
}

Vec2 pd_control(const SecondOrder& s, double mass, Point2 centroid, double k_prop, double k_deriv) {
    return -k_prop * mass * (s.p - centroid) - k_deriv * s.v;
}

SecondOrder step_second_order(const SecondOrder& s, Vec2 u, double h, const ConvexPolygon& region) {
    // State (p, v), rate (v, u).
    const Vec2 k1p = s.v, k1v = u;
    const Vec2 k2p = s.v + 0.5 * h * k1v, k2v = u;
    const Vec2 k3p = s.v + 0.5 * h * k2v, k3v = u;
    const Vec2 k4p = s.v + h * k3v, k4v = u;
    SecondOrder out{s.p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
                    s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
    const Point2 inside = project_onto(region, out.p);
    if (inside != out.p) {
        const Vec2 n = out.p - inside;
        const double along = dot(out.v, n);
        if (along > 0.0) out.v -= (along / norm2(n)) * n;
        out.p = inside;
    }
    return out;
}

UnicycleCommand unicycle_control(const Unicycle& s, Point2 target, double k_prop) {
    UnicycleCommand cmd;
    cmd.state = s;
    const Vec2 e = s.position() - target;
    if (e == Vec2{0.0, 0.0}) return cmd;
    if (dot(Vec2{std::cos(s.theta), std::sin(s.theta)}, e) > 0.0) {
        cmd.state.theta = wrap_angle(s.theta + std::numbers::pi);
        cmd.state.dir = -s.dir;
    }
    const double th = cmd.state.theta;
    const double along = dot(Vec2{std::cos(th), std::sin(th)}, e);  // <= 0 after the flip
    const double across = dot(Vec2{-std::sin(th), std::cos(th)}, e);
    // along <= 0 keeps the quotient's arctan in (-pi/2, pi/2); a zero
    // denominator is the limit from that side.
    const double angle = along < 0.0 ? std::atan(across / along)
                                     : -0.5 * std::numbers::pi * (across > 0.0 ? 1.0 : -1.0);
    cmd.omega = 2.0 * k_prop * angle;
    cmd.v = -k_prop * along;
    return cmd;
}

Unicycle step_unicycle(const Unicycle& s, double omega, double v, double h,
                       const ConvexPolygon* region) {
    const Pose x0{s.theta, s.x, s.y};
    const Pose k1 = unicycle_rate(x0, omega, v);
    const Pose k2 = unicycle_rate(offset(x0, k1, 0.5 * h), omega, v);
    const Pose k3 = unicycle_rate(offset(x0, k2, 0.5 * h), omega, v);
    const Pose k4 = unicycle_rate(offset(x0, k3, h), omega, v);
    Unicycle out = s;
    out.theta = wrap_angle(s.theta + (h / 6.0) * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta));
    out.x = s.x + (h / 6.0) * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    out.y = s.y + (h / 6.0) * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    if (region) {
        const Point2 p = project_onto(*region, out.position());
        out.x = p.x;
        out.y = p.y;
    }
    return out;
}

PdTrace pd_closed_loop(const CoverageProblem& problem, const std::vector<SecondOrder>& start,
                       const PdOptions& options, const PdObserver& observer) {
    PdTrace trace;
    std::vector<SecondOrder> states = start;
    Configuration p(states.size());
    double tracked = energy(options.k_prop, 0.0, states).kinetic;
    for (std::size_t step = 0;; ++step) {
        for (std::size_t i = 0; i < states.size(); ++i) p[i] = states[i].p;
        const CellSnapshot snap = snapshot(problem, p);
        const double h_v = coverage_cost_voronoi(problem, p, snap).total;
        const EnergyRecord e = energy(options.k_prop, h_v, states);
        const double residual = centroid_residual(snap, p);
        const double t = options.h * static_cast<double>(step);
        trace.times.push_back(t);
        trace.energies.push_back(e);
        trace.tracked_kinetic.push_back(tracked);
        trace.residuals.push_back(residual);
        if (observer) observer(t, states, snap, e, residual);

        double max_speed = 0.0;
        for (const SecondOrder& s : states) max_speed = std::max(max_speed, norm(s.v));
        if (residual < options.tol && max_speed < options.tol) {
            trace.converged = true;
            break;
        }
        if (step >= options.max_steps) break;

        for (std::size_t i = 0; i < states.size(); ++i) {
            const SecondOrder& s = states[i];
            const Vec2 u = snap.moments[i]
                               ? pd_control(s, snap.moments[i]->mass, snap.moments[i]->centroid,
                                            options.k_prop, options.k_deriv)
                               : -options.k_deriv * s.v;
            // Work done by a held u over the step, then whatever the
            // boundary took away.
            const double h = options.h;
            const Vec2 free_v = s.v + h * u;
            const SecondOrder next = step_second_order(s, u, h, problem.region);
            tracked += dot(u, s.v) * h + 0.5 * norm2(u) * h * h;
            tracked -= 0.5 * (norm2(free_v) - norm2(next.v));
            states[i] = next;
        }
    }
    trace.final_states = states;
    return trace;
}

LocalController first_order_controller(const ConvexPolygon& region, double h) {
    return [region, h](const VehicleState& s, Point2 target, double delta) -> VehicleState {
        FirstOrder v = std::get<FirstOrder>(s);
        for (double t = 0.0; t < delta - 1e-12 * delta;) {
            const double dt = std::min(h, delta - t);
            v = step_first_order(v, target - v.p, dt, region);
            t += dt;
        }
        return v;
    };
}

LocalController unicycle_controller(const ConvexPolygon& region, double k_prop, double h) {
    return [region, k_prop, h](const VehicleState& s, Point2 target, double delta) -> VehicleState {
        Unicycle v = std::get<Unicycle>(s);
        for (double t = 0.0; t < delta - 1e-12 * delta;) {
            const double dt = std::min(h, delta - t);
            const UnicycleCommand cmd = unicycle_control(v, target, k_prop);
            v = step_unicycle(cmd.state, cmd.omega, cmd.v, dt, &region);
            t += dt;
        }
        return v;
    };
}

RoundResult local_controller_round(const CoverageProblem& problem,
                                   const std::vector<VehicleState>& states, double delta,
                                   const LocalController& controller) {
    Configuration p(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) p[i] = position(states[i]);
    const CellSnapshot snap = snapshot(problem, p);
    RoundResult r;
    r.states = states;
    r.targets.resize(states.size());
    r.before.assign(states.size(), 0.0);
    r.after.assign(states.size(), 0.0);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!snap.moments[i]) continue;
        const Point2 target = snap.moments[i]->centroid;
        r.targets[i] = target;
        r.before[i] = distance(p[i], target);
        if (r.before[i] == 0.0) continue;
        r.states[i] = controller(states[i], target, delta);
        r.after[i] = distance(position(r.states[i]), target);
        if (!(r.after[i] < r.before[i])) throw ControllerContractViolation(i, r.before[i], r.after[i]);
    }
    return r;
}

}  // namespace covctl
