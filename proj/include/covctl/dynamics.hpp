#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "covctl/objective.hpp"

namespace covctl {

struct FirstOrder {
    Point2 p;
};

struct SecondOrder {
    Point2 p;
    Vec2 v;
};

// Heading theta in (-pi, pi]. dir records how many times the discrete
// action (theta, v) -> (theta + pi, -v) has been applied, as a sign.
struct Unicycle {
    double theta = 0.0;
    double x = 0.0;
    double y = 0.0;
    int dir = 1;

    Point2 position() const { return {x, y}; }
};

using VehicleState = std::variant<FirstOrder, SecondOrder, Unicycle>;

Point2 position(const VehicleState& s);

// Lyapunov value of the PD closed loop: E = (k_prop / 2) H_V + kinetic.
struct EnergyRecord {
    double E = 0.0;
    double kinetic = 0.0;   // sum of |v_i|^2 / 2
    double coverage = 0.0;  // H_V
};

EnergyRecord energy(double k_prop, double h_v, const std::vector<SecondOrder>& states);

// x if |x| <= 1, else x / |x|.
Vec2 saturate(Vec2 x);

// p + h saturate(u), projected onto the region.
FirstOrder step_first_order(const FirstOrder& s, Vec2 u, double h, const ConvexPolygon& region);

// u = -k_prop M (p - C) - k_deriv v.
Vec2 pd_control(const SecondOrder& s, double mass, Point2 centroid, double k_prop, double k_deriv);

// One RK4 step of p' = v, v' = u with u held. If the step leaves the region
// the position is projected back and the outward velocity is removed.
SecondOrder step_second_order(const SecondOrder& s, Vec2 u, double h, const ConvexPolygon& region);

struct UnicycleCommand {
    double omega = 0.0;
    double v = 0.0;
    Unicycle state;  // input state, flipped if it was facing away
};

// Steering law toward a fixed target. The heading is first flipped so
// that it does not point away from the target; omega then turns it
// toward the target and v drives along it.
UnicycleCommand unicycle_control(const Unicycle& s, Point2 target, double k_prop);

// One RK4 step of the unicycle kinematics with (omega, v) held. The
// position is projected onto the region when one is given.
Unicycle step_unicycle(const Unicycle& s, double omega, double v, double h,
                       const ConvexPolygon* region = nullptr);

struct PdOptions {
    double k_prop = 6.0;
    double k_deriv = 1.0;
    double h = 0.005;
    std::size_t max_steps = 10000;
    double tol = 0.0;  // stop once the residual and every speed are below tol
};

struct PdTrace {
    std::vector<double> times;
    std::vector<EnergyRecord> energies;
    // Kinetic energy accumulated from the work done by u, minus what the
    // boundary removed. Matches energies[k].kinetic up to rounding.
    std::vector<double> tracked_kinetic;
    std::vector<double> residuals;
    std::vector<SecondOrder> final_states;
    bool converged = false;
};

// Called once per recorded state, before the step from it.
using PdObserver = std::function<void(double t, const std::vector<SecondOrder>& states,
                                      const CellSnapshot& snap, const EnergyRecord& energy,
                                      double residual)>;

// Closed loop of second-order vehicles under the PD law, one diagram per
// step. Agents whose cell has no mass are only damped.
PdTrace pd_closed_loop(const CoverageProblem& problem, const std::vector<SecondOrder>& start,
                       const PdOptions& options, const PdObserver& observer = {});

// Drives one vehicle toward a fixed target for a round of length delta.
using LocalController =
    std::function<VehicleState(const VehicleState& s, Point2 target, double delta)>;

// u = saturate(target - p) integrated with step h.
LocalController first_order_controller(const ConvexPolygon& region, double h);
// The unicycle steering law integrated with step h.
LocalController unicycle_controller(const ConvexPolygon& region, double k_prop, double h);

struct RoundResult {
    std::vector<VehicleState> states;
    std::vector<std::optional<Point2>> targets;  // absent for zero-mass cells
    std::vector<double> before;                  // distance to target at round start
    std::vector<double> after;
};

// One synchronized round: build the diagram once, hold every centroid as a
// target and run the controller for delta. Throws
// ControllerContractViolation if a vehicle not already at its target fails
// to get strictly closer.
RoundResult local_controller_round(const CoverageProblem& problem,
                                   const std::vector<VehicleState>& states, double delta,
                                   const LocalController& controller);

}  // namespace covctl
