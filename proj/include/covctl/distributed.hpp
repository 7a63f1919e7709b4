#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "covctl/objective.hpp"

namespace covctl {

// W(p, R): Q clipped by a regular 64-gon circumscribing the disk of radius R
// about p and by the bisector half-planes of every viewed position within R.
// The polygon contains the true disk intersection, so W is a superset of
// the Voronoi cell.
ConvexPolygon candidate_cell(const ConvexPolygon& region, Point2 p, double radius,
                             std::span<const Point2> view);

// Agents j != self adjacent to `cell` across the bisector of (p, view[j]):
// some edge of positive length lies on that bisector.
std::vector<std::size_t> cell_neighbors(const ConvexPolygon& cell, Point2 p,
                                        std::span<const Point2> view,
                                        std::span<const std::size_t> ids);

struct SensedCell {
    double radius = 0.0;
    ConvexPolygon cell;
    std::vector<std::size_t> view;  // agents detected at the final radius
    std::vector<std::size_t> neighbors;
    std::size_t iterations = 0;
};

// Returns the ids and positions of agents within distance R of the caller.
using Detector = std::function<std::vector<std::pair<std::size_t, Point2>>(double radius)>;

// Grows R to 2 max_{q in W} |p - q| until W(p, R) certifies itself, then
// shrinks R to that bound and returns V = W. Throws NonTermination after
// 64 rounds.
SensedCell adjust_radius(const ConvexPolygon& region, std::size_t agent, Point2 p,
                         double initial_radius, const Detector& detect);

// adjust_radius with direct sensing of the true configuration.
SensedCell adjust_sensing_radius(const ConvexPolygon& region, std::size_t agent,
                                 const Configuration& truth, double initial_radius);

// w_j = 3 for active neighbors, 1 for inactive neighbors, 0 otherwise.
std::vector<int> weight_map(std::size_t n, std::span<const std::size_t> neighbors,
                            const std::vector<bool>& active);

struct WeightJump {
    std::size_t neighbor;
    int from;
    int to;
};

// Stored weights of one agent. A jump of two or more in any entry raises a
// recomputation request and refreshes the stored weights.
class Monitor {
public:
    Monitor() = default;
    explicit Monitor(std::vector<int> weights) : weights_(std::move(weights)) {}

    std::vector<WeightJump> update(const std::vector<int>& current);
    const std::vector<int>& weights() const { return weights_; }

private:
    std::vector<int> weights_;
};

struct MonitorEvent {
    double time;
    std::vector<WeightJump> jumps;
};

// Scripted world for exercising the monitor: positions and activity flags
// of every agent as functions of time.
struct MotionScript {
    std::function<Configuration(double t)> positions;
    std::function<std::vector<bool>(double t)> active;
};

// Runs the monitor of `agent` at t0, t0 + tick, ... up to t0 + dt,
// re-running the sensing-radius adjustment at every tick.
std::vector<MonitorEvent> monitoring_run(const ConvexPolygon& region, std::size_t agent,
                                         const MotionScript& script, double t0, double dt,
                                         double tick);

struct ScheduleOptions {
    // Consecutive wake times differ by a local-clock gap drawn uniformly in
    // (gap_min, gap_max).
    double gap_min = 0.05;
    double gap_max = 0.1;
    // Local time runs at rate times global time; empty means 1 for all.
    std::vector<double> clock_rates;
};

struct MessageOptions {
    double latency = 0.0;
    double jitter = 0.0;  // extra delay uniform in [0, jitter), per message
    // A response sampled from a moving agent and older than this on
    // arrival is stale and triggers a re-query.
    double staleness_budget = std::numeric_limits<double>::infinity();
    std::size_t max_requeries = 3;
};

// Which threads Coverage behavior I runs at a wake.
struct ThreadChoice {
    bool information = true;
    bool control = true;
};
using ThreadChooser = std::function<ThreadChoice(std::size_t agent, std::size_t wake)>;

struct BehaviorOptions {
    ScheduleOptions schedule;
    MessageOptions messages;
    double horizon = 50.0;  // global time
    double tol = 1e-3;      // stop once the centralized residual is below tol
    std::uint64_t seed = 1;

    // Coverage behavior I.
    double delta0 = 0.05;  // local duration of each control pair
    std::size_t fairness_bound = 4;
    // Default: seeded random choice, forcing a thread that would otherwise
    // starve. A supplied chooser is used as is and checked for fairness.
    ThreadChooser chooser;

    // Coverage behavior II.
    double motion_fraction = 0.9;   // dt_i = motion_fraction * gap_min
    double monitor_period = 0.01;   // global time between monitor ticks
};

enum class EventKind {
    Wake,
    RequestToReply,
    Response,
    RequestRecomputation,
    ReplyWindowClose,
    MonitorTick,
    MotionStop,
    StaleView,
};

std::string to_string(EventKind kind);

struct NetworkEvent {
    double time;
    EventKind kind;
    std::size_t agent;  // agent handling or raising the event
    std::size_t other;  // sender / peer, or agent for self events
};

// True configuration right after an event was processed.
struct NetworkRecord {
    double time;
    EventKind kind;
    std::size_t agent;
    Configuration positions;
    std::vector<bool> active;
};

struct NetworkTrace {
    std::vector<NetworkRecord> records;
    std::vector<NetworkEvent> log;  // every processed event plus stale views
    bool converged = false;
    double residual = 0.0;  // centralized, at the end
    std::size_t messages = 0;
    std::size_t stale_views = 0;
    std::size_t requeries = 0;
    std::size_t recomputations = 0;
    std::size_t motion_segments = 0;  // segments checked for properties (a)/(b)
};

// Scripted straight-line motion used to exercise message staleness: the
// agent moves with `velocity` from time 0 until `until`.
struct ScriptedMotion {
    Vec2 velocity;
    double until = 0.0;
};

struct CommunicationResult {
    SensedCell sensed;
    double finished_at = 0.0;
    std::size_t messages = 0;
    std::size_t stale_views = 0;
    std::size_t requeries = 0;
};

// Adjust communication radius run by one agent, starting at `start`, over
// request/response messages. Other agents follow `motions` (empty: static).
CommunicationResult adjust_communication_radius(const ConvexPolygon& region,
                                                const Configuration& positions,
                                                std::size_t agent, double initial_radius,
                                                const MessageOptions& messages,
                                                std::uint64_t seed = 1,
                                                const std::vector<ScriptedMotion>& motions = {},
                                                double start = 0.0);

// Gradient-style behavior: information thread (communication radius) and
// control thread (move with saturate(M (C - p)) for delta0) per wake.
// Throws FairnessViolation if a thread is not run within fairness_bound
// wakes.
NetworkTrace coverage_behavior_I(const CoverageProblem& problem, const Configuration& start,
                                 const BehaviorOptions& options);

// Sensing behavior: each wake moves toward the current centroid with
// saturate(C - p) for dt_i, recomputing on monitor warnings and whenever
// the heading stops pointing toward the current centroid. Every motion
// segment is checked for properties (a)/(b) (PropertyViolation).
NetworkTrace coverage_behavior_II(const CoverageProblem& problem, const Configuration& start,
                                  const BehaviorOptions& options);

}  // namespace covctl
