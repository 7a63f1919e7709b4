#include "covctl/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <tuple>

#include "covctl/descent.hpp"
#include "covctl/dynamics.hpp"
#include "covctl/errors.hpp"
#include "covctl/tolerances.hpp"

namespace covctl {

ConvexPolygon candidate_cell(const ConvexPolygon& region, Point2 p, double radius,
                             std::span<const Point2> view) {
    ConvexPolygon w = intersect(
        region, ConvexPolygon::circumscribed_regular(p, radius, kTol.disk_polygon_sides));
    for (const Point2& q : view) {
        if (w.empty()) break;
        if (distance(p, q) > radius || q == p) continue;
        w = clip_halfplane(w, HalfPlane::bisector(p, q));
    }
    return w;
}

std::vector<std::size_t> cell_neighbors(const ConvexPolygon& cell, Point2 p,
                                        std::span<const Point2> view,
                                        std::span<const std::size_t> ids) {
    std::vector<std::size_t> out;
    if (cell.empty()) return out;
    for (std::size_t j = 0; j < view.size(); ++j) {
        if (view[j] == p) continue;
        const HalfPlane h = HalfPlane::bisector(p, view[j]);
        const double scale = norm(h.normal);
        const double slack = 1e-9 * (1.0 + distance(p, view[j]));
        for (std::size_t k = 0; k < cell.size(); ++k) {
            const Point2 a = cell[k], b = cell.next(k);
            if (distance(a, b) <= kTol.face_length) continue;
            if (std::abs(h.signed_value(a)) / scale <= slack &&
                std::abs(h.signed_value(b)) / scale <= slack) {
                out.push_back(ids[j]);
                break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct CellCheck {
    ConvexPolygon cell;
    double bound;
};

CellCheck check_radius(const ConvexPolygon& region, Point2 p, double radius,
                       const std::vector<std::pair<std::size_t, Point2>>& seen) {
    std::vector<Point2> pts;
    pts.reserve(seen.size());
    for (const auto& s : seen) pts.push_back(s.second);
    ConvexPolygon w = candidate_cell(region, p, radius, pts);
    const double bound = w.empty() ? 0.0 : 2.0 * w.max_distance_from(p);
    return {std::move(w), bound};
}

SensedCell finish(ConvexPolygon cell, Point2 p, double radius, std::size_t iterations,
                  const std::vector<std::pair<std::size_t, Point2>>& seen) {
    SensedCell out;
    out.radius = radius;
    out.iterations = iterations;
    std::vector<Point2> pts;
    std::vector<std::size_t> ids;
    for (const auto& [id, q] : seen) {
        if (distance(p, q) > radius) continue;
        ids.push_back(id);
        pts.push_back(q);
    }
    out.neighbors = cell_neighbors(cell, p, pts, ids);
    out.view = ids;
    out.cell = std::move(cell);
    return out;
}

double starting_radius(const ConvexPolygon& region, double r) {
    return r > 0.0 ? r : 1e-3 * region.diameter();
}

}  // namespace

SensedCell adjust_radius(const ConvexPolygon& region, std::size_t agent, Point2 p,
                         double initial_radius, const Detector& detect) {
    double radius = starting_radius(region, initial_radius);
    auto seen = detect(radius);
    CellCheck w = check_radius(region, p, radius, seen);
    std::size_t iterations = 0;
    while (radius < w.bound) {
        if (++iterations >= static_cast<std::size_t>(kTol.radius_max_iterations))
            throw NonTermination(agent);
        radius = w.bound;
        seen = detect(radius);
        w = check_radius(region, p, radius, seen);
    }
    return finish(std::move(w.cell), p, w.bound, iterations, seen);
}

SensedCell adjust_sensing_radius(const ConvexPolygon& region, std::size_t agent,
                                 const Configuration& truth, double initial_radius) {
    const Point2 p = truth.at(agent);
    const Detector detect = [&](double radius) {
        std::vector<std::pair<std::size_t, Point2>> out;
        for (std::size_t j = 0; j < truth.size(); ++j)
            if (j != agent && distance(truth[j], p) <= radius) out.emplace_back(j, truth[j]);
        return out;
    };
    return adjust_radius(region, agent, p, initial_radius, detect);
}

std::vector<int> weight_map(std::size_t n, std::span<const std::size_t> neighbors,
                            const std::vector<bool>& active) {
    std::vector<int> w(n, 0);
    for (std::size_t j : neighbors) w.at(j) = active.at(j) ? 3 : 1;
    return w;
}

std::vector<WeightJump> Monitor::update(const std::vector<int>& current) {
    std::vector<WeightJump> jumps;
    if (weights_.size() != current.size()) {
        weights_ = current;
        return jumps;
    }
    for (std::size_t j = 0; j < current.size(); ++j)
        if (current[j] >= weights_[j] + 2) jumps.push_back({j, weights_[j], current[j]});
    if (!jumps.empty()) weights_ = current;
    return jumps;
}

std::vector<MonitorEvent> monitoring_run(const ConvexPolygon& region, std::size_t agent,
                                         const MotionScript& script, double t0, double dt,
                                         double tick) {
    std::vector<MonitorEvent> events;
    SensedCell sensed = adjust_sensing_radius(region, agent, script.positions(t0), 0.0);
    const std::size_t n = script.positions(t0).size();
    Monitor monitor(weight_map(n, sensed.neighbors, script.active(t0)));
    for (std::size_t k = 1;; ++k) {
        const double t = t0 + static_cast<double>(k) * tick;
        if (t > t0 + dt * (1.0 + 1e-12)) break;
        sensed = adjust_sensing_radius(region, agent, script.positions(t), sensed.radius);
        auto jumps = monitor.update(weight_map(n, sensed.neighbors, script.active(t)));
        if (!jumps.empty()) events.push_back({t, std::move(jumps)});
    }
    return events;
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Wake: return "Wake";
        case EventKind::RequestToReply: return "RequestToReply";
        case EventKind::Response: return "Response";
        case EventKind::RequestRecomputation: return "RequestRecomputation";
        case EventKind::ReplyWindowClose: return "ReplyWindowClose";
        case EventKind::MonitorTick: return "MonitorTick";
        case EventKind::MotionStop: return "MotionStop";
        case EventKind::StaleView: return "StaleView";
    }
    return "?";
}

namespace {

// Straight-line motion from (t0, p0) with velocity v, frozen after t1.
struct Motion {
    double t0 = 0.0;
    Point2 p0;
    Vec2 v;
    double t1 = 0.0;

    Point2 at(double t) const { return p0 + (std::clamp(t, t0, std::max(t0, t1)) - t0) * v; }
    bool active(double t) const { return norm(v) > kTol.active_speed && t0 <= t && t < t1; }
};

struct Event {
    double time;
    int cls;  // 0 messages, 1 wakes, 2 timers
    std::size_t agent;
    std::uint64_t seq;
    EventKind kind;
    std::size_t from = 0;
    Point2 pos;
    double stamp = 0.0;
    bool moving = false;
    std::uint64_t round = 0;

    auto key() const { return std::tie(time, cls, agent, seq); }
};

Event make_event(double time, int cls, std::size_t agent, EventKind kind) {
    Event e{};
    e.time = time;
    e.cls = cls;
    e.agent = agent;
    e.kind = kind;
    return e;
}

struct Later {
    bool operator()(const Event& a, const Event& b) const { return a.key() > b.key(); }
};

// Request/response state of one agent's radius adjustment.
struct Query {
    bool running = false;
    std::uint64_t round = 0;
    Point2 origin;
    double sent = 0.0;
    double radius = 0.0;
    std::map<std::size_t, Point2> responses;
    bool stale = false;
    std::size_t requeries = 0;
    std::size_t iterations = 0;
};

struct Segment {
    double t0 = 0.0;
    Point2 start;
    std::optional<Point2> centroid;
    Vec2 u;
};

struct Agent {
    Motion motion;
    double rate = 1.0;
    std::mt19937_64 schedule;
    std::mt19937_64 choices;
    double local_wake = 0.0;
    std::size_t wakes = 0;

    double radius = 0.0;
    ConvexPolygon cell;
    Query query;
    std::optional<SensedCell> sensed_result;
    double finished_at = 0.0;

    std::size_t since_info = 0;
    std::size_t since_control = 0;

    bool moving = false;
    double stop_at = 0.0;
    Segment segment;
    Monitor monitor;
};

enum class Mode { Probe, Gradient, Sensing };

class Engine {
public:
    Engine(const CoverageProblem& problem, const Configuration& start, Mode mode,
           const BehaviorOptions& options)
        : problem_(problem), mode_(mode), opt_(options), agents_(start.size()),
          jitter_(options.seed) {
        std::seed_seq s2{options.seed, std::uint64_t{2}};
        jitter_.seed(s2);
        const auto& rates = options.schedule.clock_rates;
        if (!rates.empty() && rates.size() != start.size())
            throw ValidationError("clock_rates must have one entry per agent");
        for (std::size_t i = 0; i < start.size(); ++i) {
            Agent& a = agents_[i];
            a.motion = {0.0, start[i], {0.0, 0.0}, 0.0};
            a.rate = rates.empty() ? 1.0 : rates[i];
            if (!(a.rate > 0.0)) throw ValidationError("clock rates must be positive");
            std::seed_seq s1{options.seed, std::uint64_t{i}, std::uint64_t{1}};
            a.schedule.seed(s1);
            std::seed_seq s3{options.seed, std::uint64_t{i}, std::uint64_t{3}};
            a.choices.seed(s3);
        }
        if (mode != Mode::Probe) {
            const auto& s = options.schedule;
            if (!(s.gap_min > 0.0 && s.gap_max > s.gap_min))
                throw ValidationError("schedule gaps need 0 < gap_min < gap_max");
            // Everyone starts with the exact cells of the initial configuration.
            for (std::size_t i = 0; i < start.size(); ++i) {
                const SensedCell c = adjust_sensing_radius(problem.region, i, start, 0.0);
                agents_[i].radius = c.radius;
                agents_[i].cell = c.cell;
            }
            for (std::size_t i = 0; i < start.size(); ++i) schedule_wake(i);
        }
    }

    void set_scripted(std::size_t i, const ScriptedMotion& m) {
        agents_[i].motion.v = m.velocity;
        agents_[i].motion.t1 = m.until;
    }

    CommunicationResult probe(std::size_t agent, double radius, double start) {
        agents_.at(agent).radius = starting_radius(problem_.region, radius);
        now_ = start;
        start_query(agent, start, false);
        while (agents_[agent].query.running && !queue_.empty()) step();
        CommunicationResult r;
        r.sensed = *agents_[agent].sensed_result;
        r.finished_at = agents_[agent].finished_at;
        r.messages = trace_.messages;
        r.stale_views = trace_.stale_views;
        r.requeries = trace_.requeries;
        return r;
    }

    NetworkTrace run() {
        record(0.0, EventKind::Wake, 0);
        while (!queue_.empty() && !done_) {
            if (queue_.top().time > opt_.horizon) break;
            step();
        }
        const Configuration p = positions(std::min(now_, opt_.horizon));
        trace_.residual = centroid_residual(problem_, p);
        trace_.converged = trace_.converged || trace_.residual < opt_.tol;
        return std::move(trace_);
    }

private:
    Configuration positions(double t) const {
        Configuration p(agents_.size());
        for (std::size_t i = 0; i < agents_.size(); ++i) p[i] = agents_[i].motion.at(t);
        return p;
    }

    std::vector<bool> activity(double t) const {
        std::vector<bool> a(agents_.size());
        for (std::size_t i = 0; i < agents_.size(); ++i) a[i] = agents_[i].motion.active(t);
        return a;
    }

    void push(Event e) {
        e.seq = seq_++;
        queue_.push(e);
    }

    void schedule_wake(std::size_t i) {
        Agent& a = agents_[i];
        const auto& s = opt_.schedule;
        std::uniform_real_distribution<double> gap(s.gap_min, s.gap_max);
        double g = gap(a.schedule);
        while (g <= s.gap_min) g = gap(a.schedule);
        a.local_wake += g;
        push(make_event(a.local_wake / a.rate, 1, i, EventKind::Wake));
    }

    double delay() {
        const auto& m = opt_.messages;
        return m.latency + m.jitter * std::uniform_real_distribution<double>(0.0, 1.0)(jitter_);
    }

    void set_motion(std::size_t i, double t, Vec2 v, double until) {
        Motion& m = agents_[i].motion;
        m = {t, m.at(t), v, until};
    }

    void record(double t, EventKind kind, std::size_t agent) {
        if (mode_ == Mode::Probe) return;
        trace_.records.push_back({t, kind, agent, positions(t), activity(t)});
    }

    void log(double t, EventKind kind, std::size_t agent, std::size_t other) {
        trace_.log.push_back({t, kind, agent, other});
    }

    void step() {
        const Event e = queue_.top();
        queue_.pop();
        now_ = e.time;
        log(e.time, e.kind, e.agent, e.from);
        switch (e.kind) {
            case EventKind::Wake: on_wake(e); break;
            case EventKind::RequestToReply: on_request(e); break;
            case EventKind::Response: on_response(e); break;
            case EventKind::ReplyWindowClose: on_window_close(e); break;
            case EventKind::MonitorTick: on_monitor_tick(e); break;
            case EventKind::MotionStop: on_motion_stop(e); break;
            default: break;
        }
        if (mode_ == Mode::Sensing) run_monitors(e);
        record(e.time, e.kind, e.agent);
    }

    // Communication radius -------------------------------------------------

    void start_query(std::size_t i, double t, bool requery) {
        Agent& a = agents_[i];
        Query& q = a.query;
        if (!requery) {
            q.iterations = 0;
            q.requeries = 0;
        }
        q.running = true;
        ++q.round;
        q.origin = a.motion.at(t);
        q.sent = t;
        q.radius = a.radius;
        q.responses.clear();
        q.stale = false;
        for (std::size_t j = 0; j < agents_.size(); ++j) {
            if (j == i || distance(agents_[j].motion.at(t), q.origin) > q.radius) continue;
            Event e = make_event(t + delay(), 0, j, EventKind::RequestToReply);
            e.from = i;
            e.pos = q.origin;
            e.stamp = t;
            e.round = q.round;
            push(e);
            ++trace_.messages;
        }
        // Padded so that a reply sent at the last moment is not lost to rounding.
        const double window = 2.0 * (opt_.messages.latency + opt_.messages.jitter);
        const double close_at = window > 0.0 ? t + window * (1.0 + 1e-9) + 1e-12 * std::abs(t) : t;
        Event close = make_event(close_at, 2, i, EventKind::ReplyWindowClose);
        close.round = q.round;
        push(close);
    }

    void on_request(const Event& e) {
        // Reply within the disk that reaches the requester's stated position,
        // widened by how far a saturated requester can have moved since.
        const Point2 pj = agents_[e.agent].motion.at(e.time);
        const double reach = distance(e.pos, pj) + (e.time - e.stamp);
        if (distance(agents_[e.from].motion.at(e.time), pj) > reach * (1.0 + 1e-12) + 1e-15) return;
        Event r = make_event(e.time + delay(), 0, e.from, EventKind::Response);
        r.from = e.agent;
        r.pos = pj;
        r.stamp = e.time;
        r.moving = agents_[e.agent].motion.active(e.time);
        r.round = e.round;
        push(r);
        ++trace_.messages;
    }

    void on_response(const Event& e) {
        Query& q = agents_[e.agent].query;
        if (!q.running || e.round != q.round) return;
        q.responses[e.from] = e.pos;
        if (e.moving && e.time - e.stamp > opt_.messages.staleness_budget) {
            q.stale = true;
            ++trace_.stale_views;
            log(e.time, EventKind::StaleView, e.agent, e.from);
        }
    }

    void on_window_close(const Event& e) {
        Agent& a = agents_[e.agent];
        Query& q = a.query;
        if (!q.running || e.round != q.round) return;
        std::vector<std::pair<std::size_t, Point2>> seen(q.responses.begin(), q.responses.end());
        CellCheck w = check_radius(problem_.region, q.origin, q.radius, seen);
        if (q.stale && q.requeries < opt_.messages.max_requeries) {
            ++q.requeries;
            ++trace_.requeries;
            start_query(e.agent, e.time, true);
            return;
        }
        if (q.radius < w.bound) {
            if (++q.iterations >= static_cast<std::size_t>(kTol.radius_max_iterations))
                throw NonTermination(e.agent);
            // Everyone may have moved by the round's duration meanwhile.
            a.radius = w.bound + 2.0 * (e.time - q.sent);
            start_query(e.agent, e.time, true);
            return;
        }
        a.radius = w.bound;
        a.cell = w.cell;
        a.sensed_result = finish(std::move(w.cell), q.origin, w.bound, q.iterations, seen);
        a.finished_at = e.time;
        q.running = false;
    }

    // Wakes ----------------------------------------------------------------

    void on_wake(const Event& e) {
        const std::size_t i = e.agent;
        if (i == 0 && converged_now(e.time)) {
            trace_.converged = true;
            done_ = true;
            return;
        }
        if (mode_ == Mode::Gradient)
            gradient_wake(i, e.time);
        else
            sensing_wake(i, e.time);
        ++agents_[i].wakes;
        schedule_wake(i);
    }

    bool converged_now(double t) const {
        return centroid_residual(problem_, positions(t)) < opt_.tol;
    }

    ThreadChoice choose(std::size_t i) {
        Agent& a = agents_[i];
        if (opt_.chooser) return opt_.chooser(i, a.wakes);
        const auto r = std::uniform_int_distribution<int>(0, 2)(a.choices);
        ThreadChoice c{r != 1, r != 0};
        const std::size_t b = std::max<std::size_t>(opt_.fairness_bound, 1);
        if (a.since_info + 1 >= b) c.information = true;
        if (a.since_control + 1 >= b) c.control = true;
        return c;
    }

    void gradient_wake(std::size_t i, double t) {
        Agent& a = agents_[i];
        const ThreadChoice c = choose(i);
        a.since_info = c.information ? 0 : a.since_info + 1;
        a.since_control = c.control ? 0 : a.since_control + 1;
        if (a.since_info >= opt_.fairness_bound) throw FairnessViolation(i, "information");
        if (a.since_control >= opt_.fairness_bound) throw FairnessViolation(i, "control");
        if (c.information && !a.query.running) start_query(i, t, false);
        if (!c.control || a.cell.empty()) return;
        CellMoments m;
        try {
            m = region_moments(a.cell, problem_.density);
        } catch (const CoverageError&) {
            return;
        }
        const Point2 p = a.motion.at(t);
        const Vec2 u = saturate(m.mass * (m.centroid - p));
        const double until = t + opt_.delta0 / a.rate;
        set_motion(i, t, u, until);
        push(make_event(until, 2, i, EventKind::MotionStop));
    }

    // Sensing behavior -----------------------------------------------------

    std::optional<Point2> centroid_of(const ConvexPolygon& cell) const {
        if (cell.empty()) return std::nullopt;
        try {
            return region_moments(cell, problem_.density).centroid;
        } catch (const CoverageError&) {
            return std::nullopt;
        }
    }

    void start_segment(std::size_t i, double t, const SensedCell& sensed) {
        Agent& a = agents_[i];
        a.radius = sensed.radius;
        a.cell = sensed.cell;
        const Point2 p = a.motion.at(t);
        a.segment = {t, p, centroid_of(sensed.cell), {0.0, 0.0}};
        if (a.segment.centroid) a.segment.u = saturate(*a.segment.centroid - p);
        set_motion(i, t, a.segment.u, a.stop_at);
    }

    void finish_segment(std::size_t i, double t) {
        Agent& a = agents_[i];
        const Segment& s = a.segment;
        if (!s.centroid || !(t > s.t0)) return;
        const Point2 p = a.motion.at(t);
        const double d = distance(s.start, *s.centroid);
        const bool negligible = norm(s.u) * (t - s.t0) <= 1e-12 * (1.0 + d);
        check_lloyd_properties({s.start}, {p}, {s.centroid}, trace_.motion_segments, negligible);
        ++trace_.motion_segments;
    }

    void sensing_wake(std::size_t i, double t) {
        Agent& a = agents_[i];
        const Configuration truth = positions(t);
        const SensedCell sensed = adjust_sensing_radius(problem_.region, i, truth, a.radius);
        a.moving = true;
        a.stop_at = t + opt_.motion_fraction * opt_.schedule.gap_min / a.rate;
        start_segment(i, t, sensed);
        a.monitor = Monitor(weight_map(truth.size(), sensed.neighbors, activity(t)));
        push(make_event(a.stop_at, 2, i, EventKind::MotionStop));
        if (t + opt_.monitor_period < a.stop_at)
            push(make_event(t + opt_.monitor_period, 2, i, EventKind::MonitorTick));
    }

    void on_monitor_tick(const Event& e) {
        const Agent& a = agents_[e.agent];
        const double next = e.time + opt_.monitor_period;
        if (a.moving && next < a.stop_at) push(make_event(next, 2, e.agent, EventKind::MonitorTick));
    }

    void on_motion_stop(const Event& e) {
        Agent& a = agents_[e.agent];
        if (mode_ != Mode::Sensing || !a.moving || e.time != a.stop_at) return;
        finish_segment(e.agent, e.time);
        a.moving = false;
    }

    // Every moving agent re-senses after each processed event.
    void run_monitors(const Event& e) {
        const double t = e.time;
        const Configuration truth = positions(t);
        const std::vector<bool> active = activity(t);
        for (std::size_t m = 0; m < agents_.size(); ++m) {
            Agent& a = agents_[m];
            if (!a.moving || !(t < a.stop_at) || a.segment.t0 == t) continue;
            const SensedCell sensed = adjust_sensing_radius(problem_.region, m, truth, a.radius);
            a.radius = sensed.radius;
            const auto jumps = a.monitor.update(weight_map(truth.size(), sensed.neighbors, active));
            bool heading_lost = false;
            if (jumps.empty() && norm(a.segment.u) > 0.0) {
                const auto c = centroid_of(sensed.cell);
                heading_lost = c && dot(a.segment.u, *c - truth[m]) < 0.0;
            }
            if (jumps.empty() && !heading_lost) continue;
            log(t, EventKind::RequestRecomputation, m, jumps.empty() ? m : jumps.front().neighbor);
            ++trace_.recomputations;
            finish_segment(m, t);
            start_segment(m, t, sensed);
        }
    }

    const CoverageProblem& problem_;
    Mode mode_;
    BehaviorOptions opt_;
    std::vector<Agent> agents_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::mt19937_64 jitter_;
    double now_ = 0.0;
    bool done_ = false;
    NetworkTrace trace_;
};

}  // namespace

CommunicationResult adjust_communication_radius(const ConvexPolygon& region,
                                                const Configuration& positions,
                                                std::size_t agent, double initial_radius,
                                                const MessageOptions& messages,
                                                std::uint64_t seed,
                                                const std::vector<ScriptedMotion>& motions,
                                                double start) {
    const CoverageProblem problem{region, DensityField::uniform(),
                                  SensingPerformance::quadratic()};
    BehaviorOptions opt;
    opt.messages = messages;
    opt.seed = seed;
    Engine engine(problem, positions, Mode::Probe, opt);
    for (std::size_t i = 0; i < motions.size() && i < positions.size(); ++i)
        engine.set_scripted(i, motions[i]);
    return engine.probe(agent, initial_radius, start);
}

NetworkTrace coverage_behavior_I(const CoverageProblem& problem, const Configuration& start,
                                 const BehaviorOptions& options) {
    if (options.fairness_bound == 0) throw ValidationError("fairness bound must be positive");
    return Engine(problem, start, Mode::Gradient, options).run();
}

NetworkTrace coverage_behavior_II(const CoverageProblem& problem, const Configuration& start,
                                  const BehaviorOptions& options) {
    if (!(options.motion_fraction > 0.0 && options.motion_fraction < 1.0))
        throw ValidationError("motion fraction must lie in (0, 1)");
    return Engine(problem, start, Mode::Sensing, options).run();
}

}  // namespace covctl
