#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covctl/distributed.hpp"
#include "covctl/objective.hpp"

namespace covctl {

enum class Algorithm {
    LloydContinuous,
    LloydMap,
    PCenter,
    Pd,
    Unicycle,
    LocalRounds,
    DistI,
    DistII,
};

std::string to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(const std::string& s);

// f(d) = d^p; p = 2 is the quadratic case.
struct PerformanceSpec {
    double power = 2.0;

    SensingPerformance make() const;
};

struct ScenarioConfig {
    std::string name;
    ConvexPolygon region;
    std::size_t n = 0;
    // Explicit positions, or seeded uniform placement in the region.
    std::optional<Configuration> positions;
    double min_separation = 1e-3;  // for seeded placement
    std::vector<double> headings;  // unicycle only; empty: seeded
    std::uint64_t seed = 1;

    DensityField density;
    PerformanceSpec performance;

    Algorithm algorithm = Algorithm::LloydContinuous;
    double k_prop = 1.0;
    double k_deriv = 1.0;
    double delta0 = 0.05;  // behavior I control pair duration
    double delta = 0.5;    // local-controller round length
    double h = 0.05;
    std::size_t max_steps = 1000;  // steps, map iterations or rounds
    double tol = 1e-6;
    double horizon = 50.0;  // distributed runs, global time

    ScheduleOptions schedule;
    MessageOptions messages;
    std::size_t fairness_bound = 4;
    double monitor_period = 0.01;
    double motion_fraction = 0.9;

    CoverageProblem problem() const;
    // Explicit positions, or the seeded placement for `seed`.
    Configuration initial_positions() const;
    std::vector<double> initial_headings() const;
    BehaviorOptions behavior() const;
};

// Flat sections ([scenario], [region], [agents], [density], [performance],
// [algorithm], [network]) of `key = value` lines; '#' starts a comment;
// point lists are "x,y; x,y; ...". Throws ParseError (syntax, unknown or
// missing keys) and ValidationError (nonconvex region, positions outside
// the region, bad gains), both carrying the offending line.
ScenarioConfig parse_scenario(const std::string& text);

// Canonical text: every key, fixed order, 17 significant digits.
std::string to_text(const ScenarioConfig& cfg);

struct TrajectoryRow {
    double t = 0.0;
    std::size_t id = 0;
    double x = 0.0, y = 0.0;
    std::optional<double> theta;
    double hv = 0.0;
    std::optional<double> hv1, hv2;
    double residual = 0.0;
    std::string event;
};

// One snapshot of the whole team; one row per agent when written.
struct TrajectoryRecord {
    double t = 0.0;
    Configuration positions;
    std::vector<double> headings;  // unicycle only
    CostBreakdown cost;
    double residual = 0.0;
    std::string event;
};

struct RunSummary {
    bool converged = false;
    double residual = 0.0;
    double final_cost = 0.0;
    std::size_t records = 0;
    std::size_t steps = 0;
    Configuration final_positions;
    std::string note;  // algorithm-specific detail
};

using RecordSink = std::function<void(const TrajectoryRecord&)>;

// Dispatches to the configured algorithm and streams one record per step,
// iteration, round or network event. Module errors propagate with the
// scenario name prepended.
RunSummary run_scenario(const ScenarioConfig& cfg, const RecordSink& sink = {});

// CSV with header t,id,x,y,[theta,]HV,HV1,HV2,residual,event and numbers
// at 17 significant digits.
class TrajectoryWriter {
public:
    TrajectoryWriter(std::ostream& out, bool with_theta);
    void write(const TrajectoryRecord& r);
    void write_row(const TrajectoryRow& r);

private:
    std::ostream& out_;
    bool with_theta_;
};

std::vector<TrajectoryRow> read_trajectory(std::istream& in);

struct DescentCheck {
    bool ok = true;
    std::size_t checked = 0;  // consecutive snapshot pairs compared
    double worst_increase = 0.0;
    double at_time = 0.0;
    std::string column;  // "HV" or "E"
};

// Checks that the per-snapshot HV column (or E, for rows annotated
// E=...) never rises by more than tol (1 + |value|).
DescentCheck check_descent(const std::vector<TrajectoryRow>& rows, double tol = 1e-6);

struct SvgOptions {
    bool shade_density = true;
    int grid = 50;
    std::vector<std::vector<Point2>> trails;
    std::string title;
};

std::string emit_svg(const ConvexPolygon& region, const VoronoiDiagram& diagram,
                     const Configuration& positions, const DensityField& phi,
                     const SvgOptions& options = {});

}  // namespace covctl
