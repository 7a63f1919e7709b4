#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "covctl/errors.hpp"
#include "covctl/scenario.hpp"

using namespace covctl;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_error(const std::exception& e, int depth = 0) {
    std::cerr << (depth ? "  caused by: " : "error: ") << e.what() << "\n";
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        print_error(inner, depth + 1);
    }
}

struct RunArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t svg_every = 0;
    bool summary = false;
};

int cmd_run(const RunArgs& a) {
    ScenarioConfig cfg = parse_scenario(read_file(a.scenario));
    if (a.seed) cfg.seed = *a.seed;

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw std::runtime_error("cannot write " + a.out);
    }
    std::ostream& out = a.out.empty() ? std::cout : file;
    TrajectoryWriter writer(out, cfg.algorithm == Algorithm::Unicycle);

    const std::filesystem::path stem =
        a.out.empty() ? std::filesystem::path(a.scenario).stem() : std::filesystem::path(a.out).replace_extension();
    const CoverageProblem problem = cfg.problem();
    std::vector<std::vector<Point2>> trails(cfg.n);
    std::size_t count = 0;
    const auto frame = [&](const Configuration& p, const std::string& tag) {
        SvgOptions opt;
        opt.trails = trails;
        opt.title = (cfg.name.empty() ? a.scenario : cfg.name) + " " + tag;
        std::ofstream svg(stem.string() + "." + tag + ".svg");
        svg << emit_svg(problem.region, voronoi_diagram(problem.region, p), p, problem.density, opt);
    };
    const RunSummary s = run_scenario(cfg, [&](const TrajectoryRecord& r) {
        writer.write(r);
        if (a.svg_every == 0) return;
        for (std::size_t i = 0; i < r.positions.size() && i < trails.size(); ++i) trails[i].push_back(r.positions[i]);
        if (count % a.svg_every == 0) {
            char tag[32];
            std::snprintf(tag, sizeof tag, "%06zu", count);
            frame(r.positions, tag);
        }
        ++count;
    });
    if (a.svg_every) frame(s.final_positions, "final");

    if (a.summary) {
        std::fprintf(stderr, "scenario   %s\nalgorithm  %s\nconverged  %s\nresidual   %.6e\nfinal H    %.17g\nsteps      %zu\nrecords    %zu\n",
                     cfg.name.c_str(), to_string(cfg.algorithm).c_str(), s.converged ? "yes" : "no", s.residual,
                     s.final_cost, s.steps, s.records);
        if (!s.note.empty()) std::fprintf(stderr, "note       %s\n", s.note.c_str());
    }
    return s.converged ? 0 : 2;
}

int cmd_validate(const std::string& path) {
    const ScenarioConfig cfg = parse_scenario(read_file(path));
    std::cout << path << ": ok (" << cfg.n << " agents, " << to_string(cfg.algorithm) << ", density "
              << cfg.density.name() << ")\n";
    return 0;
}

int cmd_replay(const std::string& path, bool check) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    const auto rows = read_trajectory(in);
    std::size_t snapshots = 0;
    for (const auto& r : rows) snapshots += r.id == 0;
    std::cout << path << ": " << rows.size() << " rows, " << snapshots << " snapshots\n";
    if (!check) return 0;
    const DescentCheck c = check_descent(rows);
    if (c.ok) {
        std::cout << "descent ok: " << c.column << " non-increasing over " << c.checked << " steps\n";
        return 0;
    }
    std::printf("descent violated: %s rose by %.3e at t=%.17g\n", c.column.c_str(), c.worst_increase, c.at_time);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coverage control simulator"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its trajectory as CSV");
    run_cmd->add_option("scenario", run.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
    run_cmd->add_option("--out", run.out, "Trajectory output (default: stdout)");
    run_cmd->add_option("--svg-every", run.svg_every, "Write an SVG frame every K records");
    run_cmd->add_flag("--summary", run.summary, "Print a run summary to stderr");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario");
    validate_cmd->add_option("scenario", validate_path, "Scenario file")->required();

    std::string replay_path;
    bool check = false;
    auto* replay_cmd = app.add_subcommand("replay", "Read back a trajectory file");
    replay_cmd->add_option("trajectory", replay_path, "Trajectory CSV")->required()->check(CLI::ExistingFile);
    replay_cmd->add_flag("--check-descent", check, "Require the cost (or energy) column to be non-increasing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*validate_cmd) return cmd_validate(validate_path);
        if (*replay_cmd) return cmd_replay(replay_path, check);
    } catch (const std::exception& e) {
        print_error(e);
        return 1;
    }
    return 1;
}
