#include <cmath>
#include <cstdio>
#include <exception>

#include "covctl/descent.hpp"
#include "covctl/dynamics.hpp"
#include "covctl/errors.hpp"
#include "covctl/scenario.hpp"

namespace covctl {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunSummary run_flow(const ScenarioConfig& cfg, const CoverageProblem& problem, const RecordSink& sink) {
    FlowOptions opt{cfg.k_prop, cfg.h, cfg.max_steps, cfg.tol};
    RunSummary s;
    const auto observer = [&](double t, const Configuration& p, const CellSnapshot& snap,
                              const CostBreakdown& cost, double residual) {
        ++s.records;
        if (!sink) return;
        const std::size_t zm = snap.zero_mass_cells();
        sink({t, p, {}, cost, residual, zm ? "zero-mass=" + std::to_string(zm) : ""});
    };
    const FlowTrace trace = continuous_lloyd_flow(problem, cfg.initial_positions(), opt, observer);
    s.converged = trace.converged;
    s.residual = trace.residuals.back();
    s.final_cost = trace.costs.back().total;
    s.steps = trace.states.size() - 1;
    s.final_positions = trace.states.back();
    if (!trace.zero_mass_events.empty())
        s.note = std::to_string(trace.zero_mass_events.size()) + " zero-mass holds";
    return s;
}

RunSummary run_map(const ScenarioConfig& cfg, const CoverageProblem& problem, const RecordSink& sink) {
    RunSummary s;
    const auto map = [&](const Configuration& p) { return lloyd_map(problem, p); };
    const auto observer = [&](double t, const Configuration& p, const CellSnapshot&,
                              const CostBreakdown& cost, double residual) {
        ++s.records;
        if (sink) sink({t, p, {}, cost, residual, ""});
    };
    const DescentReport r = descent_iterate(problem, map, cfg.initial_positions(), cfg.tol, cfg.max_steps, observer);
    s.converged = r.converged;
    s.residual = r.residual;
    s.final_cost = r.costs.back();
    s.steps = r.iterations;
    s.final_positions = r.final;
    return s;
}

// Residual reported for p-center runs is the largest step length.
RunSummary run_pcenter(const ScenarioConfig& cfg, const CoverageProblem& problem, const RecordSink& sink) {
    RunSummary s;
    Configuration p = cfg.initial_positions();
    double move = 0.0;
    for (std::size_t k = 0;; ++k) {
        const Configuration next = p_center_step(problem.region, p);
        move = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) move = std::max(move, distance(p[i], next[i]));
        ++s.records;
        if (sink)
            sink({static_cast<double>(k), p, {}, coverage_cost_voronoi(problem, p), move,
                  "pcenter=" + num(p_center_cost(problem.region, p))});
        if (move < cfg.tol) {
            s.converged = true;
            s.steps = k;
            break;
        }
        if (k >= cfg.max_steps) {
            s.steps = k;
            break;
        }
        p = next;
    }
    s.residual = move;
    s.final_cost = p_center_cost(problem.region, p);
    s.final_positions = p;
    s.note = "final cost is the p-center cost";
    return s;
}

RunSummary run_pd(const ScenarioConfig& cfg, const CoverageProblem& problem, const RecordSink& sink) {
    RunSummary s;
    std::vector<SecondOrder> start;
    for (const Point2& p : cfg.initial_positions()) start.push_back({p, {0.0, 0.0}});
    PdOptions opt{cfg.k_prop, cfg.k_deriv, cfg.h, cfg.max_steps, cfg.tol};
    const auto observer = [&](double t, const std::vector<SecondOrder>& states, const CellSnapshot&,
                              const EnergyRecord& e, double residual) {
        ++s.records;
        if (!sink) return;
        Configuration p;
        for (const auto& st : states) p.push_back(st.p);
        sink({t, p, {}, coverage_cost_voronoi(problem, p), residual, "E=" + num(e.E)});
    };
    const PdTrace trace = pd_closed_loop(problem, start, opt, observer);
    s.converged = trace.converged;
    s.residual = trace.residuals.back();
    s.final_cost = trace.energies.back().coverage;
    s.steps = trace.times.size() - 1;
    for (const auto& st : trace.final_states) s.final_positions.push_back(st.p);
    s.note = "final energy " + num(trace.energies.back().E);
    return s;
}

RunSummary run_rounds(const ScenarioConfig& cfg, const CoverageProblem& problem, const RecordSink& sink) {
    const bool unicycle = cfg.algorithm == Algorithm::Unicycle;
    std::vector<VehicleState> states;
    const Configuration start = cfg.initial_positions();
    const std::vector<double> headings = unicycle ? cfg.initial_headings() : std::vector<double>{};
    for (std::size_t i = 0; i < start.size(); ++i) {
        if (unicycle)
            states.push_back(Unicycle{headings[i], start[i].x, start[i].y, 1});
        else
            states.push_back(FirstOrder{start[i]});
    }
    const LocalController controller = unicycle ? unicycle_controller(problem.region, cfg.k_prop, cfg.h)
                                                : first_order_controller(problem.region, cfg.h);
    RunSummary s;
    Configuration p(states.size());
    for (std::size_t r = 0;; ++r) {
        std::vector<double> theta;
        for (std::size_t i = 0; i < states.size(); ++i) {
            p[i] = position(states[i]);
            if (unicycle) theta.push_back(std::get<Unicycle>(states[i]).theta);
        }
        const CellSnapshot snap = snapshot(problem, p);
        const double residual = centroid_residual(snap, p);
        const CostBreakdown cost = coverage_cost_voronoi(problem, p, snap);
        ++s.records;
        if (sink) sink({static_cast<double>(r) * cfg.delta, p, theta, cost, residual, "round"});
        s.residual = residual;
        s.final_cost = cost.total;
        s.steps = r;
        if (residual < cfg.tol) {
            s.converged = true;
            break;
        }
        if (r >= cfg.max_steps) break;
        states = local_controller_round(problem, states, cfg.delta, controller).states;
    }
    s.final_positions = p;
    return s;
}

RunSummary run_network(const ScenarioConfig& cfg, const CoverageProblem& problem, const RecordSink& sink) {
    const Configuration start = cfg.initial_positions();
    const NetworkTrace trace = cfg.algorithm == Algorithm::DistI
                                   ? coverage_behavior_I(problem, start, cfg.behavior())
                                   : coverage_behavior_II(problem, start, cfg.behavior());
    RunSummary s;
    s.records = trace.records.size();
    if (sink) {
        for (const NetworkRecord& r : trace.records) {
            const CellSnapshot snap = snapshot(problem, r.positions);
            sink({r.time, r.positions, {}, coverage_cost_voronoi(problem, r.positions, snap),
                  centroid_residual(snap, r.positions), to_string(r.kind) + " " + std::to_string(r.agent)});
        }
    }
    s.final_positions = trace.records.empty() ? start : trace.records.back().positions;
    s.converged = trace.converged;
    s.residual = trace.residual;
    s.final_cost = coverage_cost_voronoi(problem, s.final_positions).total;
    s.steps = trace.log.size();
    s.note = std::to_string(trace.messages) + " messages, " + std::to_string(trace.stale_views) +
             " stale views, " + std::to_string(trace.recomputations) + " recomputations";
    return s;
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& cfg, const RecordSink& sink) {
    try {
        const CoverageProblem problem = cfg.problem();
        switch (cfg.algorithm) {
            case Algorithm::LloydContinuous: return run_flow(cfg, problem, sink);
            case Algorithm::LloydMap: return run_map(cfg, problem, sink);
            case Algorithm::PCenter: return run_pcenter(cfg, problem, sink);
            case Algorithm::Pd: return run_pd(cfg, problem, sink);
            case Algorithm::Unicycle:
            case Algorithm::LocalRounds: return run_rounds(cfg, problem, sink);
            case Algorithm::DistI:
            case Algorithm::DistII: return run_network(cfg, problem, sink);
        }
    } catch (const CoverageError&) {
        const std::string name = cfg.name.empty() ? "unnamed" : cfg.name;
        std::throw_with_nested(CoverageError("scenario '" + name + "' (" + to_string(cfg.algorithm) + ") failed"));
    }
    return {};
}

}  // namespace covctl
