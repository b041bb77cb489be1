#pragma once

#include <chrono>
#include <vector>

#include "scplan/oracle.hpp"
#include "scplan/pareto.hpp"

namespace scplan {

struct SolverConfig {
    double delta_c = 0.0;    // cost-cap decrement; 0 = cheapest site cost
    double delta_eps = 0.0;  // harvest window width; 0 = twice the cheapest SCBS cost
    int lagrange_rounds = 5; // relax/repair/search repeats per cost cap
    TabuLimits tabu;         // shared tabu knobs (iterations, swaps, tenure, threads)
    int outer_iters = 20;    // BAN-level iterations of the two-level search
    int inner_iters = 40;    // SCBS-level iterations per outer round
    double alpha0 = 2.0;     // initial subgradient step scale
    int patience = 10;       // non-improving rounds before the scale halves
    bool warm_start = true;  // carry multipliers and deploy counters across caps
    double eps_min = 0.0;    // stop the sweep once the cap falls to this value
    std::uint64_t seed = 0;
};

inline void validate_config(const SolverConfig& c) {
    if (c.delta_c < 0.0 || c.delta_eps < 0.0)
        throw ValidationError("config: delta_c and delta_eps must be nonnegative");
    if (c.lagrange_rounds < 0 || c.outer_iters < 0 || c.inner_iters < 0 ||
        c.tabu.max_iters < 0 || c.tabu.swap_samples < 0 || c.tabu.diversify_opens < 0)
        throw ValidationError("config: iteration counts must be nonnegative");
    if (!(c.alpha0 > 0.0)) throw ValidationError("config: alpha0 must be positive");
    if (c.patience < 1) throw ValidationError("config: patience must be >= 1");
    if (c.tabu.threads < 1) throw ValidationError("config: threads must be >= 1");
}

inline double resolve_delta_c(const SolverConfig& c, const Problem& p) {
    if (c.delta_c > 0.0) return c.delta_c;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : p.instance.sc_sites) m = std::min(m, s.cost);
    for (const auto& s : p.instance.ban_sites) m = std::min(m, s.cost);
    return std::isfinite(m) && m > 0.0 ? m : 1.0;
}

inline double resolve_delta_eps(const SolverConfig& c, const Problem& p, double delta_c) {
    if (c.delta_eps > 0.0) return c.delta_eps;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : p.instance.sc_sites) m = std::min(m, s.cost);
    return std::isfinite(m) && m > 0.0 ? 2.0 * m : 2.0 * delta_c;
}

// One relax/repair/search round, recorded for bound auditing. Multipliers
// are the values in effect when the round's relaxed solve started.
struct IterationTrace {
    double eps = 0.0;
    int round = 0;
    double relaxed_value = 0.0;  // tabu value of the relaxed solve (heuristic)
    double lower_bound = 0.0;    // best bound tracked at this cap so far
    double upper_bound = 0.0;
    double subgradient_norm = 0.0;
    std::vector<double> lambda_fanout;
    std::vector<double> lambda_budget;
};

struct SolverReport {
    ParetoArchive frontier;
    std::vector<double> cost_caps;     // descending sweep of cost caps
    std::vector<double> lower_bounds;  // best bound per cap, heuristic unless
                                       // recomputed exactly
    bool bounds_heuristic = true;
    std::vector<IterationTrace> traces;
    SolverConfig config;
    double delta_c = 0.0;    // resolved values actually used
    double delta_eps = 0.0;
    double wall_seconds = 0.0;
};

// Next cost cap: just below the cheapest harvested solution, and always at
// least delta_c below the current cap. An empty harvest falls back to a
// plain decrement.
inline double update_epsilon(double eps, const ParetoArchive& harvested, double delta_c) {
    if (!(delta_c > 0.0)) throw std::invalid_argument("update_epsilon: delta_c must be positive");
    if (harvested.empty()) return eps - delta_c;
    return std::min(harvested.min_cost(), eps) - delta_c;
}

namespace detail {

inline double best_covered_f2(const ParetoArchive& archive, double cost_cap) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : archive.entries)
        if (e.objective.cost <= cost_cap)
            best = std::min(best, static_cast<double>(e.objective.uncovered));
    return best;
}

}  // namespace detail

// Full adaptive sweep: per cost cap, repeated Lagrangian solve + repair +
// two-level harvest with subgradient updates in between; the cap then drops
// adaptively until it reaches zero (or eps_min).
inline SolverReport solve(const Problem& p, const SolverConfig& config) {
    validate_config(config);
    const auto t_start = std::chrono::steady_clock::now();

    SolverReport report;
    report.config = config;
    report.delta_c = resolve_delta_c(config, p);
    report.delta_eps = resolve_delta_eps(config, p, report.delta_c);

    TabuLimits tabu = config.tabu;
    TwoLevelLimits two_level{config.outer_iters, config.inner_iters, tabu};

    // the all-closed deployment is always feasible and anchors the frontier
    Deployment empty = empty_deployment(p);
    report.frontier.insert(evaluate(empty, p), empty);

    LagrangeState lg = make_lagrange_state(p, config.alpha0, config.patience);
    std::vector<long long> warm_counts;
    std::uint64_t stream = 0;
    const double eps_floor = std::max(0.0, config.eps_min);
    double eps = p.total_cost();

    for (;;) {
        report.cost_caps.push_back(eps);
        if (!config.warm_start) {
            lg = make_lagrange_state(p, config.alpha0, config.patience);
            warm_counts.clear();
        }
        lg.best_lower_bound = -std::numeric_limits<double>::infinity();
        lg.best_upper_bound = detail::best_covered_f2(report.frontier, eps);
        lg.non_improving = 0;

        ParetoArchive eps_harvest;
        for (int round = 0; round < config.lagrange_rounds; ++round) {
            IterationTrace trace;
            trace.eps = eps;
            trace.round = round;
            trace.lambda_fanout = lg.lambda_fanout;
            trace.lambda_budget = lg.lambda_budget;

            auto relaxed = solve_relaxed(p, lg, eps, tabu, mix_seed(config.seed, stream++),
                                          config.warm_start ? &warm_counts : nullptr);
            if (config.warm_start) warm_counts = relaxed.deploy_counts;
            observe_lower_bound(lg, relaxed.best_value);
            trace.relaxed_value = relaxed.best_value;

            Deployment repaired = repair(relaxed.best, p, lg, eps);
            const auto repaired_obj = evaluate(repaired, p);
            observe_upper_bound(lg, static_cast<double>(repaired_obj.uncovered));
            report.frontier.insert(repaired_obj, repaired);

            auto harvest = two_level_search(repaired, p, eps, report.delta_eps, two_level,
                                            mix_seed(config.seed, stream++));
            for (const auto& e : harvest.entries)
                observe_upper_bound(lg, static_cast<double>(e.objective.uncovered));
            eps_harvest.merge(harvest);
            report.frontier.merge(harvest);

            // multipliers follow the costliest harvested solution
            const Deployment* update_src = &repaired;
            double max_cost = -1.0;
            for (const auto& e : harvest.entries)
                if (e.objective.cost > max_cost) {
                    max_cost = e.objective.cost;
                    update_src = &e.deployment;
                }
            trace.subgradient_norm = subgradient_update(lg, *update_src, p);
            trace.lower_bound = lg.best_lower_bound;
            trace.upper_bound = lg.best_upper_bound;
            report.traces.push_back(std::move(trace));
        }
        report.lower_bounds.push_back(lg.best_lower_bound);

        eps = update_epsilon(eps, eps_harvest, report.delta_c);
        if (!(eps > eps_floor)) break;
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

// Conventional comparator: one single-level tabu search per cost cap over
// the full move set, archiving only the best solution found at each cap.
inline SolverReport solve_single_tabu(const Problem& p, const SolverConfig& config) {
    validate_config(config);
    const auto t_start = std::chrono::steady_clock::now();

    SolverReport report;
    report.config = config;
    report.delta_c = resolve_delta_c(config, p);
    report.delta_eps = resolve_delta_eps(config, p, report.delta_c);
    report.bounds_heuristic = false;

    Deployment empty = empty_deployment(p);
    report.frontier.insert(evaluate(empty, p), empty);

    std::vector<long long> warm_counts;
    std::uint64_t stream = 0;
    const double eps_floor = std::max(0.0, config.eps_min);
    double eps = p.total_cost();
    for (;;) {
        report.cost_caps.push_back(eps);
        const FeasiblePolicy policy(p, eps);
        auto res = run_tabu(empty, policy, MoveScope::both, config.tabu,
                            mix_seed(config.seed, stream++),
                            config.warm_start ? &warm_counts : nullptr);
        if (config.warm_start) warm_counts = res.deploy_counts;
        const auto obj = evaluate(res.best, p);
        report.frontier.insert(obj, res.best);

        ParetoArchive found;
        found.insert(obj, res.best);
        eps = update_epsilon(eps, found, report.delta_c);
        if (!(eps > eps_floor)) break;
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

}  // namespace scplan
