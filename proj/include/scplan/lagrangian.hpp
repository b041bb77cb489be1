#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "scplan/tabu.hpp"

namespace scplan {

// Multipliers and bound tracking for the relaxed problem. The fan-out
// multipliers price BAN service slots, the budget multipliers price SCBS
// coverage beyond the backhaul budget.
struct LagrangeState {
    std::vector<double> lambda_fanout;  // per BAN candidate
    std::vector<double> lambda_budget;  // per SCBS candidate
    double best_lower_bound = -std::numeric_limits<double>::infinity();
    double best_upper_bound = std::numeric_limits<double>::infinity();
    double step_scale = 2.0;
    int halving_patience = 10;
    int non_improving = 0;
};

inline LagrangeState make_lagrange_state(const Problem& p, double alpha0 = 2.0,
                                         int patience = 10) {
    LagrangeState lg;
    lg.lambda_fanout.assign(p.n_ban(), 0.0);
    lg.lambda_budget.assign(p.n_sc(), 0.0);
    lg.step_scale = alpha0;
    lg.halving_patience = patience;
    return lg;
}

// Multiplier-weighted open gain of one SCBS under the current solution:
// coverage reward minus the price of its backhaul link.
inline double sc_open_gain(const Deployment& d, const Problem& p, const LagrangeState& lg,
                           int sc) {
    long long cov = 0;
    for (int j : p.links.sc_subareas[sc])
        if (d.coverage[j] == slot_of_sc(sc)) ++cov;
    double gain = (1.0 - lg.lambda_budget[sc]) * static_cast<double>(cov);
    const int ban = d.sc_to_ban[sc];
    if (ban >= 0) {
        const BackhaulLink* link = p.links.find_link(sc, ban);
        const double budget = link ? static_cast<double>(link->max_subareas) : 0.0;
        gain -= lg.lambda_fanout[ban] - lg.lambda_budget[sc] * budget;
    }
    return gain;
}

inline double relaxed_value_unchecked(const Deployment& d, const Problem& p,
                                      const LagrangeState& lg) {
    double value = static_cast<double>(p.n_subareas());
    const int n_sc = p.n_sc();
    for (int cov : d.coverage) {
        if (cov < 0) continue;
        if (slot_is_sc(cov, n_sc))
            value -= 1.0 - lg.lambda_budget[cov];
        else
            value -= 1.0;
    }
    for (int i = 0; i < n_sc; ++i) {
        if (!d.open_sc[i]) continue;
        const int ban = d.sc_to_ban[i];
        if (ban < 0) continue;
        const BackhaulLink* link = p.links.find_link(i, ban);
        const double budget = link ? static_cast<double>(link->max_subareas) : 0.0;
        value += lg.lambda_fanout[ban] - lg.lambda_budget[i] * budget;
    }
    for (double l : lg.lambda_fanout) value -= l * static_cast<double>(p.instance.nb_max);
    return value;
}

// Constraints the relaxation keeps: coverage by open in-range sites, one BS
// per subarea (structural), every open SCBS served over an existing link by
// an open BAN, and the cost cap. Fan-out and budget limits are dualized.
inline void validate_relaxed(const Deployment& d, const Problem& p, double cost_cap) {
    const int n_sc = p.n_sc();
    if (static_cast<int>(d.open_sc.size()) != n_sc ||
        static_cast<int>(d.open_ban.size()) != p.n_ban() ||
        static_cast<long long>(d.coverage.size()) != p.n_subareas())
        throw std::invalid_argument("relaxed_value: deployment sized for a different instance");
    for (int i = 0; i < n_sc; ++i) {
        const int ban = d.sc_to_ban[i];
        if (d.open_sc[i] != (ban >= 0 ? 1 : 0))
            throw std::invalid_argument("relaxed_value: SCBS open flag and backhaul mismatch");
        if (ban >= 0) {
            if (!d.open_ban[ban])
                throw std::invalid_argument("relaxed_value: SCBS assigned to a closed BAN");
            if (!p.links.find_link(i, ban))
                throw std::invalid_argument("relaxed_value: SCBS assigned over a missing link");
        }
    }
    for (std::size_t j = 0; j < d.coverage.size(); ++j) {
        const int cov = d.coverage[j];
        if (cov < 0) continue;
        if (slot_is_sc(cov, n_sc)) {
            if (!d.open_sc[cov])
                throw std::invalid_argument("relaxed_value: coverage by a closed SCBS");
            if (site_distance(p.instance.sc_sites[cov], p.links.centers[j]) >
                p.links.sc_access_range_m[cov])
                throw std::invalid_argument("relaxed_value: coverage beyond the SCBS range");
        } else {
            const int k = cov - n_sc;
            if (!d.open_ban[k])
                throw std::invalid_argument("relaxed_value: coverage by a closed BAN");
            if (site_distance(p.instance.ban_sites[k], p.links.centers[j]) >
                p.links.ban_access_range_m[k])
                throw std::invalid_argument("relaxed_value: coverage beyond the BAN range");
        }
    }
    if (deployment_cost(d, p) > cost_cap)
        throw std::invalid_argument("relaxed_value: cost cap exceeded");
}

inline double relaxed_value(const Deployment& d, const Problem& p, const LagrangeState& lg,
                            double cost_cap = kNoCostCap) {
    validate_relaxed(d, p, cost_cap);
    return relaxed_value_unchecked(d, p, lg);
}

// Search policy for the relaxed space: each open SCBS takes the open linked
// BAN with the cheapest multiplier price (fan-out unlimited), coverage runs
// with budgets released.
class RelaxedPolicy final : public SearchPolicy {
public:
    RelaxedPolicy(const Problem& p, const LagrangeState& lg, double cap)
        : p_(&p), lg_(&lg), cap_(cap) {}

    bool rebuild(Deployment& d) const override {
        for (int i = 0; i < p_->n_sc(); ++i) {
            d.sc_to_ban[i] = -1;
            if (!d.open_sc[i]) continue;
            int chosen = -1;
            double best_price = 0.0;
            for (int li : p_->links.sc_links[i]) {
                const auto& link = p_->links.links[li];
                if (!d.open_ban[link.ban]) continue;
                const double price = lg_->lambda_fanout[link.ban] -
                                     lg_->lambda_budget[i] * static_cast<double>(link.max_subareas);
                if (chosen < 0 || price < best_price) {
                    chosen = link.ban;
                    best_price = price;
                }
            }
            if (chosen >= 0)
                d.sc_to_ban[i] = chosen;
            else
                d.open_sc[i] = 0;  // no reachable open BAN
        }
        assign_coverage(d, *p_, BudgetMode::relaxed);
        return true;
    }
    double value(const Deployment& d) const override {
        return relaxed_value_unchecked(d, *p_, *lg_);
    }
    void validate_initial(const Deployment& d) const override {
        validate_relaxed(d, *p_, cap_);
    }
    const Problem& problem() const override { return *p_; }
    double cost_cap() const override { return cap_; }

private:
    const Problem* p_;
    const LagrangeState* lg_;
    double cap_;
};

// Tabu solve of the relaxed problem from the empty deployment. The returned
// value upper-bounds the relaxed minimum; it equals the true lower bound of
// the capped problem only when the search happens to be exact.
inline TabuResult solve_relaxed(const Problem& p, const LagrangeState& lg, double cost_cap,
                                const TabuLimits& lim, std::uint64_t seed,
                                const std::vector<long long>* warm_counts = nullptr) {
    const RelaxedPolicy policy(p, lg, cost_cap);
    return run_tabu(empty_deployment(p), policy, MoveScope::both, lim, seed, warm_counts);
}

inline void observe_upper_bound(LagrangeState& lg, double ub_candidate) {
    lg.best_upper_bound = std::min(lg.best_upper_bound, ub_candidate);
    lg.best_lower_bound = std::min(lg.best_lower_bound, lg.best_upper_bound);
}

// Tracks the best (heuristic) lower bound; the step scale halves after
// `halving_patience` consecutive non-improving observations.
inline void observe_lower_bound(LagrangeState& lg, double lb_candidate) {
    const double capped = std::min(lb_candidate, lg.best_upper_bound);
    if (capped > lg.best_lower_bound + 1e-12) {
        lg.best_lower_bound = capped;
        lg.non_improving = 0;
    } else {
        lg.non_improving += 1;
        if (lg.non_improving >= lg.halving_patience) {
            lg.step_scale *= 0.5;
            lg.non_improving = 0;
        }
    }
}

// Projected subgradient step from the given solution's assignment and
// coverage. Step length: step_scale * (UB - LB) / ||g||^2. Returns ||g||.
inline double subgradient_update(LagrangeState& lg, const Deployment& d, const Problem& p) {
    const int n_sc = p.n_sc(), n_ban = p.n_ban();
    std::vector<double> g_fanout(n_ban, -static_cast<double>(p.instance.nb_max));
    std::vector<double> g_budget(n_sc, 0.0);
    std::vector<long long> cover_count(n_sc, 0);
    for (int cov : d.coverage)
        if (cov >= 0 && slot_is_sc(cov, n_sc)) ++cover_count[cov];
    for (int i = 0; i < n_sc; ++i) {
        const int ban = d.sc_to_ban[i];
        if (ban < 0) {
            g_budget[i] = 0.0;  // no x: both sums empty
            continue;
        }
        g_fanout[ban] += 1.0;
        const BackhaulLink* link = p.links.find_link(i, ban);
        const double budget = link ? static_cast<double>(link->max_subareas) : 0.0;
        g_budget[i] = static_cast<double>(cover_count[i]) - budget;
    }

    double norm2 = 0.0;
    for (double g : g_fanout) norm2 += g * g;
    for (double g : g_budget) norm2 += g * g;
    const double norm = std::sqrt(norm2);
    if (norm2 == 0.0) return norm;
    if (!std::isfinite(lg.best_upper_bound) || !std::isfinite(lg.best_lower_bound)) return norm;
    const double gap = std::max(0.0, lg.best_upper_bound - lg.best_lower_bound);
    const double step = lg.step_scale * gap / norm2;
    for (int k = 0; k < n_ban; ++k)
        lg.lambda_fanout[k] = std::max(0.0, lg.lambda_fanout[k] + step * g_fanout[k]);
    for (int i = 0; i < n_sc; ++i)
        lg.lambda_budget[i] = std::max(0.0, lg.lambda_budget[i] + step * g_budget[i]);
    return norm;
}

// Three-step modification of a relaxed solution into a fully feasible one:
// shed SCBSs the BAN fleet cannot serve (lowest open gain first) and
// reassign, trim over-budget coverage from the cell edge inward, then hand
// leftover subareas to the least-loaded in-range BS with slack.
inline Deployment repair(const Deployment& relaxed, const Problem& p, const LagrangeState& lg,
                         double cost_cap = kNoCostCap) {
    Deployment d = relaxed;
    const int n_sc = p.n_sc(), n_ban = p.n_ban();

    auto open_sc_count = [&] {
        int c = 0;
        for (int i = 0; i < n_sc; ++i) c += d.open_sc[i] ? 1 : 0;
        return c;
    };
    auto open_ban_count = [&] {
        int c = 0;
        for (int k = 0; k < n_ban; ++k) c += d.open_ban[k] ? 1 : 0;
        return c;
    };
    auto drop_sc = [&](int i) {
        d.open_sc[i] = 0;
        d.sc_to_ban[i] = -1;
        for (auto& cov : d.coverage)
            if (cov == slot_of_sc(i)) cov = -1;
    };

    // Step 1: total service slots must cover the open SCBSs
    while (p.instance.nb_max * open_ban_count() < open_sc_count()) {
        int victim = -1;
        double victim_gain = 0.0;
        for (int i = 0; i < n_sc; ++i) {
            if (!d.open_sc[i]) continue;
            const double gain = sc_open_gain(d, p, lg, i);
            if (victim < 0 || gain < victim_gain) {
                victim = i;
                victim_gain = gain;
            }
        }
        if (victim < 0) break;
        drop_sc(victim);
    }
    assign_backhaul(d, p);  // may close SCBSs with no reachable free slot
    for (auto& cov : d.coverage)
        if (cov >= 0 && slot_is_sc(cov, n_sc) && (!d.open_sc[cov] || d.sc_to_ban[cov] < 0))
            cov = -1;

    // Step 2: trim coverage beyond the backhaul budget, farthest first
    std::vector<long long> cover_count(n_sc, 0);
    for (int cov : d.coverage)
        if (cov >= 0 && slot_is_sc(cov, n_sc)) ++cover_count[cov];
    for (int i = 0; i < n_sc; ++i) {
        if (!d.open_sc[i]) continue;
        const long long budget = sc_budget(p, d, i, BudgetMode::enforced);
        if (cover_count[i] <= budget) continue;
        // sc_subareas is sorted nearest-first; walk from the far end
        const auto& near = p.links.sc_subareas[i];
        for (auto it = near.rbegin(); it != near.rend() && cover_count[i] > budget; ++it) {
            if (d.coverage[*it] == slot_of_sc(i)) {
                d.coverage[*it] = -1;
                --cover_count[i];
            }
        }
    }

    // Step 3: hand uncovered subareas to in-range BSs with remaining slack,
    // least loaded first (load = current covered count), ties by site id
    std::vector<long long> ban_count(n_ban, 0);
    for (int cov : d.coverage)
        if (cov >= 0 && !slot_is_sc(cov, n_sc)) ++ban_count[cov - n_sc];
    for (std::size_t j = 0; j < d.coverage.size(); ++j) {
        if (d.coverage[j] >= 0) continue;
        int best_slot = -1;
        long long best_load = 0;
        int best_id = 0;
        auto consider = [&](int slot, long long load, int id) {
            if (best_slot < 0 || load < best_load || (load == best_load && id < best_id)) {
                best_slot = slot;
                best_load = load;
                best_id = id;
            }
        };
        for (int k : p.links.subarea_bans[j])
            if (d.open_ban[k]) consider(slot_of_ban(k, n_sc), ban_count[k],
                                        p.instance.ban_sites[k].id);
        for (int i = 0; i < n_sc; ++i) {
            if (!d.open_sc[i] || d.sc_to_ban[i] < 0) continue;
            if (cover_count[i] >= sc_budget(p, d, i, BudgetMode::enforced)) continue;
            if (site_distance(p.instance.sc_sites[i], p.links.centers[j]) >
                p.links.sc_access_range_m[i])
                continue;
            consider(slot_of_sc(i), cover_count[i], p.instance.sc_sites[i].id);
        }
        if (best_slot < 0) continue;
        d.coverage[j] = best_slot;
        if (slot_is_sc(best_slot, n_sc))
            ++cover_count[best_slot];
        else
            ++ban_count[best_slot - n_sc];
    }
    (void)cost_cap;  // repair only closes sites; the cap cannot be newly violated
    return d;
}

}  // namespace scplan
