#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "scplan/model.hpp"

namespace scplan {

struct TabuLimits {
    int max_iters = 500;              // search iterations
    int stall_before_diversify = 25;  // iterations without improvement
    int diversify_opens = 2;          // sites opened by a diversification kick
    int swap_samples = 50;            // swap moves sampled per neighborhood
    int tenure = 0;                   // 0 = auto from the site count
    int threads = 1;                  // workers for candidate evaluation
};

inline int effective_tenure(const TabuLimits& lim, int n_slots) {
    return lim.tenure > 0 ? lim.tenure : 7 + (n_slots + 9) / 10;
}

enum class MoveScope { both, sc_only, ban_only };

// How a tentative (y, z) flip is completed into a scored solution. The
// relaxed and the fully-constrained searches plug in different assignment
// rules and objectives.
class SearchPolicy {
public:
    virtual ~SearchPolicy() = default;
    // Completes sc_to_ban and coverage for the tentative open flags; may
    // close SCBSs that cannot be served. Returns false if the flip is
    // structurally impossible.
    virtual bool rebuild(Deployment& d) const = 0;
    virtual double value(const Deployment& d) const = 0;
    // Throws if d is not a valid starting point for this search space.
    virtual void validate_initial(const Deployment& d) const = 0;
    virtual const Problem& problem() const = 0;
    virtual double cost_cap() const = 0;
};

// Search over the fully-constrained solution space; value is the uncovered
// subarea count.
class FeasiblePolicy final : public SearchPolicy {
public:
    FeasiblePolicy(const Problem& p, double cap) : p_(&p), cap_(cap) {}

    bool rebuild(Deployment& d) const override {
        assign_backhaul(d, *p_);
        assign_coverage(d, *p_, BudgetMode::enforced);
        return true;
    }
    double value(const Deployment& d) const override {
        long long covered = 0;
        for (int c : d.coverage)
            if (c >= 0) ++covered;
        return static_cast<double>(p_->n_subareas() - covered);
    }
    void validate_initial(const Deployment& d) const override {
        const auto rep = check_feasible(d, *p_, cap_);
        if (!rep.ok)
            throw std::invalid_argument("tabu: initial solution infeasible: " +
                                        rep.violations.front().describe());
    }
    const Problem& problem() const override { return *p_; }
    double cost_cap() const override { return cap_; }

private:
    const Problem* p_;
    double cap_;
};

struct Candidate {
    Deployment dep;
    ObjectiveVector obj;
    double value = 0.0;
    std::vector<int> flips;  // attribute slots recorded in the tabu list
    bool valid = false;
};

// Single-site opens and closes plus sampled same-kind swaps, each completed
// by the policy. Null moves (flips undone by the repair) are dropped.
inline std::vector<Candidate> neighborhood(const Deployment& cur, const SearchPolicy& policy,
                                           MoveScope scope, const TabuLimits& lim,
                                           std::mt19937_64& rng) {
    const Problem& p = policy.problem();
    const int n_sc = p.n_sc(), n_ban = p.n_ban();
    const double cur_cost = deployment_cost(cur, p);
    const double cap = policy.cost_cap();
    const bool sc_moves = scope != MoveScope::ban_only;
    const bool ban_moves = scope != MoveScope::sc_only;

    std::vector<Candidate> cands;
    auto stage = [&](int flip_a, int flip_b) {
        Candidate c;
        c.dep = cur;
        c.flips.push_back(flip_a);
        if (flip_b >= 0) c.flips.push_back(flip_b);
        for (int s : c.flips) {
            if (slot_is_sc(s, n_sc))
                c.dep.open_sc[s] ^= 1;
            else
                c.dep.open_ban[s - n_sc] ^= 1;
        }
        cands.push_back(std::move(c));
    };

    if (sc_moves)
        for (int i = 0; i < n_sc; ++i) {
            if (!cur.open_sc[i] && cur_cost + p.instance.sc_sites[i].cost <= cap)
                stage(slot_of_sc(i), -1);
            else if (cur.open_sc[i])
                stage(slot_of_sc(i), -1);
        }
    if (ban_moves)
        for (int k = 0; k < n_ban; ++k) {
            const int slot = slot_of_ban(k, n_sc);
            if (!cur.open_ban[k] && cur_cost + p.instance.ban_sites[k].cost <= cap)
                stage(slot, -1);
            else if (cur.open_ban[k])
                stage(slot, -1);
        }

    // same-kind swaps: close an open site, open a closed one
    std::vector<std::pair<int, int>> swaps;
    if (sc_moves)
        for (int a = 0; a < n_sc; ++a) {
            if (!cur.open_sc[a]) continue;
            for (int b = 0; b < n_sc; ++b)
                if (!cur.open_sc[b] && cur_cost - p.instance.sc_sites[a].cost +
                                               p.instance.sc_sites[b].cost <=
                                           cap)
                    swaps.emplace_back(slot_of_sc(a), slot_of_sc(b));
        }
    if (ban_moves)
        for (int a = 0; a < n_ban; ++a) {
            if (!cur.open_ban[a]) continue;
            for (int b = 0; b < n_ban; ++b)
                if (!cur.open_ban[b] && cur_cost - p.instance.ban_sites[a].cost +
                                                p.instance.ban_sites[b].cost <=
                                            cap)
                    swaps.emplace_back(slot_of_ban(a, n_sc), slot_of_ban(b, n_sc));
        }
    if (static_cast<int>(swaps.size()) > lim.swap_samples) {
        auto picks = sample_without_replacement(rng, static_cast<std::uint32_t>(swaps.size()),
                                                static_cast<std::uint32_t>(lim.swap_samples));
        std::sort(picks.begin(), picks.end());
        std::vector<std::pair<int, int>> kept;
        kept.reserve(picks.size());
        for (auto idx : picks) kept.push_back(swaps[idx]);
        swaps = std::move(kept);
    }
    for (const auto& [a, b] : swaps) stage(a, b);

    parallel_for(cands.size(), lim.threads, [&](std::size_t idx) {
        Candidate& c = cands[idx];
        if (!policy.rebuild(c.dep)) return;
        if (c.dep.open_sc == cur.open_sc && c.dep.open_ban == cur.open_ban) return;
        c.obj = evaluate(c.dep, p);
        c.value = policy.value(c.dep);
        c.valid = true;
    });
    std::erase_if(cands, [](const Candidate& c) { return !c.valid; });
    return cands;
}

// Attribute tabu list: a slot that just flipped may not flip again until its
// entry expires.
struct TabuList {
    std::vector<long long> until;

    explicit TabuList(int n_slots = 0) : until(n_slots, -1) {}
    bool is_tabu(const std::vector<int>& flips, long long iter) const {
        for (int s : flips)
            if (until[s] > iter) return true;
        return false;
    }
    void record(const std::vector<int>& flips, long long iter, int tenure) {
        for (int s : flips) until[s] = iter + tenure;
    }
};

struct TabuState {
    Deployment current;
    Deployment best;
    double best_value = 0.0;
    TabuList tabu;
    long long iteration = 0;
    std::vector<long long> deploy_counts;  // per slot, lifetime open transitions
    int stall = 0;
};

namespace detail {

inline void count_new_opens(const Deployment& before, const Deployment& after,
                            std::vector<long long>& counts) {
    const int n_sc = static_cast<int>(before.open_sc.size());
    for (int i = 0; i < n_sc; ++i)
        if (!before.open_sc[i] && after.open_sc[i]) ++counts[i];
    for (std::size_t k = 0; k < before.open_ban.size(); ++k)
        if (!before.open_ban[k] && after.open_ban[k]) ++counts[n_sc + static_cast<int>(k)];
}

// Diversification kick: open the `n_opens` rarely deployed closed sites that
// fit under the cost cap, then let the policy complete the solution.
inline std::optional<Candidate> diversify(const TabuState& st, const SearchPolicy& policy,
                                          int n_opens) {
    const Problem& p = policy.problem();
    const int n_sc = p.n_sc();
    const int n_slots = n_sc + p.n_ban();
    std::vector<int> order;
    for (int s = 0; s < n_slots; ++s) {
        const bool open = slot_is_sc(s, n_sc) ? st.current.open_sc[s] != 0
                                              : st.current.open_ban[s - n_sc] != 0;
        if (!open) order.push_back(s);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (st.deploy_counts[a] != st.deploy_counts[b])
            return st.deploy_counts[a] < st.deploy_counts[b];
        return a < b;
    });
    Candidate c;
    c.dep = st.current;
    double cost = deployment_cost(st.current, p);
    for (int s : order) {
        if (static_cast<int>(c.flips.size()) >= n_opens) break;
        if (cost + p.site_cost(s) > policy.cost_cap()) continue;
        cost += p.site_cost(s);
        if (slot_is_sc(s, n_sc))
            c.dep.open_sc[s] = 1;
        else
            c.dep.open_ban[s - n_sc] = 1;
        c.flips.push_back(s);
    }
    if (c.flips.empty()) return std::nullopt;
    if (!policy.rebuild(c.dep)) return std::nullopt;
    if (c.dep.open_sc == st.current.open_sc && c.dep.open_ban == st.current.open_ban)
        return std::nullopt;
    c.obj = evaluate(c.dep, p);
    c.value = policy.value(c.dep);
    c.valid = true;
    return c;
}

}  // namespace detail

// One tabu iteration: best candidate wins on aspiration, otherwise the best
// non-tabu candidate; stagnation or an all-tabu neighborhood triggers the
// diversification kick.
inline void tabu_step(TabuState& st, const SearchPolicy& policy, MoveScope scope,
                      const TabuLimits& lim, std::mt19937_64& rng) {
    const int tenure = effective_tenure(lim, static_cast<int>(st.deploy_counts.size()));
    auto cands = neighborhood(st.current, policy, scope, lim, rng);

    const Candidate* chosen = nullptr;
    if (!cands.empty()) {
        std::size_t best_idx = 0;
        for (std::size_t i = 1; i < cands.size(); ++i)
            if (cands[i].value < cands[best_idx].value) best_idx = i;
        if (cands[best_idx].value < st.best_value) {
            // aspiration: an overall improvement is taken even when tabu
            st.best = cands[best_idx].dep;
            st.best_value = cands[best_idx].value;
            st.stall = 0;
            chosen = &cands[best_idx];
        } else {
            st.stall += 1;
            const Candidate* nt = nullptr;
            for (const auto& c : cands)
                if (!st.tabu.is_tabu(c.flips, st.iteration) && (!nt || c.value < nt->value))
                    nt = &c;
            chosen = nt;
        }
    } else {
        st.stall += 1;
    }

    std::optional<Candidate> kick;
    if (chosen == nullptr || st.stall >= lim.stall_before_diversify) {
        kick = detail::diversify(st, policy, lim.diversify_opens);
        if (kick) {
            chosen = &*kick;
            st.stall = 0;
        }
    }
    if (chosen != nullptr) {
        if (chosen->value < st.best_value) {
            st.best = chosen->dep;
            st.best_value = chosen->value;
        }
        st.tabu.record(chosen->flips, st.iteration, tenure);
        detail::count_new_opens(st.current, chosen->dep, st.deploy_counts);
        st.current = chosen->dep;
    }
    st.iteration += 1;
}

struct TabuResult {
    Deployment best;
    double best_value = 0.0;
    std::vector<long long> deploy_counts;
};

// Runs the full tabu search from `initial`. `warm_counts`, when provided,
// seeds the rarely-deployed counters used by diversification.
inline TabuResult run_tabu(const Deployment& initial, const SearchPolicy& policy, MoveScope scope,
                           const TabuLimits& lim, std::uint64_t seed,
                           const std::vector<long long>* warm_counts = nullptr) {
    policy.validate_initial(initial);
    const Problem& p = policy.problem();
    TabuState st;
    st.current = initial;
    if (!policy.rebuild(st.current))
        throw std::invalid_argument("tabu: initial solution cannot be completed");
    st.best = st.current;
    st.best_value = policy.value(st.current);
    st.tabu = TabuList(p.n_sc() + p.n_ban());
    st.deploy_counts.assign(p.n_sc() + p.n_ban(), 0);
    if (warm_counts && warm_counts->size() == st.deploy_counts.size())
        st.deploy_counts = *warm_counts;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < lim.max_iters; ++t) tabu_step(st, policy, scope, lim, rng);
    return {std::move(st.best), st.best_value, std::move(st.deploy_counts)};
}

}  // namespace scplan
