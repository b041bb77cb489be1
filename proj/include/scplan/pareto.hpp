#pragma once

#include <algorithm>
#include <vector>

#include "scplan/lagrangian.hpp"

namespace scplan {

// Mutually nondominated (objective, deployment) entries kept in ascending
// cost order; along the order the uncovered counts strictly decrease.
struct ParetoArchive {
    struct Entry {
        ObjectiveVector objective;
        Deployment deployment;
    };
    std::vector<Entry> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }

    // Adds the point unless an incumbent dominates or equals it; evicts
    // every entry the new point dominates. Returns whether it was kept.
    bool insert(const ObjectiveVector& obj, const Deployment& dep) {
        for (const auto& e : entries)
            if (dominates(e.objective, obj) || e.objective == obj) return false;
        std::erase_if(entries, [&](const Entry& e) { return dominates(obj, e.objective); });
        auto pos = std::lower_bound(entries.begin(), entries.end(), obj,
                                    [](const Entry& e, const ObjectiveVector& o) {
                                        return e.objective.cost < o.cost;
                                    });
        entries.insert(pos, Entry{obj, dep});
        return true;
    }

    void merge(const ParetoArchive& other) {
        for (const auto& e : other.entries) insert(e.objective, e.deployment);
    }

    double min_cost() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& e : entries) m = std::min(m, e.objective.cost);
        return m;
    }
};

// Dominated area relative to a reference point (both objectives minimized);
// points outside the reference box contribute nothing.
inline double hypervolume(const ParetoArchive& archive, double ref_cost, double ref_uncovered) {
    double hv = 0.0;
    const auto& es = archive.entries;  // ascending cost, descending uncovered
    for (std::size_t i = 0; i < es.size(); ++i) {
        const double c = es[i].objective.cost;
        const double u = static_cast<double>(es[i].objective.uncovered);
        if (c >= ref_cost || u >= ref_uncovered) continue;
        const double next_c = i + 1 < es.size() ? std::min(es[i + 1].objective.cost, ref_cost)
                                                : ref_cost;
        hv += (next_c - c) * (ref_uncovered - u);
    }
    return hv;
}

struct TwoLevelLimits {
    int outer_iters = 20;  // BAN-level iterations
    int inner_iters = 40;  // SCBS-level iterations per outer round
    TabuLimits tabu;       // swap sampling, tenure, threads
};

namespace detail {

// Harvest the in-window candidates and pick the next pivot: the non-tabu
// in-window candidate with the best coverage, falling back to any non-tabu
// candidate, then to the overall best.
inline const Candidate* harvest_and_pick(const std::vector<Candidate>& cands,
                                         ParetoArchive& archive, double eps, double window_lo,
                                         const TabuList& tabu, long long iter) {
    for (const auto& c : cands)
        if (c.obj.cost >= window_lo && c.obj.cost <= eps) archive.insert(c.obj, c.dep);

    auto better = [](const Candidate& a, const Candidate& b) {
        if (a.obj.uncovered != b.obj.uncovered) return a.obj.uncovered < b.obj.uncovered;
        return a.obj.cost < b.obj.cost;
    };
    const Candidate* pick = nullptr;
    for (const auto& c : cands) {
        if (tabu.is_tabu(c.flips, iter)) continue;
        if (c.obj.cost < window_lo || c.obj.cost > eps) continue;
        if (!pick || better(c, *pick)) pick = &c;
    }
    if (!pick)
        for (const auto& c : cands) {
            if (tabu.is_tabu(c.flips, iter)) continue;
            if (!pick || better(c, *pick)) pick = &c;
        }
    if (!pick)
        for (const auto& c : cands)
            if (!pick || better(c, *pick)) pick = &c;
    return pick;
}

}  // namespace detail

// Two-level tabu search around a feasible start: the outer level flips BANs
// with the SCBS vector fixed, the inner level works the SCBSs with the BANs
// fixed, and every feasible candidate whose cost lands in
// [eps - delta_eps, eps] feeds the nondominated archive.
inline ParetoArchive two_level_search(const Deployment& start, const Problem& p, double eps,
                                      double delta_eps, const TwoLevelLimits& lim,
                                      std::uint64_t seed) {
    {
        const auto rep = check_feasible(start, p, eps);
        if (!rep.ok)
            throw std::invalid_argument("two_level_search: start infeasible: " +
                                        rep.violations.front().describe());
    }
    const double window_lo = eps - delta_eps;
    const FeasiblePolicy policy(p, eps);
    ParetoArchive archive;
    {
        const auto obj = evaluate(start, p);
        if (obj.cost >= window_lo && obj.cost <= eps) archive.insert(obj, start);
    }

    const int n_slots = p.n_sc() + p.n_ban();
    const int tenure = effective_tenure(lim.tabu, n_slots);
    TabuList ban_tabu(n_slots), sc_tabu(n_slots);
    std::mt19937_64 rng(seed);

    Deployment outer_pivot = start;
    long long outer_iter = 0, inner_iter = 0;
    for (int t1 = 0; t1 < lim.outer_iters; ++t1) {
        auto cands = neighborhood(outer_pivot, policy, MoveScope::ban_only, lim.tabu, rng);
        const Candidate* pick =
            detail::harvest_and_pick(cands, archive, eps, window_lo, ban_tabu, outer_iter);
        Deployment inner_pivot = outer_pivot;
        if (pick) {
            ban_tabu.record(pick->flips, outer_iter, tenure);
            inner_pivot = pick->dep;
        }
        ++outer_iter;

        for (int t2 = 0; t2 < lim.inner_iters; ++t2) {
            auto inner = neighborhood(inner_pivot, policy, MoveScope::sc_only, lim.tabu, rng);
            const Candidate* ipick =
                detail::harvest_and_pick(inner, archive, eps, window_lo, sc_tabu, inner_iter);
            if (ipick) {
                sc_tabu.record(ipick->flips, inner_iter, tenure);
                inner_pivot = ipick->dep;
            }
            ++inner_iter;
        }
        outer_pivot = inner_pivot;  // promote the inner result
    }
    return archive;
}

}  // namespace scplan
