#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "scplan/backhaul.hpp"

namespace scplan {

// A base station "slot" indexes SCBS candidates first, BAN candidates after.
inline int slot_of_sc(int sc) { return sc; }
inline int slot_of_ban(int ban, int n_sc) { return n_sc + ban; }
inline bool slot_is_sc(int slot, int n_sc) { return slot >= 0 && slot < n_sc; }

struct Deployment {
    std::vector<std::uint8_t> open_sc;   // y
    std::vector<std::uint8_t> open_ban;  // z
    std::vector<int> sc_to_ban;          // per SCBS: serving BAN index, -1 if none
    std::vector<int> coverage;           // per subarea: covering slot, -1 if uncovered

    bool operator==(const Deployment& other) const = default;
};

struct ObjectiveVector {
    double cost = 0.0;
    long long uncovered = 0;

    bool operator==(const ObjectiveVector& other) const = default;
};

// a dominates b: no worse in both objectives, strictly better in one.
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    return a.cost <= b.cost && a.uncovered <= b.uncovered &&
           (a.cost < b.cost || a.uncovered < b.uncovered);
}

// Instance plus its precomputed link table; built once, shared read-only.
struct Problem {
    Instance instance;
    LinkTable links;

    int n_sc() const { return static_cast<int>(instance.sc_sites.size()); }
    int n_ban() const { return static_cast<int>(instance.ban_sites.size()); }
    long long n_subareas() const { return static_cast<long long>(links.centers.size()); }
    double site_cost(int slot) const {
        return slot < n_sc() ? instance.sc_sites[slot].cost
                             : instance.ban_sites[slot - n_sc()].cost;
    }
    double total_cost() const {
        double c = 0.0;
        for (const auto& s : instance.sc_sites) c += s.cost;
        for (const auto& s : instance.ban_sites) c += s.cost;
        return c;
    }
};

inline Problem build_problem(Instance inst) {
    validate_instance(inst);
    Problem p;
    p.links = build_links(inst);
    p.instance = std::move(inst);
    return p;
}

inline Deployment empty_deployment(const Problem& p) {
    Deployment d;
    d.open_sc.assign(p.n_sc(), 0);
    d.open_ban.assign(p.n_ban(), 0);
    d.sc_to_ban.assign(p.n_sc(), -1);
    d.coverage.assign(static_cast<std::size_t>(p.n_subareas()), -1);
    return d;
}

inline double deployment_cost(const Deployment& d, const Problem& p) {
    double c = 0.0;
    for (int i = 0; i < p.n_sc(); ++i)
        if (d.open_sc[i]) c += p.instance.sc_sites[i].cost;
    for (int k = 0; k < p.n_ban(); ++k)
        if (d.open_ban[k]) c += p.instance.ban_sites[k].cost;
    return c;
}

inline ObjectiveVector evaluate(const Deployment& d, const Problem& p) {
    if (static_cast<int>(d.open_sc.size()) != p.n_sc() ||
        static_cast<int>(d.open_ban.size()) != p.n_ban() ||
        static_cast<long long>(d.coverage.size()) != p.n_subareas())
        throw std::invalid_argument("evaluate: deployment sized for a different instance");
    ObjectiveVector v;
    v.cost = deployment_cost(d, p);
    long long covered = 0;
    for (int c : d.coverage)
        if (c >= 0) ++covered;
    v.uncovered = p.n_subareas() - covered;
    return v;
}

// Per-SCBS coverage budget: the serving link's max_subareas, or unlimited
// when budgets are relaxed.
enum class BudgetMode { enforced, relaxed };

inline long long sc_budget(const Problem& p, const Deployment& d, int sc, BudgetMode mode) {
    if (mode == BudgetMode::relaxed) return p.n_subareas();
    const int ban = d.sc_to_ban[sc];
    if (ban < 0) return 0;
    const BackhaulLink* link = p.links.find_link(sc, ban);
    return link ? std::min(link->max_subareas, p.n_subareas()) : 0;
}

// Greedy maximal coverage for fixed open sites and backhaul assignment.
// BANs claim every in-range subarea first (nearest BAN wins, ties by index);
// SCBSs then claim uncovered in-range subareas nearest-first up to their
// budget, processed in order of descending residual uncovered count
// (ties by index). Deterministic.
inline void assign_coverage(Deployment& d, const Problem& p,
                            BudgetMode mode = BudgetMode::enforced) {
    std::fill(d.coverage.begin(), d.coverage.end(), -1);
    const int n_sc = p.n_sc();
    for (std::size_t j = 0; j < d.coverage.size(); ++j) {
        for (int ban : p.links.subarea_bans[j]) {
            if (d.open_ban[ban]) {
                d.coverage[j] = slot_of_ban(ban, n_sc);
                break;
            }
        }
    }

    std::vector<int> pending;
    for (int i = 0; i < n_sc; ++i)
        if (d.open_sc[i] && d.sc_to_ban[i] >= 0) pending.push_back(i);

    while (!pending.empty()) {
        int best = -1, best_residual = 0;
        std::size_t best_pos = 0;
        for (std::size_t pos = 0; pos < pending.size(); ++pos) {
            const int i = pending[pos];
            int residual = 0;
            for (int j : p.links.sc_subareas[i])
                if (d.coverage[j] < 0) ++residual;
            if (residual > best_residual) {
                best = i;
                best_residual = residual;
                best_pos = pos;
            }
        }
        if (best < 0) break;  // nothing left to claim
        long long budget = sc_budget(p, d, best, mode);
        for (int j : p.links.sc_subareas[best]) {
            if (budget <= 0) break;
            if (d.coverage[j] < 0) {
                d.coverage[j] = slot_of_sc(best);
                --budget;
            }
        }
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }
}

// Greedy SCBS->BAN assignment honoring the per-BAN fan-out limit. SCBSs are
// processed most-constrained-first (fewest open BANs with free slots, ties by
// index) and each takes the free-slot BAN with the largest coverage budget
// (ties by index). SCBSs that cannot be served are closed.
inline void assign_backhaul(Deployment& d, const Problem& p) {
    const int n_ban = p.n_ban();
    std::vector<int> slots(n_ban, 0);
    for (int k = 0; k < n_ban; ++k) slots[k] = d.open_ban[k] ? p.instance.nb_max : 0;
    std::fill(d.sc_to_ban.begin(), d.sc_to_ban.end(), -1);

    std::vector<int> pending;
    for (int i = 0; i < p.n_sc(); ++i)
        if (d.open_sc[i]) pending.push_back(i);

    while (!pending.empty()) {
        // most constrained SCBS first, recomputed as slots fill up
        int best = -1, best_options = std::numeric_limits<int>::max();
        std::size_t best_pos = 0;
        for (std::size_t pos = 0; pos < pending.size(); ++pos) {
            const int i = pending[pos];
            int options = 0;
            for (int li : p.links.sc_links[i]) {
                const int k = p.links.links[li].ban;
                if (d.open_ban[k] && slots[k] > 0) ++options;
            }
            if (options < best_options) {
                best = i;
                best_options = options;
                best_pos = pos;
            }
        }
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_pos));
        int chosen = -1;
        long long chosen_budget = -1;
        for (int li : p.links.sc_links[best]) {
            const auto& link = p.links.links[li];
            if (!d.open_ban[link.ban] || slots[link.ban] <= 0) continue;
            if (link.max_subareas > chosen_budget) {
                chosen = link.ban;
                chosen_budget = link.max_subareas;
            }
        }
        if (chosen >= 0) {
            d.sc_to_ban[best] = chosen;
            --slots[chosen];
        } else {
            d.open_sc[best] = 0;  // unservable SCBS cannot stay deployed
        }
    }
}

// --- feasibility -----------------------------------------------------------

// Role-named constraint identifiers reported by the checker.
enum class ConstraintId {
    coverage_by_closed_sc,    // subarea assigned to an undeployed SCBS
    coverage_by_closed_ban,   // subarea assigned to an undeployed BAN
    backhaul_to_closed_ban,   // SCBS assigned to an undeployed BAN
    subarea_double_cover,     // subarea covered by more than one BS
    ban_fanout_exceeded,      // BAN serving more SCBSs than allowed
    sc_without_backhaul,      // deployed SCBS with no serving BAN (or vice versa)
    backhaul_blocking,        // blocking probability above the allowed maximum
    coverage_budget_exceeded, // SCBS covering more subareas than its link budget
    access_distance,          // covered subarea beyond the coverage threshold
    cost_cap_exceeded         // total cost above the active cap
};

inline const char* constraint_name(ConstraintId c) {
    switch (c) {
        case ConstraintId::coverage_by_closed_sc: return "coverage_by_closed_sc";
        case ConstraintId::coverage_by_closed_ban: return "coverage_by_closed_ban";
        case ConstraintId::backhaul_to_closed_ban: return "backhaul_to_closed_ban";
        case ConstraintId::subarea_double_cover: return "subarea_double_cover";
        case ConstraintId::ban_fanout_exceeded: return "ban_fanout_exceeded";
        case ConstraintId::sc_without_backhaul: return "sc_without_backhaul";
        case ConstraintId::backhaul_blocking: return "backhaul_blocking";
        case ConstraintId::coverage_budget_exceeded: return "coverage_budget_exceeded";
        case ConstraintId::access_distance: return "access_distance";
        case ConstraintId::cost_cap_exceeded: return "cost_cap_exceeded";
    }
    return "?";
}

struct Violation {
    ConstraintId constraint;
    int site = -1;     // offending site index (SC or BAN, per constraint)
    int other = -1;    // second site where relevant
    int subarea = -1;  // offending subarea where relevant

    std::string describe() const {
        std::string s = constraint_name(constraint);
        if (site >= 0) s += " site=" + std::to_string(site);
        if (other >= 0) s += " other=" + std::to_string(other);
        if (subarea >= 0) s += " subarea=" + std::to_string(subarea);
        return s;
    }
};

struct FeasibilityReport {
    bool ok = true;
    std::vector<Violation> violations;

    bool has(ConstraintId c) const {
        for (const auto& v : violations)
            if (v.constraint == c) return true;
        return false;
    }
};

inline constexpr double kNoCostCap = std::numeric_limits<double>::infinity();

// Checks every model constraint on an explicit cover list (slot, subarea).
// The list form admits double coverage, which the Deployment vector cannot
// represent; check_feasible() funnels through here.
inline FeasibilityReport check_cover_list(const std::vector<std::uint8_t>& open_sc,
                                          const std::vector<std::uint8_t>& open_ban,
                                          const std::vector<int>& sc_to_ban,
                                          const std::vector<std::pair<int, int>>& covers,
                                          const Problem& p, double cost_cap = kNoCostCap) {
    FeasibilityReport rep;
    auto flag = [&](Violation v) {
        rep.ok = false;
        rep.violations.push_back(v);
    };
    const int n_sc = p.n_sc();
    const int n_ban = p.n_ban();
    if (static_cast<int>(open_sc.size()) != n_sc || static_cast<int>(open_ban.size()) != n_ban ||
        static_cast<int>(sc_to_ban.size()) != n_sc)
        throw std::invalid_argument("check_feasible: deployment sized for a different instance");

    // backhaul assignment structure
    std::vector<int> fanout(n_ban, 0);
    for (int i = 0; i < n_sc; ++i) {
        const int ban = sc_to_ban[i];
        if (open_sc[i] && ban < 0) flag({ConstraintId::sc_without_backhaul, i});
        if (ban >= 0) {
            if (!open_sc[i]) flag({ConstraintId::sc_without_backhaul, i, ban});
            if (ban >= n_ban) throw std::invalid_argument("check_feasible: BAN index out of range");
            if (!open_ban[ban]) flag({ConstraintId::backhaul_to_closed_ban, i, ban});
            ++fanout[ban];
        }
    }
    for (int k = 0; k < n_ban; ++k)
        if (fanout[k] > p.instance.nb_max) flag({ConstraintId::ban_fanout_exceeded, k});

    // coverage: openness, distance thresholds, single cover
    std::vector<int> covered_by(static_cast<std::size_t>(p.n_subareas()), -1);
    std::vector<long long> sc_cover_count(n_sc, 0);
    for (const auto& [slot, j] : covers) {
        if (j < 0 || j >= p.n_subareas())
            throw std::invalid_argument("check_feasible: subarea index out of range");
        if (covered_by[j] >= 0) flag({ConstraintId::subarea_double_cover, slot, covered_by[j], j});
        covered_by[j] = slot;
        if (slot_is_sc(slot, n_sc)) {
            const int i = slot;
            if (!open_sc[i]) flag({ConstraintId::coverage_by_closed_sc, i, -1, j});
            ++sc_cover_count[i];
            if (site_distance(p.instance.sc_sites[i], p.links.centers[j]) >
                p.links.sc_access_range_m[i])
                flag({ConstraintId::access_distance, i, -1, j});
        } else {
            const int k = slot - n_sc;
            if (k < 0 || k >= n_ban)
                throw std::invalid_argument("check_feasible: covering slot out of range");
            if (!open_ban[k]) flag({ConstraintId::coverage_by_closed_ban, k, -1, j});
            if (site_distance(p.instance.ban_sites[k], p.links.centers[j]) >
                p.links.ban_access_range_m[k])
                flag({ConstraintId::access_distance, slot, -1, j});
        }
    }

    // backhaul capacity: budget via the link table, blocking recomputed
    // directly from the link capacity
    for (int i = 0; i < n_sc; ++i) {
        const int ban = sc_to_ban[i];
        const BackhaulLink* link = ban >= 0 && ban < n_ban ? p.links.find_link(i, ban) : nullptr;
        if (ban >= 0 && !link) {
            flag({ConstraintId::backhaul_blocking, i, ban});
            continue;
        }
        if (sc_cover_count[i] == 0 || !link) continue;
        if (sc_cover_count[i] > link->max_subareas)
            flag({ConstraintId::coverage_budget_exceeded, i, ban});
        const double mean_users = p.instance.users.density_per_m2 *
                                  p.instance.area.subarea_area_m2() *
                                  static_cast<double>(sc_cover_count[i]);
        if (blocking_probability(mean_users, link->capacity_bps,
                                 p.instance.users.rate_demand_bps) >
            p.instance.users.block_prob_max)
            flag({ConstraintId::backhaul_blocking, i, ban});
    }

    if (cost_cap != kNoCostCap) {
        double cost = 0.0;
        for (int i = 0; i < n_sc; ++i)
            if (open_sc[i]) cost += p.instance.sc_sites[i].cost;
        for (int k = 0; k < n_ban; ++k)
            if (open_ban[k]) cost += p.instance.ban_sites[k].cost;
        if (cost > cost_cap) flag({ConstraintId::cost_cap_exceeded});
    }
    return rep;
}

inline FeasibilityReport check_feasible(const Deployment& d, const Problem& p,
                                        double cost_cap = kNoCostCap) {
    std::vector<std::pair<int, int>> covers;
    covers.reserve(d.coverage.size());
    for (std::size_t j = 0; j < d.coverage.size(); ++j)
        if (d.coverage[j] >= 0) covers.emplace_back(d.coverage[j], static_cast<int>(j));
    return check_cover_list(d.open_sc, d.open_ban, d.sc_to_ban, covers, p, cost_cap);
}

}  // namespace scplan
