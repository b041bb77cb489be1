#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "scplan/pareto.hpp"

namespace scplan {

namespace detail {

// Maximum bipartite matching of subareas to capacity units (Kuhn's
// augmenting paths). options[j] lists the unit indices usable by subarea j.
class UnitMatcher {
public:
    explicit UnitMatcher(int n_units) : unit_to_left_(n_units, -1) {}

    int solve(const std::vector<std::vector<int>>& options) {
        int matched = 0;
        left_to_unit_.assign(options.size(), -1);
        for (std::size_t j = 0; j < options.size(); ++j) {
            visited_.assign(unit_to_left_.size(), false);
            if (augment(static_cast<int>(j), options)) ++matched;
        }
        return matched;
    }
    int unit_of(int j) const { return left_to_unit_[j]; }

private:
    bool augment(int j, const std::vector<std::vector<int>>& options) {
        for (int u : options[j]) {
            if (visited_[u]) continue;
            visited_[u] = true;
            if (unit_to_left_[u] < 0 || augment(unit_to_left_[u], options)) {
                unit_to_left_[u] = j;
                left_to_unit_[j] = u;
                return true;
            }
        }
        return false;
    }

    std::vector<int> unit_to_left_;
    std::vector<int> left_to_unit_;
    std::vector<char> visited_;
};

// Exact maximum coverage for fixed open sites and given per-SCBS budgets.
// Subareas reachable by an open BAN are always covered (BANs are
// uncapacitated); the rest is a matching against SCBS budget units.
inline long long exact_coverage(const Problem& p, const std::vector<std::uint8_t>& open_sc,
                                const std::vector<std::uint8_t>& open_ban,
                                const std::vector<long long>& sc_budgets,
                                std::vector<int>* coverage_out) {
    const int n_sc = p.n_sc();
    std::vector<int> coverage(static_cast<std::size_t>(p.n_subareas()), -1);
    long long covered = 0;
    for (std::size_t j = 0; j < coverage.size(); ++j)
        for (int k : p.links.subarea_bans[j])
            if (open_ban[k]) {
                coverage[j] = slot_of_ban(k, n_sc);
                ++covered;
                break;
            }

    // expand each SCBS into budget units and match leftover subareas
    std::vector<int> unit_sc;
    std::vector<int> first_unit(n_sc, -1);
    for (int i = 0; i < n_sc; ++i) {
        if (!open_sc[i]) continue;
        const long long cap =
            std::min<long long>(sc_budgets[i], static_cast<long long>(p.links.sc_subareas[i].size()));
        first_unit[i] = static_cast<int>(unit_sc.size());
        for (long long u = 0; u < cap; ++u) unit_sc.push_back(i);
    }
    std::vector<int> left_subarea;
    std::vector<std::vector<int>> options;
    std::vector<std::vector<int>> sc_option_units(n_sc);
    for (int i = 0; i < n_sc; ++i) {
        if (first_unit[i] < 0) continue;
        const long long cap =
            std::min<long long>(sc_budgets[i], static_cast<long long>(p.links.sc_subareas[i].size()));
        for (long long u = 0; u < cap; ++u)
            sc_option_units[i].push_back(first_unit[i] + static_cast<int>(u));
    }
    std::vector<std::vector<int>> subarea_scs(coverage.size());
    for (int i = 0; i < n_sc; ++i) {
        if (!open_sc[i]) continue;
        for (int j : p.links.sc_subareas[i]) subarea_scs[j].push_back(i);
    }
    for (std::size_t j = 0; j < coverage.size(); ++j) {
        if (coverage[j] >= 0 || subarea_scs[j].empty()) continue;
        std::vector<int> opts;
        for (int i : subarea_scs[j])
            opts.insert(opts.end(), sc_option_units[i].begin(), sc_option_units[i].end());
        if (opts.empty()) continue;
        left_subarea.push_back(static_cast<int>(j));
        options.push_back(std::move(opts));
    }
    UnitMatcher matcher(static_cast<int>(unit_sc.size()));
    covered += matcher.solve(options);
    if (coverage_out) {
        for (std::size_t idx = 0; idx < left_subarea.size(); ++idx) {
            const int u = matcher.unit_of(static_cast<int>(idx));
            if (u >= 0) coverage[left_subarea[idx]] = slot_of_sc(unit_sc[u]);
        }
        *coverage_out = std::move(coverage);
    }
    return covered;
}

// All fan-out-respecting SCBS->BAN assignments over existing links, yielded
// as budget vectors (deduplicated) with one representative assignment each.
inline void enumerate_assignments(const Problem& p, const std::vector<int>& open_scs,
                                  const std::vector<std::uint8_t>& open_ban,
                                  std::vector<std::pair<std::vector<long long>,
                                                        std::vector<int>>>& out) {
    const int n_sc = p.n_sc();
    std::vector<int> slots(p.n_ban(), 0);
    for (int k = 0; k < p.n_ban(); ++k) slots[k] = open_ban[k] ? p.instance.nb_max : 0;
    std::vector<int> assign(n_sc, -1);
    std::vector<long long> budgets(n_sc, 0);
    std::set<std::vector<long long>> seen;

    auto rec = [&](auto&& self, std::size_t pos) -> void {
        if (pos == open_scs.size()) {
            if (seen.insert(budgets).second) out.emplace_back(budgets, assign);
            return;
        }
        const int i = open_scs[pos];
        for (int li : p.links.sc_links[i]) {
            const auto& link = p.links.links[li];
            if (!open_ban[link.ban] || slots[link.ban] <= 0) continue;
            --slots[link.ban];
            assign[i] = link.ban;
            budgets[i] = link.max_subareas;
            self(self, pos + 1);
            ++slots[link.ban];
            assign[i] = -1;
            budgets[i] = 0;
        }
    };
    rec(rec, 0);
}

}  // namespace detail

struct OracleResult {
    ParetoArchive frontier;
    unsigned long long combinations_examined = 0;
};

// Exact optimum of the cost-capped coverage problem, read off the frontier.
inline long long exact_eps_optimum(const OracleResult& oracle, const Problem& p, double eps) {
    long long best = p.n_subareas();
    for (const auto& e : oracle.frontier.entries)
        if (e.objective.cost <= eps) best = std::min(best, e.objective.uncovered);
    return best;
}

// Exhaustive ground truth: every (y, z) combination, every fan-out-feasible
// backhaul assignment (deduplicated by budget vector), exact inner coverage.
inline OracleResult enumerate_frontier(const Problem& p,
                                       std::uint64_t size_guard = 1ULL << 20) {
    const int n_sc = p.n_sc(), n_ban = p.n_ban();
    const int n_sites = n_sc + n_ban;
    if (n_sites >= 63 || (1ULL << n_sites) > size_guard)
        throw std::invalid_argument(
            "enumerate_frontier: needs a size guard of at least 2^" + std::to_string(n_sites) +
            " combinations");

    // budgets never bind when every link budget reaches the subarea count;
    // a single existence matching then suffices per (y, z)
    bool budgets_bind = false;
    for (const auto& link : p.links.links)
        if (link.max_subareas < p.n_subareas()) budgets_bind = true;

    OracleResult result;
    std::vector<std::uint8_t> open_sc(n_sc), open_ban(n_ban);
    for (std::uint64_t mask = 0; mask < (1ULL << n_sites); ++mask) {
        ++result.combinations_examined;
        for (int i = 0; i < n_sc; ++i) open_sc[i] = (mask >> i) & 1;
        for (int k = 0; k < n_ban; ++k) open_ban[k] = (mask >> (n_sc + k)) & 1;

        std::vector<int> open_scs;
        for (int i = 0; i < n_sc; ++i)
            if (open_sc[i]) open_scs.push_back(i);

        std::vector<std::pair<std::vector<long long>, std::vector<int>>> assignments;
        if (budgets_bind) {
            detail::enumerate_assignments(p, open_scs, open_ban, assignments);
        } else {
            // any fan-out-feasible assignment works; find one by matching
            // SCBSs to BAN slot units
            std::vector<int> unit_ban;
            std::vector<std::vector<int>> ban_units(n_ban);
            for (int k = 0; k < n_ban; ++k) {
                if (!open_ban[k]) continue;
                for (int s = 0; s < p.instance.nb_max; ++s) {
                    ban_units[k].push_back(static_cast<int>(unit_ban.size()));
                    unit_ban.push_back(k);
                }
            }
            std::vector<std::vector<int>> options(open_scs.size());
            for (std::size_t idx = 0; idx < open_scs.size(); ++idx)
                for (int li : p.links.sc_links[open_scs[idx]]) {
                    const int k = p.links.links[li].ban;
                    if (open_ban[k])
                        options[idx].insert(options[idx].end(), ban_units[k].begin(),
                                            ban_units[k].end());
                }
            detail::UnitMatcher matcher(static_cast<int>(unit_ban.size()));
            if (matcher.solve(options) == static_cast<int>(open_scs.size())) {
                std::vector<int> assign(n_sc, -1);
                std::vector<long long> budgets(n_sc, 0);
                for (std::size_t idx = 0; idx < open_scs.size(); ++idx) {
                    const int i = open_scs[idx];
                    assign[i] = unit_ban[matcher.unit_of(static_cast<int>(idx))];
                    budgets[i] = p.links.find_link(i, assign[i])->max_subareas;
                }
                assignments.emplace_back(std::move(budgets), std::move(assign));
            }
        }
        if (assignments.empty() && !open_scs.empty()) continue;  // unservable SCBS
        if (assignments.empty()) assignments.emplace_back(std::vector<long long>(n_sc, 0),
                                                          std::vector<int>(n_sc, -1));

        double cost = 0.0;
        for (int i = 0; i < n_sc; ++i)
            if (open_sc[i]) cost += p.instance.sc_sites[i].cost;
        for (int k = 0; k < n_ban; ++k)
            if (open_ban[k]) cost += p.instance.ban_sites[k].cost;

        long long best_cov = -1;
        std::vector<int> best_coverage;
        std::vector<int> best_assign;
        for (const auto& [budgets, assign] : assignments) {
            std::vector<int> coverage;
            const long long cov = detail::exact_coverage(p, open_sc, open_ban, budgets, &coverage);
            if (cov > best_cov) {
                best_cov = cov;
                best_coverage = std::move(coverage);
                best_assign = assign;
            }
        }
        Deployment dep;
        dep.open_sc = open_sc;
        dep.open_ban = open_ban;
        dep.sc_to_ban = best_assign;
        dep.coverage = std::move(best_coverage);
        result.frontier.insert(ObjectiveVector{cost, p.n_subareas() - best_cov}, dep);
    }
    return result;
}

// Exact minimum of the relaxed problem by enumeration over (y, z); the inner
// variables decouple once fan-out and budgets are dualized, so the best
// coverage and link choices follow in closed form.
struct RelaxedOptimum {
    double value = std::numeric_limits<double>::infinity();
    Deployment argmin;
};

inline RelaxedOptimum exact_relaxed_optimum(const Problem& p,
                                            const std::vector<double>& lambda_fanout,
                                            const std::vector<double>& lambda_budget,
                                            double cost_cap,
                                            std::uint64_t size_guard = 1ULL << 20) {
    const int n_sc = p.n_sc(), n_ban = p.n_ban();
    const int n_sites = n_sc + n_ban;
    if (n_sites >= 63 || (1ULL << n_sites) > size_guard)
        throw std::invalid_argument(
            "exact_relaxed_optimum: needs a size guard of at least 2^" +
            std::to_string(n_sites) + " combinations");
    if (static_cast<int>(lambda_fanout.size()) != n_ban ||
        static_cast<int>(lambda_budget.size()) != n_sc)
        throw std::invalid_argument("exact_relaxed_optimum: multiplier vectors mis-sized");

    double constant = 0.0;
    for (double l : lambda_fanout) constant -= l * static_cast<double>(p.instance.nb_max);

    std::vector<std::vector<int>> subarea_scs(static_cast<std::size_t>(p.n_subareas()));
    for (int i = 0; i < n_sc; ++i)
        for (int j : p.links.sc_subareas[i]) subarea_scs[j].push_back(i);

    RelaxedOptimum best;
    std::vector<std::uint8_t> open_sc(n_sc), open_ban(n_ban);
    for (std::uint64_t mask = 0; mask < (1ULL << n_sites); ++mask) {
        for (int i = 0; i < n_sc; ++i) open_sc[i] = (mask >> i) & 1;
        for (int k = 0; k < n_ban; ++k) open_ban[k] = (mask >> (n_sc + k)) & 1;

        double cost = 0.0;
        for (int i = 0; i < n_sc; ++i)
            if (open_sc[i]) cost += p.instance.sc_sites[i].cost;
        for (int k = 0; k < n_ban; ++k)
            if (open_ban[k]) cost += p.instance.ban_sites[k].cost;
        if (cost > cost_cap) continue;

        // every open SCBS must pick one open linked BAN; take the cheapest
        double link_total = 0.0;
        std::vector<int> assign(n_sc, -1);
        bool feasible = true;
        for (int i = 0; i < n_sc && feasible; ++i) {
            if (!open_sc[i]) continue;
            int chosen = -1;
            double chosen_price = 0.0;
            for (int li : p.links.sc_links[i]) {
                const auto& link = p.links.links[li];
                if (!open_ban[link.ban]) continue;
                const double price =
                    lambda_fanout[link.ban] -
                    lambda_budget[i] * static_cast<double>(link.max_subareas);
                if (chosen < 0 || price < chosen_price) {
                    chosen = link.ban;
                    chosen_price = price;
                }
            }
            if (chosen < 0) {
                feasible = false;
                break;
            }
            assign[i] = chosen;
            link_total += chosen_price;
        }
        if (!feasible) continue;

        // per-subarea best coverage contribution: a BAN counts -1, an SCBS
        // counts lambda_budget - 1, uncovered counts 0
        double cover_total = 0.0;
        std::vector<int> coverage(subarea_scs.size(), -1);
        for (std::size_t j = 0; j < subarea_scs.size(); ++j) {
            int pick = -1;
            double pick_value = 0.0;
            for (int k : p.links.subarea_bans[j])
                if (open_ban[k]) {
                    pick = slot_of_ban(k, n_sc);
                    pick_value = -1.0;
                    break;
                }
            if (pick < 0) {
                for (int i : subarea_scs[j]) {
                    if (!open_sc[i]) continue;
                    const double v = lambda_budget[i] - 1.0;
                    if (v < pick_value) {
                        pick = slot_of_sc(i);
                        pick_value = v;
                    }
                }
            }
            if (pick >= 0) {
                coverage[j] = pick;
                cover_total += pick_value;
            }
        }

        const double value =
            static_cast<double>(p.n_subareas()) + cover_total + link_total + constant;
        if (value < best.value) {
            best.value = value;
            best.argmin.open_sc = open_sc;
            best.argmin.open_ban = open_ban;
            best.argmin.sc_to_ban = assign;
            best.argmin.coverage = coverage;
        }
    }
    return best;
}

}  // namespace scplan
