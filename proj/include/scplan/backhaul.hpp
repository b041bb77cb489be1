#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "scplan/radio.hpp"

namespace scplan {

// Shannon capacity for a given mean SNR.
inline double shannon_capacity_bps(double bandwidth_hz, double snr_db) {
    return bandwidth_hz * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

// Deterministic backhaul link capacity: Shannon rate at the
// LOS-probability-weighted mean path loss (shadowing at its mean), with the
// directional antenna gain in the budget.
inline double link_capacity(double distance_m, const ChannelParams& backhaul_ch,
                            const RadioParams& radio) {
    if (!(distance_m > 0.0)) throw std::domain_error("link_capacity: distance must be positive");
    const LinkBudget b = link_budget(distance_m, backhaul_ch, radio);
    const double mean_loss_db =
        b.p_los * b.mean_pathloss_los_db + (1.0 - b.p_los) * b.mean_pathloss_nlos_db;
    const double snr_db =
        radio.tx_power_dbm + radio.backhaul_gain_db - mean_loss_db - radio.noise_dbm;
    return shannon_capacity_bps(radio.backhaul_bandwidth_hz, snr_db);
}

namespace detail {

// P(Q >= k) for Q ~ Poisson(lambda). Direct CDF summation; switches to
// log-space terms when exp(-lambda) underflows. Residual below 1e-12 is
// treated as zero tail.
inline double poisson_tail_at_least(double lambda, long long k) {
    if (lambda < 0.0) throw std::domain_error("poisson tail: lambda must be nonnegative");
    if (k <= 0) return 1.0;
    if (lambda == 0.0) return 0.0;
    const double sd = std::sqrt(lambda);
    if (static_cast<double>(k) > lambda + 40.0 * sd + 60.0) return 0.0;
    if (static_cast<double>(k) < lambda - 40.0 * sd - 60.0) return 1.0;
    if (lambda < 700.0) {
        double term = std::exp(-lambda);
        double cdf = term;
        for (long long q = 1; q < k; ++q) {
            term *= lambda / static_cast<double>(q);
            cdf += term;
        }
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    // Large lambda: sum CDF terms in log space over the mass-carrying window.
    const double loglam = std::log(lambda);
    const long long lo = std::max(0LL, static_cast<long long>(lambda - 40.0 * sd) - 2);
    double cdf = 0.0;
    for (long long q = lo; q < k; ++q) {
        const double lt = -lambda + static_cast<double>(q) * loglam - std::lgamma(q + 1.0);
        cdf += std::exp(lt);
    }
    return std::clamp(1.0 - cdf, 0.0, 1.0);
}

}  // namespace detail

// Probability that the aggregate rate demand of a Poisson user population
// with mean `mean_users` and constant per-user demand reaches the link
// capacity. With constant demand this is a Poisson tail at ceil(C/R_u);
// capacity below one user demand blocks as soon as any user arrives.
inline double blocking_probability(double mean_users, double capacity_bps,
                                   double rate_demand_bps) {
    if (mean_users < 0.0)
        throw std::domain_error("blocking_probability: mean_users must be nonnegative");
    if (capacity_bps < 0.0)
        throw std::domain_error("blocking_probability: capacity must be nonnegative");
    if (!(rate_demand_bps > 0.0))
        throw std::domain_error("blocking_probability: rate demand must be positive");
    const double ratio = capacity_bps / rate_demand_bps;
    long long k = static_cast<long long>(std::ceil(ratio));
    k = std::max(k, 1LL);
    return detail::poisson_tail_at_least(mean_users, k);
}

// Largest subarea count n with blocking(density*area*n) <= block_prob_max.
// Blocking is nondecreasing in n, so an exponential bracket plus binary
// search suffices.
inline long long max_subareas(double capacity_bps, const UserParams& users,
                              double subarea_area_m2,
                              long long cap = std::numeric_limits<long long>::max() / 4) {
    if (!(subarea_area_m2 > 0.0))
        throw std::domain_error("max_subareas: subarea area must be positive");
    const double users_per_subarea = users.density_per_m2 * subarea_area_m2;
    auto ok = [&](long long n) {
        return blocking_probability(users_per_subarea * static_cast<double>(n), capacity_bps,
                                    users.rate_demand_bps) <= users.block_prob_max;
    };
    if (users_per_subarea <= 0.0) return cap;  // no users, any coverage is fine
    if (!ok(1)) return 0;
    long long lo = 1, hi = 2;
    while (hi <= cap && ok(hi)) {
        lo = hi;
        hi *= 2;
    }
    hi = std::min(hi, cap + 1);
    // invariant: ok(lo), !ok(hi) (or hi > cap)
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (ok(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

struct BackhaulLink {
    int ban = -1;  // index into ban_sites
    int sc = -1;   // index into sc_sites
    double distance_m = 0.0;
    double capacity_bps = 0.0;
    long long max_subareas = 0;  // coverage budget for the SCBS on this link
};

// Precomputed geometry and backhaul structure shared by the solver modules.
// Immutable after construction.
struct LinkTable {
    std::vector<std::pair<double, double>> centers;  // subarea centers, row-major
    std::vector<double> sc_access_range_m;           // per SCBS candidate
    std::vector<double> ban_access_range_m;          // per BAN candidate
    double backhaul_range_m = 0.0;

    std::vector<BackhaulLink> links;
    std::vector<std::vector<int>> sc_links;  // per SCBS: link indices, ascending BAN index

    // in-range neighborhoods, sorted nearest-first (ties by index)
    std::vector<std::vector<int>> sc_subareas;   // per SCBS: subarea indices
    std::vector<std::vector<int>> ban_subareas;  // per BAN: subarea indices
    std::vector<std::vector<int>> subarea_bans;  // per subarea: BAN indices

    const BackhaulLink* find_link(int sc, int ban) const {
        for (int li : sc_links[sc])
            if (links[li].ban == ban) return &links[li];
        return nullptr;
    }
};

inline double site_distance(const Site& s, const std::pair<double, double>& p) {
    return std::hypot(s.x_m - p.first, s.y_m - p.second);
}

// Assembles coverage thresholds, per-pair backhaul links (capacity and
// coverage budget), and the in-range neighbor lists used by the assignment
// heuristics.
inline LinkTable build_links(const Instance& inst) {
    LinkTable t;
    t.centers = subarea_centers(inst.area);
    const auto th = coverage_thresholds(inst);
    t.sc_access_range_m.assign(inst.sc_sites.size(), th.d_max_access_m);
    t.ban_access_range_m.assign(inst.ban_sites.size(), th.d_max_access_m);
    t.backhaul_range_m = th.d_max_backhaul_m;

    std::map<std::pair<int, int>, double> overrides;  // (ban_id, sc_id) -> bps
    for (const auto& o : inst.capacity_overrides) overrides[{o.ban_id, o.sc_id}] = o.capacity_bps;

    const long long n_subareas = static_cast<long long>(t.centers.size());
    t.sc_links.resize(inst.sc_sites.size());
    for (std::size_t i = 0; i < inst.sc_sites.size(); ++i) {
        for (std::size_t k = 0; k < inst.ban_sites.size(); ++k) {
            const double d = std::hypot(inst.sc_sites[i].x_m - inst.ban_sites[k].x_m,
                                        inst.sc_sites[i].y_m - inst.ban_sites[k].y_m);
            if (d > t.backhaul_range_m) continue;
            BackhaulLink link;
            link.ban = static_cast<int>(k);
            link.sc = static_cast<int>(i);
            link.distance_m = d;
            const auto ov = overrides.find({inst.ban_sites[k].id, inst.sc_sites[i].id});
            link.capacity_bps = ov != overrides.end()
                                    ? ov->second
                                    : link_capacity(std::max(d, inst.backhaul_channel.ref_dist_m),
                                                    inst.backhaul_channel, inst.radio);
            link.max_subareas =
                max_subareas(link.capacity_bps, inst.users, inst.area.subarea_area_m2(),
                             n_subareas);
            t.sc_links[i].push_back(static_cast<int>(t.links.size()));
            t.links.push_back(link);
        }
    }

    auto in_range_sorted = [&](const Site& s, double range) {
        std::vector<std::pair<double, int>> near;
        for (std::size_t j = 0; j < t.centers.size(); ++j) {
            const double d = site_distance(s, t.centers[j]);
            if (d <= range) near.emplace_back(d, static_cast<int>(j));
        }
        std::sort(near.begin(), near.end());
        std::vector<int> idx;
        idx.reserve(near.size());
        for (const auto& p : near) idx.push_back(p.second);
        return idx;
    };
    t.sc_subareas.resize(inst.sc_sites.size());
    for (std::size_t i = 0; i < inst.sc_sites.size(); ++i)
        t.sc_subareas[i] = in_range_sorted(inst.sc_sites[i], t.sc_access_range_m[i]);
    t.ban_subareas.resize(inst.ban_sites.size());
    for (std::size_t k = 0; k < inst.ban_sites.size(); ++k)
        t.ban_subareas[k] = in_range_sorted(inst.ban_sites[k], t.ban_access_range_m[k]);

    t.subarea_bans.resize(t.centers.size());
    for (std::size_t j = 0; j < t.centers.size(); ++j) {
        std::vector<std::pair<double, int>> near;
        for (std::size_t k = 0; k < inst.ban_sites.size(); ++k) {
            const double d = site_distance(inst.ban_sites[k], t.centers[j]);
            if (d <= t.ban_access_range_m[k]) near.emplace_back(d, static_cast<int>(k));
        }
        std::sort(near.begin(), near.end());
        for (const auto& p : near) t.subarea_bans[j].push_back(p.second);
    }
    return t;
}

}  // namespace scplan
