#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "scplan/common.hpp"

namespace scplan {

// Planning area partitioned into a regular grid of square subareas.
struct AreaSpec {
    double width_m = 0.0;
    double height_m = 0.0;
    double subarea_side_m = 0.0;

    int cols() const { return static_cast<int>(std::llround(width_m / subarea_side_m)); }
    int rows() const { return static_cast<int>(std::llround(height_m / subarea_side_m)); }
    int subarea_count() const { return cols() * rows(); }
    double subarea_area_m2() const { return subarea_side_m * subarea_side_m; }
    double diagonal_m() const { return std::hypot(width_m, height_m); }
};

enum class SiteKind { sc_candidate, ban_candidate };

struct Site {
    int id = -1;
    double x_m = 0.0;
    double y_m = 0.0;
    double cost = 0.0;
    SiteKind kind = SiteKind::sc_candidate;
};

// mmW channel: log-distance path loss with lognormal shadowing, separate
// LOS/NLOS exponents, and exponential LOS probability exp(-beta*d).
struct ChannelParams {
    double pathloss_exp_los = 2.0;
    double pathloss_exp_nlos = 3.3;
    double shadow_sigma_los_db = 5.2;
    double shadow_sigma_nlos_db = 7.6;
    double beta_los_per_m = 0.046;
    double carrier_hz = 73e9;
    double ref_dist_m = 1.0;
};

struct RadioParams {
    double tx_power_dbm = 30.0;
    double noise_dbm = -74.0;
    double snr_threshold_db = -10.0;
    double outage_max = 0.1;
    double backhaul_bandwidth_hz = 1e9;
    double backhaul_snr_threshold_db = -10.0;
    // combined TX+RX antenna gain on the directional P2MP backhaul links;
    // access links radiate without it
    double backhaul_gain_db = 40.0;
};

struct UserParams {
    double density_per_m2 = 200.0 / 1e6;  // 200 users per km^2
    double rate_demand_bps = 100e6;
    double block_prob_max = 0.05;
};

struct CapacityOverride {
    int ban_id = -1;
    int sc_id = -1;
    double capacity_bps = 0.0;
};

struct Instance {
    AreaSpec area;
    std::vector<Site> sc_sites;
    std::vector<Site> ban_sites;
    ChannelParams access_channel;
    ChannelParams backhaul_channel;
    RadioParams radio;
    UserParams users;
    int nb_max = 3;
    std::vector<CapacityOverride> capacity_overrides;
};

// Parameter bundle used by the generator; field defaults follow the 73 GHz
// urban measurement values and the simulation setup they accompany.
struct InstanceDefaults {
    ChannelParams access_channel{2.0, 3.3, 5.2, 7.6, 0.046, 73e9, 1.0};
    ChannelParams backhaul_channel{2.0, 3.5, 4.2, 7.9, 0.046, 73e9, 1.0};
    RadioParams radio;
    UserParams users;
    double sc_cost = 1.0;
    double ban_cost = 10.0;
    int nb_max = 3;
};

inline void validate_area(const AreaSpec& a) {
    if (!(a.width_m > 0.0) || !(a.height_m > 0.0) || !(a.subarea_side_m > 0.0))
        throw ValidationError("area: width, height and subarea_side must be positive");
    const double cols = a.width_m / a.subarea_side_m;
    const double rows = a.height_m / a.subarea_side_m;
    if (std::abs(cols - std::round(cols)) > 1e-9 || std::abs(rows - std::round(rows)) > 1e-9)
        throw ValidationError("area: width and height must be integer multiples of subarea_side");
}

inline void validate_channel(const ChannelParams& c, const std::string& name) {
    if (c.pathloss_exp_los < 1.0 || c.pathloss_exp_nlos < 1.0)
        throw ValidationError(name + ": path loss exponents must be >= 1");
    if (!(c.shadow_sigma_los_db > 0.0) || !(c.shadow_sigma_nlos_db > 0.0))
        throw ValidationError(name + ": shadowing sigmas must be positive");
    if (!(c.beta_los_per_m > 0.0)) throw ValidationError(name + ": beta_los must be positive");
    if (!(c.carrier_hz > 0.0)) throw ValidationError(name + ": carrier_hz must be positive");
    if (!(c.ref_dist_m > 0.0)) throw ValidationError(name + ": ref_dist_m must be positive");
}

inline void validate_instance(const Instance& inst) {
    validate_area(inst.area);
    validate_channel(inst.access_channel, "access_channel");
    validate_channel(inst.backhaul_channel, "backhaul_channel");
    if (!(inst.radio.outage_max > 0.0 && inst.radio.outage_max < 1.0))
        throw ValidationError("radio.outage_max: must lie in (0,1)");
    if (!(inst.radio.backhaul_bandwidth_hz > 0.0))
        throw ValidationError("radio.backhaul_bandwidth_hz: must be positive");
    if (inst.users.density_per_m2 < 0.0)
        throw ValidationError("users.density_per_m2: must be nonnegative");
    if (!(inst.users.rate_demand_bps > 0.0))
        throw ValidationError("users.rate_demand_bps: must be positive");
    if (!(inst.users.block_prob_max > 0.0 && inst.users.block_prob_max < 1.0))
        throw ValidationError("users.block_prob_max: must lie in (0,1)");
    if (inst.nb_max < 1) throw ValidationError("nb_max: must be >= 1");

    std::unordered_set<int> ids;
    auto check_site = [&](const Site& s, const char* list) {
        if (s.cost < 0.0)
            throw ValidationError(std::string(list) + ": site " + std::to_string(s.id) +
                                  " has negative cost");
        if (s.x_m < 0.0 || s.x_m > inst.area.width_m || s.y_m < 0.0 || s.y_m > inst.area.height_m)
            throw ValidationError(std::string(list) + ": site " + std::to_string(s.id) +
                                  " lies outside the area");
        if (!ids.insert(s.id).second)
            throw ValidationError(std::string("duplicate site id ") + std::to_string(s.id));
    };
    for (const auto& s : inst.sc_sites) check_site(s, "sc_sites");
    for (const auto& s : inst.ban_sites) check_site(s, "ban_sites");
}

// Subarea center points in row-major order (x varies fastest).
inline std::vector<std::pair<double, double>> subarea_centers(const AreaSpec& a) {
    validate_area(a);
    const int nc = a.cols(), nr = a.rows();
    std::vector<std::pair<double, double>> centers;
    centers.reserve(static_cast<std::size_t>(nc) * nr);
    for (int r = 0; r < nr; ++r)
        for (int c = 0; c < nc; ++c)
            centers.emplace_back((c + 0.5) * a.subarea_side_m, (r + 0.5) * a.subarea_side_m);
    return centers;
}

// Random instance: candidate sites occupy distinct subarea centers.
inline Instance generate_instance(const AreaSpec& area, int n_sc, int n_ban, std::uint64_t seed,
                                  const InstanceDefaults& defaults = {}) {
    validate_area(area);
    if (n_sc < 0 || n_ban < 0)
        throw ValidationError("generate_instance: site counts must be nonnegative");
    const int total = n_sc + n_ban;
    const int n_cells = area.subarea_count();
    if (total > n_cells)
        throw ValidationError("generate_instance: requested " + std::to_string(total) +
                              " sites but the area has only " + std::to_string(n_cells) +
                              " subareas");

    Instance inst;
    inst.area = area;
    inst.access_channel = defaults.access_channel;
    inst.backhaul_channel = defaults.backhaul_channel;
    inst.radio = defaults.radio;
    inst.users = defaults.users;
    inst.nb_max = defaults.nb_max;

    const auto centers = subarea_centers(area);
    std::mt19937_64 rng(seed);
    const auto picks =
        sample_without_replacement(rng, static_cast<std::uint32_t>(n_cells),
                                   static_cast<std::uint32_t>(total));
    inst.sc_sites.reserve(n_sc);
    inst.ban_sites.reserve(n_ban);
    for (int i = 0; i < n_sc; ++i) {
        const auto& c = centers[picks[i]];
        inst.sc_sites.push_back({i, c.first, c.second, defaults.sc_cost, SiteKind::sc_candidate});
    }
    for (int k = 0; k < n_ban; ++k) {
        const auto& c = centers[picks[n_sc + k]];
        inst.ban_sites.push_back(
            {n_sc + k, c.first, c.second, defaults.ban_cost, SiteKind::ban_candidate});
    }
    validate_instance(inst);
    return inst;
}

inline bool operator==(const AreaSpec& a, const AreaSpec& b) {
    return a.width_m == b.width_m && a.height_m == b.height_m &&
           a.subarea_side_m == b.subarea_side_m;
}
inline bool operator==(const Site& a, const Site& b) {
    return a.id == b.id && a.x_m == b.x_m && a.y_m == b.y_m && a.cost == b.cost &&
           a.kind == b.kind;
}
inline bool operator==(const ChannelParams& a, const ChannelParams& b) {
    return a.pathloss_exp_los == b.pathloss_exp_los && a.pathloss_exp_nlos == b.pathloss_exp_nlos &&
           a.shadow_sigma_los_db == b.shadow_sigma_los_db &&
           a.shadow_sigma_nlos_db == b.shadow_sigma_nlos_db &&
           a.beta_los_per_m == b.beta_los_per_m && a.carrier_hz == b.carrier_hz &&
           a.ref_dist_m == b.ref_dist_m;
}
inline bool operator==(const RadioParams& a, const RadioParams& b) {
    return a.tx_power_dbm == b.tx_power_dbm && a.noise_dbm == b.noise_dbm &&
           a.snr_threshold_db == b.snr_threshold_db && a.outage_max == b.outage_max &&
           a.backhaul_bandwidth_hz == b.backhaul_bandwidth_hz &&
           a.backhaul_snr_threshold_db == b.backhaul_snr_threshold_db &&
           a.backhaul_gain_db == b.backhaul_gain_db;
}
inline bool operator==(const UserParams& a, const UserParams& b) {
    return a.density_per_m2 == b.density_per_m2 && a.rate_demand_bps == b.rate_demand_bps &&
           a.block_prob_max == b.block_prob_max;
}
inline bool operator==(const CapacityOverride& a, const CapacityOverride& b) {
    return a.ban_id == b.ban_id && a.sc_id == b.sc_id && a.capacity_bps == b.capacity_bps;
}
inline bool operator==(const Instance& a, const Instance& b) {
    return a.area == b.area && a.sc_sites == b.sc_sites && a.ban_sites == b.ban_sites &&
           a.access_channel == b.access_channel && a.backhaul_channel == b.backhaul_channel &&
           a.radio == b.radio && a.users == b.users && a.nb_max == b.nb_max &&
           a.capacity_overrides == b.capacity_overrides;
}

}  // namespace scplan
