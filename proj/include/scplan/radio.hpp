#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scplan/instance.hpp"

namespace scplan {

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Mean log-distance path loss in dB (shadowing term at its zero mean).
// Distances below the reference distance clamp to it.
inline double mean_path_loss_db(double distance_m, const ChannelParams& ch, bool los) {
    if (!(distance_m > 0.0))
        throw std::domain_error("mean_path_loss_db: distance must be positive");
    const double d = std::max(distance_m, ch.ref_dist_m);
    const double wavelength = kSpeedOfLight / ch.carrier_hz;
    const double exponent = los ? ch.pathloss_exp_los : ch.pathloss_exp_nlos;
    return 20.0 * std::log10(4.0 * M_PI * ch.ref_dist_m / wavelength) +
           10.0 * exponent * std::log10(d / ch.ref_dist_m);
}

inline double p_los(double distance_m, const ChannelParams& ch) {
    if (distance_m < 0.0) throw std::domain_error("p_los: distance must be nonnegative");
    return std::exp(-ch.beta_los_per_m * distance_m);
}

struct LinkBudget {
    double mean_pathloss_los_db = 0.0;
    double mean_pathloss_nlos_db = 0.0;
    double p_los = 0.0;
    double mean_snr_los_db = 0.0;
    double mean_snr_nlos_db = 0.0;
};

inline LinkBudget link_budget(double distance_m, const ChannelParams& ch,
                              const RadioParams& radio) {
    LinkBudget b;
    b.mean_pathloss_los_db = mean_path_loss_db(distance_m, ch, true);
    b.mean_pathloss_nlos_db = mean_path_loss_db(distance_m, ch, false);
    b.p_los = p_los(distance_m, ch);
    b.mean_snr_los_db = radio.tx_power_dbm - b.mean_pathloss_los_db - radio.noise_dbm;
    b.mean_snr_nlos_db = radio.tx_power_dbm - b.mean_pathloss_nlos_db - radio.noise_dbm;
    return b;
}

// P(SNR < gamma) over the LOS state and the Gaussian shadowing, for an
// arbitrary SNR threshold. The mmW band is treated as noise limited, so the
// received SNR in dB is normal within each LOS state. `gain_db` is extra
// link-budget gain (directional backhaul antennas); access links use 0.
inline double outage_probability_at(double distance_m, const ChannelParams& ch,
                                    const RadioParams& radio, double gamma_db,
                                    double gain_db = 0.0) {
    if (!(distance_m > 0.0))
        throw std::domain_error("outage_probability: distance must be positive");
    const LinkBudget b = link_budget(distance_m, ch, radio);
    const double p_out =
        b.p_los *
            normal_cdf((gamma_db - b.mean_snr_los_db - gain_db) / ch.shadow_sigma_los_db) +
        (1.0 - b.p_los) *
            normal_cdf((gamma_db - b.mean_snr_nlos_db - gain_db) / ch.shadow_sigma_nlos_db);
    return std::clamp(p_out, 0.0, 1.0);
}

inline double outage_probability(double distance_m, const ChannelParams& ch,
                                 const RadioParams& radio) {
    return outage_probability_at(distance_m, ch, radio, radio.snr_threshold_db);
}

inline constexpr double kCoverageGridStep = 0.1;  // meters

// Largest grid distance D with p_out(d) <= p_max on every grid point d <= D,
// scanning from the reference distance upward in 0.1 m steps up to cap_m.
// The scan is conservative: the mixture is not guaranteed monotone, so the
// first grid point above p_max terminates the search.
inline double coverage_distance_at(const ChannelParams& ch, const RadioParams& radio,
                                   double gamma_db, double p_max, double cap_m,
                                   double gain_db = 0.0) {
    if (!(p_max > 0.0)) return 0.0;
    if (p_max >= 1.0) return cap_m;
    if (cap_m <= 0.0) return 0.0;
    if (outage_probability_at(ch.ref_dist_m, ch, radio, gamma_db, gain_db) > p_max) return 0.0;
    double prev = std::min(ch.ref_dist_m, cap_m);
    for (long long k = 1;; ++k) {
        const double d = ch.ref_dist_m + kCoverageGridStep * static_cast<double>(k);
        if (d > cap_m) return cap_m;
        if (outage_probability_at(d, ch, radio, gamma_db, gain_db) > p_max) return prev;
        prev = d;
    }
}

// Access-link coverage threshold at the instance's SNR threshold and outage cap.
inline double coverage_distance(const ChannelParams& ch, const RadioParams& radio, double cap_m) {
    return coverage_distance_at(ch, radio, radio.snr_threshold_db, radio.outage_max, cap_m);
}

struct CoverageThresholds {
    double d_max_access_m = 0.0;
    double d_max_backhaul_m = 0.0;
};

inline CoverageThresholds coverage_thresholds(const Instance& inst) {
    const double cap = inst.area.diagonal_m();
    CoverageThresholds t;
    t.d_max_access_m = coverage_distance(inst.access_channel, inst.radio, cap);
    t.d_max_backhaul_m = coverage_distance_at(inst.backhaul_channel, inst.radio,
                                              inst.radio.backhaul_snr_threshold_db,
                                              inst.radio.outage_max, cap,
                                              inst.radio.backhaul_gain_db);
    return t;
}

}  // namespace scplan
