#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "scplan/instance.hpp"

namespace scplan {

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key,
                                         const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError("missing field \"" + ctx + key + "\"");
    return *it;
}

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& ctx) {
    const auto& v = require_key(j, key, ctx);
    if (!v.is_number()) throw ValidationError("field \"" + ctx + key + "\" must be a number");
    return v.get<double>();
}

inline ChannelParams channel_from_json(const nlohmann::json& j, const std::string& ctx) {
    ChannelParams c;
    c.pathloss_exp_los = require_number(j, "pathloss_exp_los", ctx);
    c.pathloss_exp_nlos = require_number(j, "pathloss_exp_nlos", ctx);
    c.shadow_sigma_los_db = require_number(j, "shadow_sigma_los_db", ctx);
    c.shadow_sigma_nlos_db = require_number(j, "shadow_sigma_nlos_db", ctx);
    c.beta_los_per_m = require_number(j, "beta_los", ctx);
    c.carrier_hz = require_number(j, "carrier_hz", ctx);
    c.ref_dist_m = require_number(j, "ref_dist_m", ctx);
    return c;
}

inline nlohmann::json channel_to_json(const ChannelParams& c) {
    return {{"pathloss_exp_los", c.pathloss_exp_los},
            {"pathloss_exp_nlos", c.pathloss_exp_nlos},
            {"shadow_sigma_los_db", c.shadow_sigma_los_db},
            {"shadow_sigma_nlos_db", c.shadow_sigma_nlos_db},
            {"beta_los", c.beta_los_per_m},
            {"carrier_hz", c.carrier_hz},
            {"ref_dist_m", c.ref_dist_m}};
}

inline std::vector<Site> sites_from_json(const nlohmann::json& j, SiteKind kind,
                                         const std::string& ctx) {
    if (!j.is_array()) throw ValidationError("field \"" + ctx + "\" must be an array");
    std::vector<Site> sites;
    sites.reserve(j.size());
    for (const auto& e : j) {
        Site s;
        s.id = static_cast<int>(require_number(e, "id", ctx + "."));
        s.x_m = require_number(e, "x", ctx + ".");
        s.y_m = require_number(e, "y", ctx + ".");
        s.cost = require_number(e, "cost", ctx + ".");
        s.kind = kind;
        sites.push_back(s);
    }
    return sites;
}

inline nlohmann::json sites_to_json(const std::vector<Site>& sites) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : sites)
        arr.push_back({{"id", s.id}, {"x", s.x_m}, {"y", s.y_m}, {"cost", s.cost}});
    return arr;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["area"] = {{"width", inst.area.width_m},
                 {"height", inst.area.height_m},
                 {"subarea_side", inst.area.subarea_side_m}};
    j["sc_sites"] = detail::sites_to_json(inst.sc_sites);
    j["ban_sites"] = detail::sites_to_json(inst.ban_sites);
    j["access_channel"] = detail::channel_to_json(inst.access_channel);
    j["backhaul_channel"] = detail::channel_to_json(inst.backhaul_channel);
    j["radio"] = {{"tx_power_dbm", inst.radio.tx_power_dbm},
                  {"noise_dbm", inst.radio.noise_dbm},
                  {"snr_threshold_db", inst.radio.snr_threshold_db},
                  {"outage_max", inst.radio.outage_max},
                  {"backhaul_bandwidth_hz", inst.radio.backhaul_bandwidth_hz},
                  {"backhaul_snr_threshold_db", inst.radio.backhaul_snr_threshold_db},
                  {"backhaul_gain_db", inst.radio.backhaul_gain_db}};
    j["users"] = {{"density_per_m2", inst.users.density_per_m2},
                  {"rate_demand_bps", inst.users.rate_demand_bps},
                  {"block_prob_max", inst.users.block_prob_max}};
    j["nb_max"] = inst.nb_max;
    if (!inst.capacity_overrides.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& o : inst.capacity_overrides)
            arr.push_back(
                {{"ban_id", o.ban_id}, {"sc_id", o.sc_id}, {"capacity_bps", o.capacity_bps}});
        j["capacity_overrides"] = arr;
    }
    return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
    using detail::require_key;
    using detail::require_number;
    Instance inst;
    const auto& area = require_key(j, "area", "");
    inst.area.width_m = require_number(area, "width", "area.");
    inst.area.height_m = require_number(area, "height", "area.");
    inst.area.subarea_side_m = require_number(area, "subarea_side", "area.");
    inst.sc_sites =
        detail::sites_from_json(require_key(j, "sc_sites", ""), SiteKind::sc_candidate, "sc_sites");
    inst.ban_sites = detail::sites_from_json(require_key(j, "ban_sites", ""),
                                             SiteKind::ban_candidate, "ban_sites");
    inst.access_channel =
        detail::channel_from_json(require_key(j, "access_channel", ""), "access_channel.");
    inst.backhaul_channel =
        detail::channel_from_json(require_key(j, "backhaul_channel", ""), "backhaul_channel.");
    const auto& radio = require_key(j, "radio", "");
    inst.radio.tx_power_dbm = require_number(radio, "tx_power_dbm", "radio.");
    inst.radio.noise_dbm = require_number(radio, "noise_dbm", "radio.");
    inst.radio.snr_threshold_db = require_number(radio, "snr_threshold_db", "radio.");
    inst.radio.outage_max = require_number(radio, "outage_max", "radio.");
    inst.radio.backhaul_bandwidth_hz = require_number(radio, "backhaul_bandwidth_hz", "radio.");
    inst.radio.backhaul_snr_threshold_db =
        require_number(radio, "backhaul_snr_threshold_db", "radio.");
    inst.radio.backhaul_gain_db = require_number(radio, "backhaul_gain_db", "radio.");
    const auto& users = require_key(j, "users", "");
    inst.users.density_per_m2 = require_number(users, "density_per_m2", "users.");
    inst.users.rate_demand_bps = require_number(users, "rate_demand_bps", "users.");
    inst.users.block_prob_max = require_number(users, "block_prob_max", "users.");
    inst.nb_max = static_cast<int>(require_number(j, "nb_max", ""));
    if (auto it = j.find("capacity_overrides"); it != j.end()) {
        for (const auto& e : *it) {
            CapacityOverride o;
            o.ban_id = static_cast<int>(require_number(e, "ban_id", "capacity_overrides."));
            o.sc_id = static_cast<int>(require_number(e, "sc_id", "capacity_overrides."));
            o.capacity_bps = require_number(e, "capacity_bps", "capacity_overrides.");
            inst.capacity_overrides.push_back(o);
        }
    }
    validate_instance(inst);
    return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open \"" + path + "\" for writing");
    out << instance_to_json(inst).dump(2) << "\n";
}

inline Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open instance file \"" + path + "\"");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("instance file \"" + path + "\" is not valid JSON: " + e.what());
    }
    return instance_from_json(j);
}

}  // namespace scplan
