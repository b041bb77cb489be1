#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scplan/driver.hpp"
#include "scplan/instance_io.hpp"

namespace scplan {

inline constexpr const char* kToolVersion = "scplan 0.1.0";

// Shortest stable text for a double (snprintf %.17g trimmed is overkill for
// CSV diffing; %.10g keeps files byte-stable for identical runs).
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read \"" + path + "\" for hashing");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a_hash(bytes);
}

inline nlohmann::json deployment_to_json(const Deployment& d, const Problem& p) {
    nlohmann::json j;
    auto open_sc = nlohmann::json::array();
    for (int i = 0; i < p.n_sc(); ++i)
        if (d.open_sc[i]) open_sc.push_back(p.instance.sc_sites[i].id);
    auto open_ban = nlohmann::json::array();
    for (int k = 0; k < p.n_ban(); ++k)
        if (d.open_ban[k]) open_ban.push_back(p.instance.ban_sites[k].id);
    auto pairs = nlohmann::json::array();
    for (int i = 0; i < p.n_sc(); ++i)
        if (d.sc_to_ban[i] >= 0)
            pairs.push_back({{"sc", p.instance.sc_sites[i].id},
                             {"ban", p.instance.ban_sites[d.sc_to_ban[i]].id}});
    auto coverage = nlohmann::json::array();
    for (int cov : d.coverage) {
        if (cov < 0)
            coverage.push_back(-1);
        else if (slot_is_sc(cov, p.n_sc()))
            coverage.push_back(p.instance.sc_sites[cov].id);
        else
            coverage.push_back(p.instance.ban_sites[cov - p.n_sc()].id);
    }
    j["open_sc"] = open_sc;
    j["open_ban"] = open_ban;
    j["sc_to_ban"] = pairs;
    j["coverage"] = coverage;
    return j;
}

inline nlohmann::json config_to_json(const SolverReport& report) {
    const SolverConfig& c = report.config;
    return {{"delta_c", c.delta_c},
            {"delta_eps", c.delta_eps},
            {"resolved_delta_c", report.delta_c},
            {"resolved_delta_eps", report.delta_eps},
            {"lagrange_rounds", c.lagrange_rounds},
            {"tabu_iters", c.tabu.max_iters},
            {"stall_before_diversify", c.tabu.stall_before_diversify},
            {"diversify_opens", c.tabu.diversify_opens},
            {"swap_samples", c.tabu.swap_samples},
            {"tenure", c.tabu.tenure},
            {"threads", c.tabu.threads},
            {"outer_iters", c.outer_iters},
            {"inner_iters", c.inner_iters},
            {"alpha0", c.alpha0},
            {"patience", c.patience},
            {"warm_start", c.warm_start},
            {"eps_min", c.eps_min},
            {"seed", c.seed}};
}

// Report directory layout:
//   frontier.csv   cost,uncovered,covered_fraction,solution_file
//   bounds.csv     per-round trace: eps,round,relaxed_value,lower_bound,
//                  upper_bound,subgradient_norm
//   caps.csv       per-cap summary: eps,lower_bound
//   solutions/     one JSON deployment per frontier entry
//   config.json    solver configuration echo (with resolved deltas)
//   manifest.json  reproduction record
inline void write_report(const std::string& dir, const SolverReport& report, const Problem& p,
                         const std::string& command_line, const std::string& instance_path) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "solutions");

    const double s_total = static_cast<double>(p.n_subareas());
    {
        std::ofstream out(fs::path(dir) / "frontier.csv");
        out << "cost,uncovered,covered_fraction,solution_file\n";
        for (std::size_t idx = 0; idx < report.frontier.entries.size(); ++idx) {
            const auto& e = report.frontier.entries[idx];
            char name[32];
            std::snprintf(name, sizeof name, "solutions/sol_%04zu.json", idx);
            out << fmt_double(e.objective.cost) << ',' << e.objective.uncovered << ','
                << fmt_double(s_total > 0.0
                                  ? (s_total - static_cast<double>(e.objective.uncovered)) / s_total
                                  : 0.0)
                << ',' << name << '\n';
            std::ofstream sol(fs::path(dir) / name);
            sol << deployment_to_json(e.deployment, p).dump(2) << "\n";
        }
    }
    {
        std::ofstream out(fs::path(dir) / "bounds.csv");
        out << "eps,round,relaxed_value,lower_bound,upper_bound,subgradient_norm\n";
        for (const auto& t : report.traces)
            out << fmt_double(t.eps) << ',' << t.round << ',' << fmt_double(t.relaxed_value)
                << ',' << fmt_double(t.lower_bound) << ',' << fmt_double(t.upper_bound) << ','
                << fmt_double(t.subgradient_norm) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "caps.csv");
        out << "eps,lower_bound\n";
        for (std::size_t i = 0; i < report.cost_caps.size(); ++i) {
            const double lb =
                i < report.lower_bounds.size() ? report.lower_bounds[i] : 0.0;
            out << fmt_double(report.cost_caps[i]) << ',' << fmt_double(lb) << '\n';
        }
    }
    {
        std::ofstream out(fs::path(dir) / "config.json");
        out << config_to_json(report).dump(2) << "\n";
    }
    {
        nlohmann::json m;
        m["command_line"] = command_line;
        m["instance_path"] = instance_path;
        m["instance_hash"] =
            instance_path.empty() ? std::string("-")
                                  : std::to_string(file_hash(instance_path));
        m["seed"] = report.config.seed;
        m["tool_version"] = kToolVersion;
        m["bounds_heuristic"] = report.bounds_heuristic;
        m["wall_seconds"] = report.wall_seconds;
        m["generated_at"] =
            static_cast<long long>(std::chrono::duration_cast<std::chrono::seconds>(
                                       std::chrono::system_clock::now().time_since_epoch())
                                       .count());
        std::ofstream out(fs::path(dir) / "manifest.json");
        out << m.dump(2) << "\n";
    }
}

// Long-format merge of one or more report directories for plotting:
// series,cost,covered_fraction (rows in frontier order per report).
inline void write_plotdata(const std::string& out_path,
                           const std::vector<std::string>& report_dirs,
                           const std::vector<std::string>& labels) {
    namespace fs = std::filesystem;
    if (report_dirs.empty()) throw ValidationError("frontier-plotdata: no report directories");
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot open \"" + out_path + "\" for writing");
    out << "series,cost,covered_fraction\n";
    for (std::size_t r = 0; r < report_dirs.size(); ++r) {
        const std::string label =
            r < labels.size() ? labels[r] : fs::path(report_dirs[r]).filename().string();
        const auto frontier = fs::path(report_dirs[r]) / "frontier.csv";
        std::ifstream in(frontier);
        if (!in) throw ValidationError("missing report file \"" + frontier.string() + "\"");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            // cost,uncovered,covered_fraction,solution_file
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            const auto c3 = line.find(',', c2 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos || c3 == std::string::npos)
                throw ValidationError("malformed frontier row in \"" + frontier.string() + "\"");
            out << label << ',' << line.substr(0, c1) << ',' << line.substr(c2 + 1, c3 - c2 - 1)
                << '\n';
        }
    }
}

}  // namespace scplan
