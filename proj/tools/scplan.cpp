// scplan: generate deployment instances, sweep the cost/coverage frontier,
// and export plot-ready frontier data.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scplan/driver.hpp"
#include "scplan/instance_io.hpp"
#include "scplan/oracle.hpp"
#include "scplan/report_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

bool parse_area(const std::string& text, double& w, double& h) {
    const auto x = text.find('x');
    if (x == std::string::npos) return false;
    try {
        w = std::stod(text.substr(0, x));
        h = std::stod(text.substr(x + 1));
    } catch (...) {
        return false;
    }
    return true;
}

std::string join_args(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) {
        if (i) os << ' ';
        os << argv[i];
    }
    return os.str();
}

void print_instance_summary(const scplan::Problem& p) {
    const auto& inst = p.instance;
    std::printf("area: %gx%g m, subarea %g m -> %lld subareas\n", inst.area.width_m,
                inst.area.height_m, inst.area.subarea_side_m, p.n_subareas());
    std::printf("candidates: %d SCBS, %d BAN (nb_max=%d)\n", p.n_sc(), p.n_ban(), inst.nb_max);
    std::printf("coverage radius: access %.1f m, backhaul %.1f m\n",
                p.links.sc_access_range_m.empty() ? 0.0 : p.links.sc_access_range_m[0],
                p.links.backhaul_range_m);
    long long n_links = static_cast<long long>(p.links.links.size());
    long long budget_min = 0, budget_max = 0;
    double budget_sum = 0.0;
    for (const auto& l : p.links.links) {
        if (budget_min == 0 || l.max_subareas < budget_min) budget_min = l.max_subareas;
        budget_max = std::max(budget_max, l.max_subareas);
        budget_sum += static_cast<double>(l.max_subareas);
    }
    int unreachable = 0;
    for (int i = 0; i < p.n_sc(); ++i)
        if (p.links.sc_links[i].empty()) ++unreachable;
    std::printf("backhaul links: %lld", n_links);
    if (n_links > 0)
        std::printf(" (budget min/mean/max = %lld/%.1f/%lld subareas)", budget_min,
                    budget_sum / static_cast<double>(n_links), budget_max);
    std::printf("\n");
    if (unreachable > 0) std::printf("SCBS candidates without any BAN in range: %d\n", unreachable);
}

int run(int argc, char** argv) {
    CLI::App app{"joint small-cell and wireless-backhaul deployment planner"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    std::string gen_area = "400x400";
    double gen_side = 10.0;
    int gen_sc = 30, gen_ban = 6;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "instance.json";
    scplan::InstanceDefaults defaults;
    gen->add_option("--area", gen_area, "area as WIDTHxHEIGHT in meters")->capture_default_str();
    gen->add_option("--side", gen_side, "subarea side in meters")->capture_default_str();
    gen->add_option("--sc", gen_sc, "number of SCBS candidate sites")->capture_default_str();
    gen->add_option("--ban", gen_ban, "number of BAN candidate sites")->capture_default_str();
    gen->add_option("--seed", gen_seed, "RNG seed")->capture_default_str();
    gen->add_option("-o,--out", gen_out, "output instance file")->capture_default_str();
    gen->add_option("--sc-cost", defaults.sc_cost, "SCBS deployment cost")->capture_default_str();
    gen->add_option("--ban-cost", defaults.ban_cost, "BAN deployment cost")->capture_default_str();
    gen->add_option("--nb", defaults.nb_max, "SCBSs servable by one BAN")->capture_default_str();
    gen->add_option("--poa", defaults.radio.outage_max, "outage probability cap")
        ->capture_default_str();
    gen->add_option("--pbb", defaults.users.block_prob_max, "blocking probability cap")
        ->capture_default_str();
    gen->add_option("--density", defaults.users.density_per_m2, "user density per m^2")
        ->capture_default_str();
    gen->add_option("--rate", defaults.users.rate_demand_bps, "per-user rate demand in bit/s")
        ->capture_default_str();
    gen->add_option("--backhaul-bw", defaults.radio.backhaul_bandwidth_hz,
                    "backhaul bandwidth in Hz")
        ->capture_default_str();
    gen->add_option("--backhaul-gain", defaults.radio.backhaul_gain_db,
                    "combined backhaul antenna gain in dB")
        ->capture_default_str();

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "compute the cost/coverage frontier");
    std::string solve_instance, solve_out = "report";
    std::string baseline;
    bool oracle_check = false;
    std::uint64_t oracle_guard = 1ULL << 20;
    scplan::SolverConfig config;
    solve->add_option("-i,--instance", solve_instance, "instance file")->required();
    solve->add_option("-o,--out", solve_out, "report directory")->capture_default_str();
    solve->add_option("--seed", config.seed, "RNG seed")->capture_default_str();
    solve->add_option("--threads", config.tabu.threads, "candidate evaluation workers")
        ->capture_default_str();
    solve->add_option("--delta-c", config.delta_c, "cost cap decrement (0 = auto)")
        ->capture_default_str();
    solve->add_option("--delta-eps", config.delta_eps, "harvest window width (0 = auto)")
        ->capture_default_str();
    solve->add_option("--rounds", config.lagrange_rounds, "Lagrangian rounds per cost cap")
        ->capture_default_str();
    solve->add_option("--tabu-iters", config.tabu.max_iters, "tabu iterations per search")
        ->capture_default_str();
    solve->add_option("--outer", config.outer_iters, "BAN-level iterations")
        ->capture_default_str();
    solve->add_option("--inner", config.inner_iters, "SCBS-level iterations per outer round")
        ->capture_default_str();
    solve->add_option("--swaps", config.tabu.swap_samples, "swap moves sampled per neighborhood")
        ->capture_default_str();
    solve->add_option("--tdiv", config.tabu.stall_before_diversify,
                      "stall iterations before diversification")
        ->capture_default_str();
    solve->add_option("--ndiv", config.tabu.diversify_opens, "sites opened per diversification")
        ->capture_default_str();
    solve->add_option("--tenure", config.tabu.tenure, "tabu tenure (0 = auto)")
        ->capture_default_str();
    solve->add_option("--alpha0", config.alpha0, "initial subgradient step scale")
        ->capture_default_str();
    solve->add_option("--patience", config.patience, "rounds before the step scale halves")
        ->capture_default_str();
    solve->add_option("--eps-min", config.eps_min, "stop the sweep at this cost cap")
        ->capture_default_str();
    solve->add_flag_callback("--no-warm", [&] { config.warm_start = false; },
                             "reset multipliers and counters at every cost cap");
    solve->add_option("--baseline", baseline, "run a comparator instead ('single-tabu')");
    solve->add_flag("--oracle-check", oracle_check,
                    "verify the frontier against exhaustive enumeration (small instances)");
    solve->add_option("--oracle-guard", oracle_guard, "max (y,z) combinations for the check")
        ->capture_default_str();

    // ---- frontier-plotdata ----
    auto* plot = app.add_subcommand("frontier-plotdata", "merge report frontiers into one CSV");
    std::vector<std::string> plot_reports;
    std::vector<std::string> plot_labels;
    std::string plot_out = "plotdata.csv";
    plot->add_option("reports", plot_reports, "report directories")->required();
    plot->add_option("--labels", plot_labels, "series label per report");
    plot->add_option("-o,--out", plot_out, "output CSV")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (gen->parsed()) {
        scplan::AreaSpec area;
        if (!parse_area(gen_area, area.width_m, area.height_m)) {
            std::fprintf(stderr, "error: --area expects WIDTHxHEIGHT, got \"%s\"\n",
                         gen_area.c_str());
            return kExitUsage;
        }
        area.subarea_side_m = gen_side;
        if (gen_sc < 0 || gen_ban < 0) {
            std::fprintf(stderr, "error: site counts must be nonnegative\n");
            return kExitUsage;
        }
        const auto inst = scplan::generate_instance(area, gen_sc, gen_ban, gen_seed, defaults);
        scplan::save_instance(inst, gen_out);
        const auto problem = scplan::build_problem(inst);
        std::printf("wrote %s\n", gen_out.c_str());
        print_instance_summary(problem);
        return kExitOk;
    }

    if (solve->parsed()) {
        const auto inst = scplan::load_instance(solve_instance);
        const auto problem = scplan::build_problem(inst);
        scplan::SolverReport report;
        if (baseline.empty()) {
            report = scplan::solve(problem, config);
        } else if (baseline == "single-tabu") {
            report = scplan::solve_single_tabu(problem, config);
        } else {
            std::fprintf(stderr, "error: unknown baseline \"%s\"\n", baseline.c_str());
            return kExitUsage;
        }
        scplan::write_report(solve_out, report, problem, join_args(argc, argv), solve_instance);
        std::printf("frontier: %zu points, %zu cost caps, %.2f s\n",
                    report.frontier.size(), report.cost_caps.size(), report.wall_seconds);
        std::printf("report written to %s\n", solve_out.c_str());

        if (oracle_check) {
            const auto oracle = scplan::enumerate_frontier(problem, oracle_guard);
            const auto& got = report.frontier.entries;
            const auto& want = oracle.frontier.entries;
            bool equal = got.size() == want.size();
            if (equal)
                for (std::size_t i = 0; i < got.size(); ++i)
                    if (!(got[i].objective == want[i].objective)) equal = false;
            if (!equal) {
                std::fprintf(stderr,
                             "oracle-check: frontier mismatch (%zu points vs %zu exact)\n",
                             got.size(), want.size());
                return kExitValidation;
            }
            std::printf("oracle-check: frontier matches the exhaustive enumeration (%llu "
                        "combinations)\n",
                        static_cast<unsigned long long>(oracle.combinations_examined));
        }
        return kExitOk;
    }

    if (plot->parsed()) {
        scplan::write_plotdata(plot_out, plot_reports, plot_labels);
        std::printf("wrote %s\n", plot_out.c_str());
        return kExitOk;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const scplan::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
}
