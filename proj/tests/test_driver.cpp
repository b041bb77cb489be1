#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "scplan/driver.hpp"
#include "scplan/report_io.hpp"
#include "test_helpers.hpp"

using namespace scplan;
using scplan::test::oracle_problem;
using scplan::test::tiny_instance;

namespace {

// quick configuration for oracle-sized instances
SolverConfig small_config(std::uint64_t seed) {
    SolverConfig c;
    c.seed = seed;
    c.lagrange_rounds = 2;
    c.tabu.max_iters = 80;
    c.tabu.stall_before_diversify = 12;
    c.tabu.swap_samples = 20;
    c.outer_iters = 6;
    c.inner_iters = 12;
    return c;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("update_epsilon: adaptive decrement", "[driver]") {
    Deployment dummy;
    ParetoArchive harvest;
    harvest.insert({23.0, 40}, dummy);
    harvest.insert({27.0, 35}, dummy);
    CHECK(update_epsilon(30.0, harvest, 1.0) == 22.0);

    ParetoArchive at_cap;
    at_cap.insert({30.0, 12}, dummy);
    CHECK(update_epsilon(30.0, at_cap, 1.0) == 29.0);

    CHECK(update_epsilon(5.0, ParetoArchive{}, 1.0) == 4.0);
    CHECK_THROWS_AS(update_epsilon(5.0, ParetoArchive{}, 0.0), std::invalid_argument);
}

TEST_CASE("solve: zero-site instance", "[driver]") {
    const auto p = build_problem(tiny_instance(40.0, 40.0, {}, {}));
    const auto report = solve(p, small_config(1));
    REQUIRE(report.frontier.size() == 1);
    CHECK(report.frontier.entries[0].objective == ObjectiveVector{0.0, 16});
    CHECK(report.cost_caps.size() == 1);
}

TEST_CASE("solve: invalid configuration fails before any work", "[driver]") {
    const auto p = oracle_problem(2, 4, 2);
    auto c = small_config(1);
    c.delta_c = -1.0;
    CHECK_THROWS_AS(solve(p, c), ValidationError);
    c = small_config(1);
    c.alpha0 = 0.0;
    CHECK_THROWS_AS(solve(p, c), ValidationError);
    c = small_config(1);
    c.tabu.threads = 0;
    CHECK_THROWS_AS(solve(p, c), ValidationError);
}

TEST_CASE("solve: cap sweep and report structure", "[driver]") {
    const auto p = oracle_problem(5, 6, 2);
    const auto report = solve(p, small_config(3));

    // caps strictly decreasing, spaced by at least delta_c, bounded count
    REQUIRE_FALSE(report.cost_caps.empty());
    CHECK(report.cost_caps.front() == p.total_cost());
    for (std::size_t i = 1; i < report.cost_caps.size(); ++i)
        CHECK(report.cost_caps[i] <= report.cost_caps[i - 1] - report.delta_c + 1e-12);
    CHECK(report.cost_caps.size() <=
          static_cast<std::size_t>(std::ceil(p.total_cost() / report.delta_c)) + 1);
    CHECK(report.lower_bounds.size() == report.cost_caps.size());

    // frontier: mutually nondominated, feasible, anchored at the empty solution
    REQUIRE_FALSE(report.frontier.empty());
    for (std::size_t i = 1; i < report.frontier.size(); ++i) {
        CHECK(report.frontier.entries[i - 1].objective.cost <
              report.frontier.entries[i].objective.cost);
        CHECK(report.frontier.entries[i - 1].objective.uncovered >
              report.frontier.entries[i].objective.uncovered);
    }
    for (const auto& e : report.frontier.entries) {
        CHECK(check_feasible(e.deployment, p).ok);
        CHECK(e.objective == evaluate(e.deployment, p));
        CHECK(e.objective.cost <= p.total_cost());
    }
    CHECK(report.frontier.entries[0].objective.cost == 0.0);

    // traces: within each cap the tracked bound is a running maximum
    for (std::size_t t = 1; t < report.traces.size(); ++t) {
        const auto& prev = report.traces[t - 1];
        const auto& cur = report.traces[t];
        if (prev.eps == cur.eps) CHECK(cur.lower_bound >= prev.lower_bound - 1e-12);
    }
    CHECK(report.bounds_heuristic);
}

TEST_CASE("solve: deterministic replay, byte-identical CSVs", "[driver]") {
    const auto p = oracle_problem(7, 5, 2);
    const auto a = solve(p, small_config(11));
    const auto b = solve(p, small_config(11));
    REQUIRE(a.frontier.size() == b.frontier.size());
    for (std::size_t i = 0; i < a.frontier.size(); ++i)
        CHECK(a.frontier.entries[i].objective == b.frontier.entries[i].objective);

    namespace fs = std::filesystem;
    const auto dir_a = fs::temp_directory_path() / "scplan_rep_a";
    const auto dir_b = fs::temp_directory_path() / "scplan_rep_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    write_report(dir_a.string(), a, p, "test", "");
    write_report(dir_b.string(), b, p, "test", "");
    CHECK(read_file(dir_a / "frontier.csv") == read_file(dir_b / "frontier.csv"));
    CHECK(read_file(dir_a / "bounds.csv") == read_file(dir_b / "bounds.csv"));
    CHECK(read_file(dir_a / "caps.csv") == read_file(dir_b / "caps.csv"));
    CHECK_FALSE(read_file(dir_a / "frontier.csv").empty());
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("solve: matches the oracle on small instances", "[driver][search]") {
    int equal = 0;
    const int n_instances = 6;
    for (int t = 0; t < n_instances; ++t) {
        const auto p = oracle_problem(4000 + t, 5 + t % 3, 2);
        const auto report = solve(p, small_config(40 + t));
        const auto oracle = enumerate_frontier(p);
        bool same = report.frontier.size() == oracle.frontier.size();
        if (same)
            for (std::size_t i = 0; i < report.frontier.size(); ++i)
                same &= report.frontier.entries[i].objective ==
                        oracle.frontier.entries[i].objective;
        equal += same ? 1 : 0;
        // the solver must never claim a point the oracle beats
        for (const auto& e : report.frontier.entries)
            for (const auto& o : oracle.frontier.entries)
                CHECK_FALSE(dominates(o.objective, e.objective));
    }
    INFO("exact frontiers: " << equal << "/" << n_instances);
    CHECK(equal >= n_instances - 1);
}

TEST_CASE("solve: eps_min stops the sweep early", "[driver]") {
    const auto p = oracle_problem(9, 6, 2);
    auto c = small_config(5);
    c.eps_min = 0.6 * p.total_cost();
    const auto report = solve(p, c);
    for (double cap : report.cost_caps) CHECK(cap > c.eps_min);
    // the last recorded cap could not have spawned a successor above the floor
    CHECK(report.cost_caps.back() > c.eps_min);
}

TEST_CASE("solve: cold starts reset multipliers each cap", "[driver]") {
    const auto p = oracle_problem(13, 5, 2);
    auto c = small_config(17);
    c.warm_start = false;
    const auto report = solve(p, c);
    // every cap's first round starts from zero multipliers
    for (const auto& tr : report.traces) {
        if (tr.round != 0) continue;
        for (double l : tr.lambda_fanout) CHECK(l == 0.0);
        for (double l : tr.lambda_budget) CHECK(l == 0.0);
    }
}

TEST_CASE("single-tabu baseline: feasible nondominated frontier", "[driver]") {
    const auto p = oracle_problem(15, 6, 2);
    auto c = small_config(19);
    c.tabu.max_iters = 60;
    const auto report = solve_single_tabu(p, c);
    REQUIRE_FALSE(report.frontier.empty());
    for (const auto& e : report.frontier.entries) CHECK(check_feasible(e.deployment, p).ok);
    for (std::size_t i = 1; i < report.frontier.size(); ++i)
        CHECK(report.frontier.entries[i - 1].objective.cost <
              report.frontier.entries[i].objective.cost);
    CHECK(report.cost_caps.front() == p.total_cost());
}
