#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "scplan/oracle.hpp"
#include "test_helpers.hpp"

using namespace scplan;
using scplan::test::oracle_problem;
using scplan::test::tiny_instance;

TEST_CASE("oracle: combination census", "[oracle]") {
    const auto p =
        build_problem(tiny_instance(40.0, 40.0, {{5.0, 5.0}, {15.0, 15.0}}, {{15.0, 5.0}}));
    const auto res = enumerate_frontier(p);
    CHECK(res.combinations_examined == 8);  // 2^(2+1)
    CHECK_FALSE(res.frontier.empty());
}

TEST_CASE("oracle: empty instance", "[oracle]") {
    const auto p = build_problem(tiny_instance(40.0, 40.0, {}, {}));
    const auto res = enumerate_frontier(p);
    REQUIRE(res.frontier.size() == 1);
    CHECK(res.frontier.entries[0].objective == ObjectiveVector{0.0, 16});
    CHECK(exact_eps_optimum(res, p, 100.0) == 16);
}

TEST_CASE("oracle: size guard refusal", "[oracle]") {
    const auto p = oracle_problem(3, 8, 3);
    CHECK_THROWS_AS(enumerate_frontier(p, 1024), std::invalid_argument);  // 2^11 > 2^10
    CHECK_NOTHROW(enumerate_frontier(p, 2048));
}

TEST_CASE("oracle: frontier entries are feasible and mutually nondominated", "[oracle]") {
    for (std::uint64_t seed : {5ULL, 6ULL, 7ULL}) {
        const auto p = oracle_problem(seed, 6, 2);
        const auto res = enumerate_frontier(p);
        for (std::size_t i = 0; i < res.frontier.size(); ++i) {
            const auto& e = res.frontier.entries[i];
            const auto rep = check_feasible(e.deployment, p);
            INFO((rep.ok ? std::string() : rep.violations.front().describe()));
            CHECK(rep.ok);
            CHECK(e.objective == evaluate(e.deployment, p));
            for (std::size_t j = 0; j < res.frontier.size(); ++j)
                if (i != j)
                    CHECK_FALSE(dominates(res.frontier.entries[j].objective, e.objective));
        }
    }
}

TEST_CASE("oracle: invariant under site permutation", "[oracle]") {
    auto inst = oracle_problem(11, 6, 2).instance;
    const auto base = enumerate_frontier(build_problem(inst));

    auto shuffled = inst;
    std::reverse(shuffled.sc_sites.begin(), shuffled.sc_sites.end());
    std::reverse(shuffled.ban_sites.begin(), shuffled.ban_sites.end());
    const auto perm = enumerate_frontier(build_problem(shuffled));

    REQUIRE(base.frontier.size() == perm.frontier.size());
    for (std::size_t i = 0; i < base.frontier.size(); ++i)
        CHECK(base.frontier.entries[i].objective == perm.frontier.entries[i].objective);
}

TEST_CASE("oracle: binding budgets change the frontier computation", "[oracle]") {
    // tiny capacities force the assignment-enumeration path
    InstanceDefaults defaults;
    defaults.radio.outage_max = 0.2;
    defaults.radio.backhaul_gain_db = 0.0;
    defaults.radio.backhaul_bandwidth_hz = 2e7;
    const auto inst = generate_instance({40.0, 40.0, 10.0}, 5, 2, 13, defaults);
    const auto p = build_problem(inst);
    bool binding = false;
    for (const auto& l : p.links.links)
        if (l.max_subareas < p.n_subareas()) binding = true;
    REQUIRE(binding);

    const auto res = enumerate_frontier(p);
    for (const auto& e : res.frontier.entries) {
        const auto rep = check_feasible(e.deployment, p);
        INFO((rep.ok ? std::string() : rep.violations.front().describe()));
        CHECK(rep.ok);
    }
}

TEST_CASE("oracle: relaxed optimum lower-bounds the capped optimum", "[oracle]") {
    std::mt19937_64 rng(31);
    int trials = 0;
    while (trials < 50) {
        const auto p = oracle_problem(3000 + trials, 5 + trials % 4, 2);
        const auto oracle = enumerate_frontier(p);
        std::vector<double> lf(p.n_ban()), lb(p.n_sc());
        for (auto& l : lf) l = static_cast<double>(rng_below(rng, 2000)) / 1000.0;
        for (auto& l : lb) l = static_cast<double>(rng_below(rng, 1500)) / 1000.0;
        const double cap = 5.0 + static_cast<double>(rng_below(rng, 30));

        const auto relaxed = exact_relaxed_optimum(p, lf, lb, cap);
        const long long eps_opt = exact_eps_optimum(oracle, p, cap);
        CHECK(relaxed.value <= static_cast<double>(eps_opt) + 1e-9);
        ++trials;
    }
}

TEST_CASE("oracle: relaxed optimum of a zero-site instance is the subarea count", "[oracle]") {
    const auto p = build_problem(tiny_instance(40.0, 40.0, {}, {}));
    const auto res = exact_relaxed_optimum(p, {}, {}, kNoCostCap);
    CHECK(res.value == 16.0);
}
