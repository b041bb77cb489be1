#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "scplan/instance.hpp"
#include "scplan/instance_io.hpp"

using namespace scplan;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("subarea centers: row-major grid geometry", "[instance]") {
    const auto two = subarea_centers({20.0, 10.0, 10.0});
    REQUIRE(two.size() == 2);
    CHECK(two[0] == std::pair{5.0, 5.0});
    CHECK(two[1] == std::pair{15.0, 5.0});

    CHECK(subarea_centers({400.0, 400.0, 10.0}).size() == 1600);

    const auto one = subarea_centers({10.0, 10.0, 10.0});
    REQUIRE(one.size() == 1);
    CHECK(one[0] == std::pair{5.0, 5.0});
}

TEST_CASE("area invariants", "[instance]") {
    CHECK_THROWS_AS(subarea_centers({25.0, 10.0, 10.0}), ValidationError);
    CHECK_THROWS_AS(subarea_centers({0.0, 10.0, 10.0}), ValidationError);
    const AreaSpec a{40.0, 30.0, 10.0};
    CHECK(a.subarea_count() == 12);
    CHECK(a.subarea_area_m2() == 100.0);
}

TEST_CASE("generate: sites on distinct subarea centers", "[instance]") {
    const auto inst = generate_instance({400.0, 400.0, 10.0}, 30, 6, 7);
    CHECK(inst.area.subarea_count() == 1600);
    REQUIRE(inst.sc_sites.size() == 30);
    REQUIRE(inst.ban_sites.size() == 6);

    std::set<std::pair<double, double>> positions;
    std::set<int> ids;
    auto absorb = [&](const std::vector<Site>& sites) {
        for (const auto& s : sites) {
            positions.insert({s.x_m, s.y_m});
            ids.insert(s.id);
            // centers sit at half-odd multiples of the subarea side
            const double cx = s.x_m / 10.0 - 0.5;
            CHECK(cx == std::floor(cx));
        }
    };
    absorb(inst.sc_sites);
    absorb(inst.ban_sites);
    CHECK(positions.size() == 36);
    CHECK(ids.size() == 36);
    CHECK(inst.sc_sites[0].cost == 1.0);
    CHECK(inst.ban_sites[0].cost == 10.0);
}

TEST_CASE("generate: empty and oversized requests", "[instance]") {
    const auto empty = generate_instance({20.0, 20.0, 10.0}, 0, 0, 1);
    CHECK(empty.sc_sites.empty());
    CHECK(empty.ban_sites.empty());

    CHECK_THROWS_AS(generate_instance({20.0, 20.0, 10.0}, 4, 1, 1), ValidationError);
    CHECK_THROWS_AS(generate_instance({20.0, 20.0, 10.0}, -1, 0, 1), ValidationError);
}

TEST_CASE("generate: deterministic for a fixed seed", "[instance]") {
    const auto a = generate_instance({100.0, 100.0, 10.0}, 12, 3, 42);
    const auto b = generate_instance({100.0, 100.0, 10.0}, 12, 3, 42);
    CHECK(a == b);
    CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());
    const auto c = generate_instance({100.0, 100.0, 10.0}, 12, 3, 43);
    CHECK_FALSE(a == c);
}

TEST_CASE("save/load round trip", "[instance]") {
    const auto path = temp_path("scplan_roundtrip.json");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        const int n_sc = static_cast<int>(rng_below(rng, 10));
        const int n_ban = static_cast<int>(rng_below(rng, 4));
        auto inst = generate_instance({200.0, 100.0, 10.0}, n_sc, n_ban, seed);
        if (n_sc > 0 && n_ban > 0)
            inst.capacity_overrides.push_back(
                {inst.ban_sites[0].id, inst.sc_sites[0].id, 2.5e8});
        save_instance(inst, path);
        const auto loaded = load_instance(path);
        CHECK(loaded == inst);
    }
    std::filesystem::remove(path);
}

TEST_CASE("load: schema violations name the offending field", "[instance]") {
    const auto inst = generate_instance({40.0, 40.0, 10.0}, 3, 1, 5);
    auto j = instance_to_json(inst);
    j.erase("nb_max");
    try {
        instance_from_json(j);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("nb_max") != std::string::npos);
    }

    auto j2 = instance_to_json(inst);
    j2["sc_sites"][0]["x"] = 500.0;  // outside a 40x40 area
    CHECK_THROWS_AS(instance_from_json(j2), ValidationError);

    auto j3 = instance_to_json(inst);
    j3["users"]["block_prob_max"] = 1.5;
    CHECK_THROWS_AS(instance_from_json(j3), ValidationError);

    auto j4 = instance_to_json(inst);
    j4["ban_sites"][0]["id"] = inst.sc_sites[0].id;  // duplicate id
    CHECK_THROWS_AS(instance_from_json(j4), ValidationError);
}

TEST_CASE("load: missing file", "[instance]") {
    CHECK_THROWS_AS(load_instance("/nonexistent/scplan.json"), ValidationError);
}
