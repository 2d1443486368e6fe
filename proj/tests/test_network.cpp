#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include <json.hpp>

#include "aam/network.hpp"
#include "aam/rng.hpp"
#include "test_support.hpp"

using namespace aam;
using nlohmann::json;

namespace {

json base_time() {
    return {{"horizon_periods", 3}, {"period_seconds", 3600}, {"llp_frames_per_day", 8}, {"days", 3}};
}

json vert(const std::string& id, bool busy = false) {
    return {{"id", id},
            {"dep_capacity", 12},
            {"arr_capacity", 12},
            {"base_landing_fee", {4.0, 4.0, 4.0}},
            {"busy", busy}};
}

/// Seven vertiports, three paths for each of the 42 ordered OD pairs.
std::string seven_vertiport_doc() {
    json doc;
    doc["time"] = base_time();
    doc["vertiports"] = json::array();
    for (int i = 1; i <= 7; ++i) doc["vertiports"].push_back(vert("V" + std::to_string(i), i <= 3));
    doc["sectors"] = {{{"id", "C1"}, {"capacity", 2}}, {{"id", "C2"}, {"capacity", 2}},
                      {{"id", "R1"}, {"capacity", 6}}, {{"id", "R2"}, {"capacity", 6}},
                      {{"id", "O1"}, {"capacity", 10}}};
    doc["paths"] = json::array();
    for (int i = 1; i <= 7; ++i) {
        for (int j = 1; j <= 7; ++j) {
            if (i == j) continue;
            const std::string od = "V" + std::to_string(i) + "V" + std::to_string(j);
            const std::string core = (i + j) % 2 == 0 ? "C1" : "C2";
            const std::string ring = (i + j) % 2 == 0 ? "R1" : "R2";
            doc["paths"].push_back({{"id", od + "d"},
                                    {"origin", "V" + std::to_string(i)},
                                    {"destination", "V" + std::to_string(j)},
                                    {"travel_time", 600},
                                    {"base_cost", 10.0},
                                    {"sector_offsets", {{core, 0}}}});
            doc["paths"].push_back({{"id", od + "r"},
                                    {"origin", "V" + std::to_string(i)},
                                    {"destination", "V" + std::to_string(j)},
                                    {"travel_time", 840},
                                    {"base_cost", 16.0},
                                    {"sector_offsets", {{ring, 0}}}});
            doc["paths"].push_back({{"id", od + "o"},
                                    {"origin", "V" + std::to_string(i)},
                                    {"destination", "V" + std::to_string(j)},
                                    {"travel_time", 1080},
                                    {"base_cost", 22.0},
                                    {"sector_offsets", {{"O1", 0}}}});
        }
    }
    return doc.dump();
}

}  // namespace

TEST_CASE("seven vertiports with three paths per OD pair load as 126 paths") {
    NetworkModel net = load_network(seven_vertiport_doc());
    CHECK(net.paths().size() == 126);
    CHECK(net.vertiports().size() == 7);
    CHECK(net.od_pairs().size() == 42);
    for (const auto& [o, d] : net.od_pairs()) CHECK(net.paths_for_od(o, d).size() == 3);
}

TEST_CASE("minimal two-vertiport network: sectors off the path have no flights") {
    json doc;
    doc["time"] = base_time();
    doc["vertiports"] = {vert("A"), vert("B")};
    doc["sectors"] = {{{"id", "S1"}, {"capacity", 1}}, {{"id", "S2"}, {"capacity", 1}}};
    doc["paths"] = {{{"id", "AB"},
                     {"origin", "A"},
                     {"destination", "B"},
                     {"travel_time", 300},
                     {"base_cost", 5.0},
                     {"sector_offsets", {{"S1", 0}}}}};
    NetworkModel net = load_network(doc.dump());
    CHECK(flights_through_sector(net, "S1") == std::vector<std::string>{"AB"});
    CHECK(flights_through_sector(net, "S2").empty());
}

TEST_CASE("undefined sector reference is reported by id") {
    json doc;
    doc["time"] = base_time();
    doc["vertiports"] = {vert("A"), vert("B")};
    doc["sectors"] = {{{"id", "S1"}, {"capacity", 1}}};
    doc["paths"] = {{{"id", "AB"},
                     {"origin", "A"},
                     {"destination", "B"},
                     {"travel_time", 300},
                     {"base_cost", 5.0},
                     {"sector_offsets", {{"S9", 0}}}}};
    try {
        load_network(doc.dump());
        FAIL("expected a load error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("S9") != std::string::npos);
    }
}

TEST_CASE("validation rejects bad capacities, loops, unknown ids and fee lengths") {
    json ok;
    ok["time"] = base_time();
    ok["vertiports"] = {vert("A"), vert("B")};
    ok["sectors"] = {{{"id", "S1"}, {"capacity", 1}}};
    ok["paths"] = {{{"id", "AB"},
                    {"origin", "A"},
                    {"destination", "B"},
                    {"travel_time", 300},
                    {"base_cost", 5.0},
                    {"sector_offsets", {{"S1", 0}}}}};
    CHECK_NOTHROW(load_network(ok.dump()));

    json bad = ok;
    bad["vertiports"][0]["dep_capacity"] = 0;
    CHECK_THROWS_AS(load_network(bad.dump()), ConfigError);

    bad = ok;
    bad["paths"][0]["destination"] = "A";
    CHECK_THROWS_AS(load_network(bad.dump()), ConfigError);

    bad = ok;
    bad["paths"][0]["origin"] = "Zed";
    try {
        load_network(bad.dump());
        FAIL("expected a load error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("Zed") != std::string::npos);
    }

    bad = ok;
    bad["vertiports"][0]["base_landing_fee"] = {4.0};
    CHECK_THROWS_AS(load_network(bad.dump()), ConfigError);

    bad = ok;
    bad["paths"][0]["sector_offsets"] = {{"S1", 100}, {"S1", 50}};
    CHECK_THROWS_AS(load_network(bad.dump()), ConfigError);
}

TEST_CASE("flights_through_sector matches a brute-force scan on a random network") {
    Rng rng(321);
    json doc;
    doc["time"] = base_time();
    doc["vertiports"] = json::array();
    for (int i = 0; i < 5; ++i) doc["vertiports"].push_back(vert("V" + std::to_string(i)));
    doc["sectors"] = json::array();
    for (int s = 0; s < 6; ++s)
        doc["sectors"].push_back({{"id", "S" + std::to_string(s)}, {"capacity", 2}});
    doc["paths"] = json::array();
    for (int p = 0; p < 20; ++p) {
        const int o = static_cast<int>(rng.below(5));
        int d = static_cast<int>(rng.below(5));
        if (d == o) d = (d + 1) % 5;
        json offsets = json::array();
        double off = 0.0;
        std::set<int> used;
        const int n_sectors = static_cast<int>(rng.below(3));
        for (int k = 0; k < n_sectors; ++k) {
            int s = static_cast<int>(rng.below(6));
            if (used.count(s)) continue;
            used.insert(s);
            offsets.push_back({"S" + std::to_string(s), off});
            off += 100.0 + static_cast<double>(rng.below(100));
        }
        doc["paths"].push_back({{"id", "P" + std::to_string(p)},
                                {"origin", "V" + std::to_string(o)},
                                {"destination", "V" + std::to_string(d)},
                                {"travel_time", 600.0 + off},
                                {"base_cost", 5.0},
                                {"sector_offsets", offsets}});
    }
    NetworkModel net = load_network(doc.dump());
    for (int s = 0; s < 6; ++s) {
        const std::string sid = "S" + std::to_string(s);
        std::set<std::string> expect;
        for (const auto& p : net.paths())
            for (const auto& [id, _] : p.sector_offsets)
                if (id == sid) expect.insert(p.id);
        const auto got = flights_through_sector(net, sid);
        CHECK(std::set<std::string>(got.begin(), got.end()) == expect);
    }
    CHECK_THROWS_AS(flights_through_sector(net, "S99"), ConfigError);
}

TEST_CASE("index construction is idempotent") {
    NetworkModel net = load_network(seven_vertiport_doc());
    const auto before = net.od_pairs();
    const auto paths_before = flights_through_sector(net, "C1");
    net.rebuild_indices();
    CHECK(net.od_pairs() == before);
    CHECK(flights_through_sector(net, "C1") == paths_before);
}

TEST_CASE("sector windows stay inside the frame for feasible departures") {
    NetworkModel net = testsupport::make_mini_network();
    const double frame = net.time().frame_seconds();
    Rng rng(5);
    for (int iter = 0; iter < 200; ++iter) {
        const Path& p = net.paths()[rng.below(net.paths().size())];
        const double dep = rng.uniform(0.0, frame - p.travel_time);
        for (const auto& [sid, enter, exit] : net.sector_windows(p)) {
            CHECK(dep + enter >= 0.0);
            CHECK(dep + exit <= frame + 1e-9);
            CHECK(enter < exit);
        }
    }
}
