#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "terra/scenario.hpp"
#include "terra/sweep.hpp"

using namespace terra;

TEST_CASE("every preset loads, validates and round-trips", "[scenario]") {
    for (const std::string& name : preset_names()) {
        INFO(name);
        Scenario sc = make_preset(name);
        CHECK(sc.name == name);
        CHECK_NOTHROW(validate(sc));

        nlohmann::ordered_json j = save_scenario(make_preset(name));
        Scenario back = load_scenario(j);
        nlohmann::ordered_json j2 = save_scenario(back);
        CHECK(j.dump(2) == j2.dump(2));
    }
}

TEST_CASE("round trip preserves the load-bearing fields", "[scenario]") {
    Scenario sc = make_preset("blockage_concrete");
    Scenario back = load_scenario(save_scenario(sc));
    CHECK(back.seed == sc.seed);
    CHECK(back.stations.size() == sc.stations.size());
    CHECK(back.stations[0].codebook.size() == sc.stations[0].codebook.size());
    CHECK(back.mobile_codebook.rows == sc.mobile_codebook.rows);
    CHECK(back.mobile_codebook.cols == sc.mobile_codebook.cols);
    CHECK(back.gr_availability == Catch::Approx(sc.gr_availability));
    CHECK(back.blockers.scripted_times == sc.blockers.scripted_times);
    CHECK(back.protocol.ref_window == sc.protocol.ref_window);
    CHECK(back.sim.horizon_s == Catch::Approx(sc.sim.horizon_s));
    CHECK(back.channel.gr_loss.lookup(10.0) == Catch::Approx(sc.channel.gr_loss.lookup(10.0)));
}

TEST_CASE("unknown keys are rejected with their json pointer path", "[scenario]") {
    nlohmann::ordered_json j = save_scenario(make_preset("blockage_concrete"));
    j["bogus"] = 1;
    try {
        load_scenario(j);
        FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("/bogus") != std::string::npos);
    }

    nlohmann::ordered_json j2 = save_scenario(make_preset("blockage_concrete"));
    j2["mobile"]["typo_field"] = true;
    try {
        load_scenario(j2);
        FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("/mobile/typo_field") != std::string::npos);
    }

    nlohmann::ordered_json j3 = save_scenario(make_preset("neighbor_handoff"));
    j3["stations"][1]["oops"] = 0;
    try {
        load_scenario(j3);
        FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("/stations/1/oops") != std::string::npos);
    }
}

TEST_CASE("schema tag is mandatory", "[scenario]") {
    nlohmann::ordered_json j = save_scenario(make_preset("blockage_concrete"));
    j.erase("schema");
    CHECK_THROWS_AS(load_scenario(j), ScenarioError);
    nlohmann::ordered_json j2 = save_scenario(make_preset("blockage_concrete"));
    j2["schema"] = "scenario_v999";
    CHECK_THROWS_AS(load_scenario(j2), ScenarioError);
}

TEST_CASE("unknown preset names fail loudly", "[scenario]") {
    CHECK_THROWS_AS(make_preset("not_a_preset"), ScenarioError);
}

TEST_CASE("presets cover both street materials", "[scenario]") {
    Scenario con = make_preset("blockage_concrete");
    Scenario gra = make_preset("blockage_gravel");
    // rougher ground reflects less energy
    CHECK(gra.channel.gr_loss.lookup(0.0) > con.channel.gr_loss.lookup(0.0));
    CHECK(con.channel.gr_loss.lookup(0.0) == Catch::Approx(6.0));
    CHECK(con.channel.gr_loss.lookup(10.0) == Catch::Approx(4.6));
    CHECK(con.channel.gr_loss.lookup(20.0) == Catch::Approx(4.05));
}

TEST_CASE("the tracking overhead preset runs at 28 GHz with planar panels", "[scenario]") {
    Scenario sc = make_preset("tracking_overhead_28ghz");
    CHECK(sc.channel.carrier_hz == Catch::Approx(28e9));
    CHECK(sc.mobile_codebook.rows == 32);
    CHECK(sc.mobile_codebook.cols == 32);
    CHECK(sc.mobile_codebook.geometry.kind == ArrayKind::Planar);
}
