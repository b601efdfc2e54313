#include <catch2/catch_amalgamated.hpp>

#include "terra/channel.hpp"

using namespace terra;

namespace {
const Pose kBs{0, 0, 2.5, 0, 0};
const Pose kUe{6, 0, 1.0, 180, 0};

Codebook aimed(double az, double zen, double boresight_az, double boresight_zen) {
    ArrayGeometry g;
    g.elements_x = 12;
    double rel_az = wrap_deg(az - boresight_az);
    double rel_zen = zen - boresight_zen;
    return make_codebook(g, rel_az, rel_az, 1, rel_zen, rel_zen, 1);
}
} // namespace

TEST_CASE("free-space loss matches the closed form", "[channel]") {
    CHECK(fspl_db(6.0, 60e9) == Catch::Approx(83.5738).margin(1e-3));
    CHECK(fspl_db(12.0, 60e9) - fspl_db(6.0, 60e9) == Catch::Approx(6.0206).margin(1e-3));
    CHECK_THROWS_AS(fspl_db(0.0, 60e9), std::domain_error);
    CHECK_THROWS_AS(fspl_db(1.0, 0.0), std::domain_error);
}

TEST_CASE("direct path geometry for the street link", "[channel]") {
    PathComponent los = los_path(kBs, kUe);
    CHECK(los.length_m == Catch::Approx(6.184658).margin(1e-5));
    CHECK(los.depart_az_deg == Catch::Approx(0.0).margin(1e-12));
    CHECK(los.arrive_az_deg == Catch::Approx(180.0).margin(1e-12));
    CHECK(los.depart_zen_deg == Catch::Approx(14.0362).margin(1e-3));   // bs looks down
    CHECK(los.arrive_zen_deg == Catch::Approx(-14.0362).margin(1e-3));  // handset looks up
    CHECK(los.extra_loss_db == 0.0);
}

TEST_CASE("reflected path geometry for the street link", "[channel]") {
    PathComponent gr = ground_reflection_path(kBs, kUe);
    CHECK(gr.length_m == Catch::Approx(6.946222).margin(1e-5));
    CHECK(gr.depart_zen_deg == Catch::Approx(30.2564).margin(1e-3));
    CHECK(gr.arrive_zen_deg == Catch::Approx(30.2564).margin(1e-3));
    double bx = 0, by = 0;
    gr_bounce_point(kBs, kUe, bx, by);
    CHECK(bx == Catch::Approx(4.285714).margin(1e-5));
    CHECK(by == Catch::Approx(0.0).margin(1e-12));
    // table value minus the extra spreading loss the longer path pays
    CHECK(gr.extra_loss_db == Catch::Approx(6.0 - 1.008659).margin(1e-4));
}

TEST_CASE("blocker reach follows the similar-triangles bound", "[channel]") {
    CHECK(d_br_max(6.0, 2.5, 1.0, 1.78) == Catch::Approx(3.12).margin(1e-9));
    CHECK(d_br_max(6.0, 2.5, 1.0, 2.5) == Catch::Approx(6.0).margin(1e-9));
    CHECK(d_br_max(6.0, 2.5, 1.0, 1.0) == Catch::Approx(0.0).margin(1e-9));
    CHECK_THROWS_AS(d_br_max(6.0, 1.0, 1.0, 1.5), std::domain_error);
    CHECK_THROWS_AS(d_br_max(0.0, 2.5, 1.0, 1.5), std::domain_error);
}

TEST_CASE("reflection loss table interpolates and clamps", "[channel]") {
    GrLossTable t;
    CHECK(t.lookup(0.0) == Catch::Approx(6.0));
    CHECK(t.lookup(5.0) == Catch::Approx(5.3));
    CHECK(t.lookup(10.0) == Catch::Approx(4.6));
    CHECK(t.lookup(15.0) == Catch::Approx(4.325));
    CHECK(t.lookup(20.0) == Catch::Approx(4.05));
    CHECK(t.lookup(-3.0) == Catch::Approx(6.0));
    CHECK(t.lookup(35.0) == Catch::Approx(4.05));
}

TEST_CASE("pedestrians cut the direct ray only near the handset", "[channel]") {
    auto ped = [](double x) { return Blocker{x, 0.0, 1.78, 0.4}; };
    // the ray clears 1.78 m at 2.88 m from the base station
    CHECK_FALSE(any_blocks_los(kBs, kUe, {ped(2.0)}));
    CHECK(any_blocks_los(kBs, kUe, {ped(3.5)}));
    CHECK(any_blocks_los(kBs, kUe, {ped(5.5)}));
    // off-axis misses
    CHECK_FALSE(any_blocks_los(kBs, kUe, {Blocker{4.5, 0.8, 1.78, 0.4}}));
    CHECK(any_blocks_los(kBs, kUe, {Blocker{4.5, 0.1, 1.78, 0.4}}));
}

TEST_CASE("pedestrians cut the ground ray along its low sections", "[channel]") {
    auto ped = [](double x) { return Blocker{x, 0.0, 1.78, 0.4}; };
    // descending leg drops below 1.78 m from x = 1.234 on
    CHECK_FALSE(any_blocks_gr(kBs, kUe, {ped(1.0)}));
    CHECK(any_blocks_gr(kBs, kUe, {ped(2.0)}));   // ground ray cut, direct ray clear
    CHECK(any_blocks_gr(kBs, kUe, {ped(4.285)})); // at the bounce
    CHECK(any_blocks_gr(kBs, kUe, {ped(5.9)}));   // ascending leg near the handset
    CHECK_FALSE(any_blocks_gr(kBs, kUe, {Blocker{4.285, 0.9, 1.78, 0.4}}));
}

TEST_CASE("two-path rss combines by max power and clamps at the noise floor", "[channel]") {
    ChannelConfig cfg;
    PathComponent los = los_path(kBs, kUe);
    PathComponent gr = ground_reflection_path(kBs, kUe, cfg.gr_loss);
    Codebook tx = aimed(los.depart_az_deg, los.depart_zen_deg, 0, 0);
    Codebook rx = aimed(los.arrive_az_deg, los.arrive_zen_deg, 180, 0);
    cfg.system_loss_db = calibrate_system_loss(cfg, kBs, kUe, 17.0, 17.0, -60.0);

    PathRss r = rss_detail(cfg, kBs, kUe, tx, 0, rx, 0, {});
    CHECK(r.los_dbm == Catch::Approx(-60.0).margin(1e-6));
    CHECK(r.total_dbm == Catch::Approx(-60.0).margin(1e-6));
    CHECK(r.gr_dbm < r.los_dbm);

    // force the direct ray out: the reflected ray is weaker and misaligned
    PathRss blocked = rss_detail(cfg, kBs, kUe, tx, 0, rx, 0,
                                 {Blocker{4.5, 0.0, 1.78, 0.4}}, true, false);
    CHECK(blocked.los_dbm == Catch::Approx(-80.0).margin(1e-6));
    CHECK(blocked.total_dbm == Catch::Approx(cfg.noise_floor_dbm).margin(1e-9));

    // aligned reflected beams with the direct ray cut: table loss shows through
    Codebook txg = aimed(gr.depart_az_deg, gr.depart_zen_deg, 0, 0);
    Codebook rxg = aimed(gr.arrive_az_deg, gr.arrive_zen_deg, 180, 0);
    PathRss viagr = rss_detail(cfg, kBs, kUe, txg, 0, rxg, 0,
                                {Blocker{4.5, 0.0, 1.78, 0.4}}, false, true);
    CHECK(viagr.total_dbm == Catch::Approx(-66.0).margin(0.05));
}

TEST_CASE("forcing flags override the geometric occlusion", "[channel]") {
    ChannelConfig cfg;
    cfg.system_loss_db = calibrate_system_loss(cfg, kBs, kUe, 17.0, 17.0, -60.0);
    PathComponent gr = ground_reflection_path(kBs, kUe, cfg.gr_loss);
    Codebook txg = aimed(gr.depart_az_deg, gr.depart_zen_deg, 0, 0);
    Codebook rxg = aimed(gr.arrive_az_deg, gr.arrive_zen_deg, 180, 0);
    Blocker ped{4.5, 0.0, 1.78, 0.4}; // geometrically cuts both rays

    PathRss cleared = rss_detail(cfg, kBs, kUe, txg, 0, rxg, 0, {ped}, false, true);
    PathRss geom = rss_detail(cfg, kBs, kUe, txg, 0, rxg, 0, {ped});
    CHECK(cleared.gr_dbm - geom.gr_dbm == Catch::Approx(cfg.blockage_attenuation_db));
    // force_gr_blocked attenuates the reflected ray even with no blocker around
    PathRss forced = rss_detail(cfg, kBs, kUe, txg, 0, rxg, 0, {}, true, false);
    CHECK(cleared.gr_dbm - forced.gr_dbm == Catch::Approx(cfg.blockage_attenuation_db));
}

TEST_CASE("calibration pins the aligned direct-ray rss", "[channel]") {
    ChannelConfig cfg;
    double loss = calibrate_system_loss(cfg, kBs, kUe, 17.0, 17.0, -60.0);
    CHECK(loss == Catch::Approx(20.0 + 34.0 - 83.8371 + 60.0).margin(1e-3));
}
