#include <catch2/catch_amalgamated.hpp>

#include "terra/mobility.hpp"

using namespace terra;

TEST_CASE("static model stays put", "[mobility]") {
    MobilityModel m;
    m.kind = MobilityKind::Static;
    m.start = Pose{1, 2, 1.5, 90, 0};
    MobilitySampler s(m);
    Pose p = s.at(123.4);
    CHECK(p.x == 1.0);
    CHECK(p.y == 2.0);
    CHECK(p.boresight_az_deg == 90.0);
}

TEST_CASE("linear walk advances along the heading and clamps", "[mobility]") {
    MobilityModel m;
    m.kind = MobilityKind::LinearWalk;
    m.start = Pose{0, 0, 1, 0, 0};
    m.speed_mps = 2.0;
    m.heading_deg = 90.0;
    m.trajectory_length_m = 3.0;
    MobilitySampler s(m);
    CHECK(s.at(0.5).y == Catch::Approx(1.0));
    CHECK(s.at(0.5).x == Catch::Approx(0.0).margin(1e-12));
    CHECK(s.at(10.0).y == Catch::Approx(3.0)); // end of the track
    CHECK(s.at(0.75).boresight_az_deg == 0.0); // boresight untouched
}

TEST_CASE("rotational sweep bounces between the sector edges", "[mobility]") {
    MobilityModel m;
    m.kind = MobilityKind::Rotational;
    m.start = Pose{0, 0, 1, 135, 0};
    m.angular_velocity_dps = 45.0;
    m.sector_lo_deg = 135.0;
    m.sector_hi_deg = 225.0;
    MobilitySampler s(m);
    CHECK(s.at(0.0).boresight_az_deg == Catch::Approx(135.0));
    CHECK(s.at(1.0).boresight_az_deg == Catch::Approx(180.0));
    CHECK(s.at(2.0).boresight_az_deg == Catch::Approx(225.0));
    CHECK(s.at(3.0).boresight_az_deg == Catch::Approx(180.0)); // reversed
    CHECK(s.at(4.0).boresight_az_deg == Catch::Approx(135.0));
    CHECK(s.at(5.0).boresight_az_deg == Catch::Approx(180.0));
    // start clamped into the sector
    m.start.boresight_az_deg = 0.0;
    MobilitySampler s2(m);
    CHECK(s2.at(0.0).boresight_az_deg == Catch::Approx(135.0));
}

TEST_CASE("free walk stays inside its rectangle and is deterministic", "[mobility]") {
    MobilityModel m;
    m.kind = MobilityKind::FreeWalk;
    m.start = Pose{12, 0, 2.5, 180, 0};
    m.speed_mps = 1.0;
    m.bounds = {11.0, -1.0, 13.0, 1.0};
    m.jitter_amplitude_deg = 10.0;
    m.seed = 42;
    MobilitySampler a(m);
    for (double t = 0; t < 30.0; t += 0.37) {
        Pose p = a.at(t);
        CHECK(p.x >= 11.0 - 1e-9);
        CHECK(p.x <= 13.0 + 1e-9);
        CHECK(p.y >= -1.0 - 1e-9);
        CHECK(p.y <= 1.0 + 1e-9);
    }
    // query order must not change the trajectory
    MobilitySampler fwd(m), rev(m);
    rev.at(20.0);
    for (double t : {3.3, 7.7, 11.1}) {
        Pose p = fwd.at(t), q = rev.at(t);
        CHECK(p.x == Catch::Approx(q.x).margin(1e-12));
        CHECK(p.y == Catch::Approx(q.y).margin(1e-12));
        CHECK(p.boresight_az_deg == Catch::Approx(q.boresight_az_deg).margin(1e-12));
    }
    // a different seed walks a different path
    MobilityModel m2 = m;
    m2.seed = 43;
    MobilitySampler b(m2);
    bool differs = false;
    for (double t : {5.0, 10.0, 15.0})
        if (std::abs(a.at(t).x - b.at(t).x) > 1e-6) differs = true;
    CHECK(differs);
}

TEST_CASE("free walk boresight jitter respects amplitude and slew caps", "[mobility]") {
    MobilityModel m;
    m.kind = MobilityKind::FreeWalk;
    m.start = Pose{12, 0, 2.5, 180, 0};
    m.speed_mps = 1.0;
    m.bounds = {11.0, -1.0, 13.0, 1.0};
    m.jitter_amplitude_deg = 10.0;
    m.seed = 7;
    MobilitySampler s(m);
    double dt = 0.01;
    int interior = 0;
    for (double t = dt; t + dt < 20.0; t += dt) {
        Pose a = s.at(t - dt), b = s.at(t), c = s.at(t + dt);
        double dir_ab = rad2deg(std::atan2(b.y - a.y, b.x - a.x));
        double dir_bc = rad2deg(std::atan2(c.y - b.y, c.x - b.x));
        // constant motion direction means both steps sit inside one segment,
        // where the boresight is heading + slew-limited jitter
        if (std::abs(wrap_deg(dir_ab - dir_bc)) > 1e-6) continue;
        interior++;
        double step = std::abs(wrap_deg(c.boresight_az_deg - b.boresight_az_deg));
        CHECK(step <= m.jitter_rate_cap_dps * dt + 1e-6);
        double jit = std::abs(wrap_deg(b.boresight_az_deg - dir_ab));
        CHECK(jit <= m.jitter_amplitude_deg + 1e-6);
    }
    CHECK(interior > 1000);
}

TEST_CASE("model validation rejects bad setups", "[mobility]") {
    MobilityModel m;
    m.kind = MobilityKind::FreeWalk;
    m.bounds = {0, 0, 0, 0};
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m.kind = MobilityKind::Rotational;
    m.sector_lo_deg = 10;
    m.sector_hi_deg = 10;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
}

TEST_CASE("scripted blockers appear at their times and cross the line", "[mobility]") {
    BlockerProcess p;
    p.scripted_times = {1.0, 4.0};
    p.duration_mean_s = 0.5;
    p.duration_jitter = 0.0;
    p.crossing_speed_mps = 1.0;
    p.line_x0 = 4.5;
    p.line_y0 = -0.75;
    p.line_x1 = 4.5;
    p.line_y1 = 0.75;
    p.seed = 3;
    BlockerSampler s(p);
    CHECK(s.at(0.5).empty());
    auto mid = s.at(1.25); // event midpoint: centered on the line midpoint
    REQUIRE(mid.size() == 1);
    CHECK(mid[0].x == Catch::Approx(4.5));
    CHECK(mid[0].y == Catch::Approx(0.0).margin(1e-12));
    auto early = s.at(1.05);
    REQUIRE(early.size() == 1);
    CHECK(early[0].y == Catch::Approx(-0.2).margin(1e-9));
    CHECK(s.at(1.6).empty());
    CHECK(s.at(4.1).size() == 1);
    CHECK(s.event_at(1.2) == 0);
    CHECK(s.event_at(4.2) == 1);
    CHECK(s.event_at(3.0) == -1);
    CHECK(s.events_before(5.0) == 2);
}

TEST_CASE("poisson blockers are deterministic for a seed", "[mobility]") {
    BlockerProcess p;
    p.arrival_rate_hz = 0.5;
    p.seed = 11;
    BlockerSampler a(p), b(p);
    for (double t = 0; t < 40.0; t += 0.11) {
        auto x = a.at(t), y = b.at(t);
        REQUIRE(x.size() == y.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(x[i].x == y[i].x);
            CHECK(x[i].y == y[i].y);
        }
    }
    CHECK(a.events_before(40.0) > 5);
}
