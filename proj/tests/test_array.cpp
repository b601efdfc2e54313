#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "terra/array.hpp"

using namespace terra;

namespace {
Codebook linear25() {
    ArrayGeometry g;
    g.elements_x = 12;
    return make_codebook(g, -50.0, 60.0, 25);
}
} // namespace

TEST_CASE("array factor normalizes to unity at the steering direction", "[array]") {
    CHECK(array_factor_db(12, 0.5, 0.0) == Catch::Approx(0.0));
    CHECK(array_factor_db(1, 0.5, 0.3) == Catch::Approx(0.0));
    // symmetric in psi
    CHECK(array_factor_db(12, 0.5, 0.05) == Catch::Approx(array_factor_db(12, 0.5, -0.05)));
}

TEST_CASE("12-element half-power point sits at the classic sine offset", "[array]") {
    // |AF|^2 = 1/2 at psi = 0.074047 for n=12, d=0.5 (numeric solve of the
    // sin(nu/2)/(n sin(u/2)) pattern).
    CHECK(array_factor_db(12, 0.5, 0.074047) == Catch::Approx(-3.0103).margin(0.01));
}

TEST_CASE("gain peaks at the steering angle and rolls off", "[array]") {
    Codebook cb = linear25();
    const Beam& b = cb.at(12);
    CHECK(gain(cb, 12, b.steer_az_deg, 0.0) == Catch::Approx(17.0));
    CHECK(gain(cb, 12, b.steer_az_deg + 10.0, 0.0) < 17.0 - 6.0);
}

TEST_CASE("listening one beam off the 25-beam grid costs about 3.55 dB", "[array]") {
    Codebook cb = linear25();
    // central pair steers at 0.4167 and 5.0 degrees
    const Beam& b = cb.at(11);
    const Beam& nb = cb.at(12);
    CHECK(b.steer_az_deg == Catch::Approx(0.41667).margin(1e-4));
    CHECK(nb.steer_az_deg == Catch::Approx(5.0).margin(1e-9));
    double drop = gain(cb, 11, nb.steer_az_deg, 0.0) - gain(cb, 11, b.steer_az_deg, 0.0);
    CHECK(drop == Catch::Approx(-3.5507).margin(0.01));
}

TEST_CASE("sidelobe floor clamps the pattern", "[array]") {
    ArrayGeometry g;
    g.elements_x = 12;
    g.sidelobe_floor_db = 20.0;
    Codebook cb = make_codebook(g, 0.0, 0.0, 1);
    CHECK(gain(cb, 0, 60.0, 0.0) >= 17.0 - 20.0 - 1e-9);
}

TEST_CASE("codebook grid is row-major with uniform steering angles", "[array]") {
    ArrayGeometry g;
    g.kind = ArrayKind::Planar;
    g.elements_x = 12;
    g.elements_y = 8;
    Codebook cb = make_codebook(g, -50.0, 60.0, 25, -15.0, 30.0, 3);
    REQUIRE(cb.size() == 75);
    CHECK(cb.rows == 3);
    CHECK(cb.cols == 25);
    CHECK_FALSE(cb.linear_grid());
    const Beam& b = cb.at(1 * 25 + 7);
    CHECK(b.row == 1);
    CHECK(b.col == 7);
    CHECK(b.steer_az_deg == Catch::Approx(-50.0 + 7 * 110.0 / 24.0));
    CHECK(b.steer_zen_deg == Catch::Approx(7.5));
    CHECK_THROWS_AS(cb.at(75), std::out_of_range);
}

TEST_CASE("one-beam axis steers at the sector midpoint", "[array]") {
    ArrayGeometry g;
    Codebook cb = make_codebook(g, -10.0, 30.0, 1);
    CHECK(cb.at(0).steer_az_deg == Catch::Approx(10.0));
}

TEST_CASE("degenerate codebook sectors are rejected", "[array]") {
    ArrayGeometry g;
    CHECK_THROWS_AS(make_codebook(g, 10.0, -10.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_codebook(g, 0.0, 10.0, 0), std::invalid_argument);
}

TEST_CASE("angular neighbors form the surrounding ring", "[array]") {
    ArrayGeometry g;
    g.kind = ArrayKind::Planar;
    g.elements_y = 8;
    Codebook cb = make_codebook(g, -45.0, 45.0, 5, -15.0, 15.0, 3);
    auto mid = angular_neighbors(cb, 1 * 5 + 2);
    CHECK(mid == std::vector<int>{1, 2, 3, 6, 8, 11, 12, 13});
    auto corner = angular_neighbors(cb, 0);
    CHECK(corner == std::vector<int>{1, 5, 6});
    // linear codebook: left and right only
    Codebook lin = linear25();
    CHECK(angular_neighbors(lin, 12) == std::vector<int>{11, 13});
    CHECK(angular_neighbors(lin, 0) == std::vector<int>{1});
    CHECK(angular_neighbors(lin, 24) == std::vector<int>{23});
}

TEST_CASE("nearest beam picks the closest steering direction", "[array]") {
    Codebook cb = linear25();
    CHECK(nearest_beam(cb, 5.0, 0.0) == 12);
    CHECK(nearest_beam(cb, 0.4, 0.0) == 11);
    CHECK(nearest_beam(cb, -80.0, 0.0) == 0);  // clamps to the sector edge
    CHECK(nearest_beam(cb, 90.0, 0.0) == 24);
}

TEST_CASE("codebook csv lists every beam", "[array]") {
    Codebook cb = linear25();
    std::ostringstream os;
    codebook_csv(cb, os);
    std::string s = os.str();
    CHECK(s.rfind("beam_id,row,col,steer_az_deg,steer_zen_deg\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 26);
}
