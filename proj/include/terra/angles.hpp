#pragma once

#include <cmath>

namespace terra {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Wrap an angle in degrees to (-180, 180].
inline double wrap_deg(double d) {
    d = std::fmod(d, 360.0);
    if (d <= -180.0) d += 360.0;
    if (d > 180.0) d -= 360.0;
    return d;
}

/// Distance between two directions in sine space (the metric the array
/// factor lives in). Angles in degrees.
inline double sine_space_dist(double a_deg, double b_deg) {
    return std::abs(std::sin(deg2rad(a_deg)) - std::sin(deg2rad(b_deg)));
}

} // namespace terra
