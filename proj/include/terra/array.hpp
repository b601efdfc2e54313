#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "terra/angles.hpp"

namespace terra {

enum class ArrayKind { Linear, Planar };

/// Uniform-excitation phased array. Spacing is in wavelengths; zenith is
/// measured from the horizontal plane, positive pointing toward the ground.
struct ArrayGeometry {
    ArrayKind kind = ArrayKind::Linear;
    int elements_x = 12; // azimuth axis
    int elements_y = 1;  // zenith axis
    double spacing_wl = 0.5;
    double carrier_hz = 60e9;
    double boresight_gain_db = 17.0;
    std::optional<double> sidelobe_floor_db; // clamp relative to peak, off by default
};

struct Beam {
    int id = 0;
    int row = 0; // zenith grid index
    int col = 0; // azimuth grid index
    double steer_az_deg = 0.0;
    double steer_zen_deg = 0.0;
};

struct Codebook {
    ArrayGeometry geometry;
    std::vector<Beam> beams; // sorted by (row, col), id == row * cols + col
    int rows = 1;
    int cols = 1;
    double sector_az_lo = 0, sector_az_hi = 0;
    double sector_zen_lo = 0, sector_zen_hi = 0;

    int size() const { return static_cast<int>(beams.size()); }
    const Beam& at(int id) const {
        if (id < 0 || id >= size()) throw std::out_of_range("beam id " + std::to_string(id));
        return beams[static_cast<std::size_t>(id)];
    }
    bool linear_grid() const { return rows == 1 || cols == 1; }
};

namespace detail {
inline std::vector<double> steer_angles(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("codebook axis needs at least one beam");
    if (n == 1) return {0.5 * (lo + hi)};
    if (!(lo < hi)) throw std::invalid_argument("codebook sector is empty or inverted");
    std::vector<double> v(static_cast<std::size_t>(n));
    double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + i * step;
    return v;
}
} // namespace detail

/// Beams steered at uniformly spaced angles across the sector (endpoints
/// inclusive; a one-beam axis gets the sector midpoint). Row-major ids.
inline Codebook make_codebook(const ArrayGeometry& geom,
                              double sector_az_lo, double sector_az_hi, int n_az,
                              double sector_zen_lo = 0.0, double sector_zen_hi = 0.0,
                              int n_zen = 1) {
    Codebook cb;
    cb.geometry = geom;
    cb.rows = n_zen;
    cb.cols = n_az;
    cb.sector_az_lo = sector_az_lo;
    cb.sector_az_hi = sector_az_hi;
    cb.sector_zen_lo = sector_zen_lo;
    cb.sector_zen_hi = sector_zen_hi;
    auto az = detail::steer_angles(sector_az_lo, sector_az_hi, n_az);
    auto zen = detail::steer_angles(sector_zen_lo, sector_zen_hi, n_zen);
    cb.beams.reserve(static_cast<std::size_t>(n_az) * static_cast<std::size_t>(n_zen));
    for (int r = 0; r < n_zen; ++r)
        for (int c = 0; c < n_az; ++c)
            cb.beams.push_back(Beam{r * n_az + c, r, c,
                                    az[static_cast<std::size_t>(c)],
                                    zen[static_cast<std::size_t>(r)]});
    return cb;
}

/// |AF| of an n-element uniform line array in dB, evaluated at sine-space
/// offset psi from the steering direction:
///
///     AF(psi) = sin(n*u/2) / (n*sin(u/2)),   u = 2*pi*d*psi
///
/// normalized so AF(0) = 1.
inline double array_factor_db(int n, double spacing_wl, double psi) {
    if (n <= 1) return 0.0;
    double u = 2.0 * kPi * spacing_wl * psi;
    double den = n * std::sin(0.5 * u);
    if (std::abs(den) < 1e-12) return 0.0; // main lobe / grating lobe peak
    double af = std::sin(0.5 * n * u) / den;
    double mag = std::abs(af);
    if (mag < 1e-20) return -400.0;
    return 20.0 * std::log10(mag);
}

/// Gain of `beam` toward (az, zen), both in the array frame, in dB.
/// Separable sine-space array factors, normalized to boresight_gain_db at
/// the exact steering direction.
inline double gain(const Codebook& cb, int beam_id, double az_deg, double zen_deg) {
    const Beam& b = cb.at(beam_id);
    const ArrayGeometry& g = cb.geometry;
    double psi_az = std::sin(deg2rad(az_deg)) - std::sin(deg2rad(b.steer_az_deg));
    double psi_zen = std::sin(deg2rad(zen_deg)) - std::sin(deg2rad(b.steer_zen_deg));
    double gdb = g.boresight_gain_db + array_factor_db(g.elements_x, g.spacing_wl, psi_az) +
                 array_factor_db(g.elements_y, g.spacing_wl, psi_zen);
    if (g.sidelobe_floor_db)
        gdb = std::max(gdb, g.boresight_gain_db - *g.sidelobe_floor_db);
    return gdb;
}

/// Grid neighbors: Moore 8-neighborhood on the (row, col) grid, which
/// degenerates to the two adjacent beams on a one-row codebook.
inline std::vector<int> angular_neighbors(const Codebook& cb, int beam_id) {
    const Beam& b = cb.at(beam_id);
    std::vector<int> out;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            int r = b.row + dr, c = b.col + dc;
            if (r < 0 || r >= cb.rows || c < 0 || c >= cb.cols) continue;
            out.push_back(r * cb.cols + c);
        }
    }
    return out;
}

/// Beam whose steering is closest to (az, zen) in the per-axis sine metric.
inline int nearest_beam(const Codebook& cb, double az_deg, double zen_deg) {
    int best = 0;
    double best_d = 1e300;
    for (const Beam& b : cb.beams) {
        double d = sine_space_dist(az_deg, b.steer_az_deg) + sine_space_dist(zen_deg, b.steer_zen_deg);
        if (d < best_d) {
            best_d = d;
            best = b.id;
        }
    }
    return best;
}

inline void codebook_csv(const Codebook& cb, std::ostream& os) {
    os << "beam_id,row,col,steer_az_deg,steer_zen_deg\n";
    for (const Beam& b : cb.beams)
        os << b.id << ',' << b.row << ',' << b.col << ',' << b.steer_az_deg << ','
           << b.steer_zen_deg << '\n';
}

/// Azimuth gain cut for each beam at the beam's own steering zenith.
/// `only_beam` restricts the dump to one beam id; -1 keeps them all.
inline void pattern_csv(const Codebook& cb, std::ostream& os, int only_beam = -1,
                        double az_lo = -90.0, double az_hi = 90.0, double step = 1.0) {
    os << "beam_id,angle_deg,gain_db\n";
    for (const Beam& b : cb.beams) {
        if (only_beam >= 0 && b.id != only_beam) continue;
        for (double a = az_lo; a <= az_hi + 1e-9; a += step)
            os << b.id << ',' << a << ',' << gain(cb, b.id, a, b.steer_zen_deg) << '\n';
    }
}

} // namespace terra
