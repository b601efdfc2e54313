#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "terra/angles.hpp"
#include "terra/array.hpp"

namespace terra {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Position plus array orientation. Height is above ground (z = 0);
/// boresight_zen > 0 tilts the array toward the ground.
struct Pose {
    double x = 0, y = 0, height = 0;
    double boresight_az_deg = 0;
    double boresight_zen_deg = 0;
};

/// Vertical slab from the ground up: a pedestrian-style obstacle.
struct Blocker {
    double x = 0, y = 0;
    double height = 1.78;
    double width = 0.40;
};

enum class PathKind { Los, GroundReflection };

/// One propagation path. Angles are world-frame; arrive angles point from
/// the receiver toward the apparent source, so a ground reflection arrives
/// below horizontal (arrive_zen > 0).
struct PathComponent {
    PathKind kind = PathKind::Los;
    double length_m = 0;
    double depart_az_deg = 0, depart_zen_deg = 0;
    double arrive_az_deg = 0, arrive_zen_deg = 0;
    double extra_loss_db = 0;
};

/// Reflection loss relative to the LoS path, keyed by transmitter tilt in
/// degrees. Linear interpolation between entries, clamped at the ends.
struct GrLossTable {
    std::vector<std::pair<double, double>> entries = {{0.0, 6.0}, {10.0, 4.6}, {20.0, 4.05}};

    double lookup(double tilt_deg) const {
        if (entries.empty()) return 0.0;
        if (tilt_deg <= entries.front().first) return entries.front().second;
        if (tilt_deg >= entries.back().first) return entries.back().second;
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (tilt_deg <= entries[i].first) {
                auto [t0, v0] = entries[i - 1];
                auto [t1, v1] = entries[i];
                double f = (tilt_deg - t0) / (t1 - t0);
                return v0 + f * (v1 - v0);
            }
        }
        return entries.back().second;
    }
};

struct ChannelConfig {
    double carrier_hz = 60e9;
    double tx_power_dbm = 20.0;
    double system_loss_db = 0.0;
    GrLossTable gr_loss;
    double blockage_attenuation_db = 20.0;
    double noise_floor_dbm = -78.0;
    double decode_threshold_dbm = -68.0; // noise floor + 10
};

/// Free-space path loss, 20*log10(4*pi*d*f/c), d in meters, f in Hz.
inline double fspl_db(double distance_m, double carrier_hz) {
    if (!(distance_m > 0.0) || !(carrier_hz > 0.0))
        throw std::domain_error("fspl needs positive distance and carrier");
    return 20.0 * std::log10(4.0 * kPi * distance_m * carrier_hz / kSpeedOfLight);
}

/// Maximum blocker-to-receiver distance at which a blocker of height h_b
/// still intersects the LoS ray:
///
///           tx o
///              |  \
///          h_t |    \ LoS            d_br_max = d_tr * (h_b - h_r)
///              |  h_b |\                        -----------------
///              |    | | \ h_r                      (h_t - h_r)
///         -----+----+-+--o rx--
///              |<--d_tr->|
///
/// Heights outside [h_r, h_t] are clamped (flag reported via `clamped`).
inline double d_br_max(double d_tr, double h_t, double h_r, double h_b,
                       bool* clamped = nullptr) {
    if (!(h_t > h_r)) throw std::domain_error("d_br_max requires h_t > h_r");
    if (!(d_tr > 0.0)) throw std::domain_error("d_br_max requires d_tr > 0");
    if (clamped) *clamped = false;
    if (h_b > h_t) {
        h_b = h_t;
        if (clamped) *clamped = true;
    }
    if (h_b < h_r) {
        h_b = h_r;
        if (clamped) *clamped = true;
    }
    return d_tr * (h_b - h_r) / (h_t - h_r);
}

namespace detail {
inline double horizontal_dist(const Pose& a, const Pose& b) {
    return std::hypot(b.x - a.x, b.y - a.y);
}
inline double azimuth_of(double dx, double dy) {
    if (dx == 0.0 && dy == 0.0) return 0.0; // coincident: direction undefined, use 0
    return rad2deg(std::atan2(dy, dx));
}
} // namespace detail

inline PathComponent los_path(const Pose& tx, const Pose& rx) {
    PathComponent p;
    p.kind = PathKind::Los;
    double dh = detail::horizontal_dist(tx, rx);
    double dz = tx.height - rx.height;
    p.length_m = std::sqrt(dh * dh + dz * dz);
    p.depart_az_deg = detail::azimuth_of(rx.x - tx.x, rx.y - tx.y);
    p.arrive_az_deg = detail::azimuth_of(tx.x - rx.x, tx.y - rx.y);
    // zen > 0 points down: the tx looks down at a lower rx, the rx looks up.
    double elev = rad2deg(std::atan2(std::abs(dz), dh));
    p.depart_zen_deg = dz >= 0 ? elev : -elev;
    p.arrive_zen_deg = dz >= 0 ? -elev : elev;
    p.extra_loss_db = 0.0;
    return p;
}

/// Image-method single ground bounce. Both ends see the ray at
/// atan((h_t + h_r)/d) below horizontal, at the LoS azimuth; path length is
/// that of the straight ray to the transmitter's ground image.
///
/// extra_loss is the table value (total loss relative to LoS at best
/// alignment) minus the FSPL the longer reflected path already pays, so the
/// end-to-end RSS gap between the aligned LoS and aligned GR paths equals
/// the table entry.
inline PathComponent ground_reflection_path(const Pose& tx, const Pose& rx,
                                            const GrLossTable& table = GrLossTable{}) {
    PathComponent p;
    p.kind = PathKind::GroundReflection;
    double dh = detail::horizontal_dist(tx, rx);
    double hsum = tx.height + rx.height;
    p.length_m = std::sqrt(dh * dh + hsum * hsum);
    p.depart_az_deg = detail::azimuth_of(rx.x - tx.x, rx.y - tx.y);
    p.arrive_az_deg = detail::azimuth_of(tx.x - rx.x, tx.y - rx.y);
    double dip = rad2deg(std::atan2(hsum, dh));
    p.depart_zen_deg = dip;
    p.arrive_zen_deg = dip;
    double rel = table.lookup(tx.boresight_zen_deg);
    double dz = tx.height - rx.height;
    double los_len = std::sqrt(dh * dh + dz * dz);
    double fspl_gap = los_len > 0 ? 20.0 * std::log10(p.length_m / los_len) : 0.0;
    p.extra_loss_db = std::max(0.0, rel - fspl_gap);
    return p;
}

/// Ground-bounce point on the horizontal segment from tx toward rx.
inline void gr_bounce_point(const Pose& tx, const Pose& rx, double& bx, double& by) {
    double dh = detail::horizontal_dist(tx, rx);
    double f = dh > 0 ? tx.height / (tx.height + rx.height) : 0.0;
    bx = tx.x + (rx.x - tx.x) * f;
    by = tx.y + (rx.y - tx.y) * f;
}

namespace detail {
/// True when the blocker slab cuts the 3-D segment from (p0, h0) to (p1, h1).
inline bool segment_blocked(double x0, double y0, double h0,
                            double x1, double y1, double h1, const Blocker& b) {
    double dx = x1 - x0, dy = y1 - y0;
    double len2 = dx * dx + dy * dy;
    double s = 0.0;
    if (len2 > 0.0) s = std::clamp(((b.x - x0) * dx + (b.y - y0) * dy) / len2, 0.0, 1.0);
    double cx = x0 + s * dx, cy = y0 + s * dy;
    double lateral = std::hypot(b.x - cx, b.y - cy);
    if (lateral > 0.5 * b.width) return false;
    double ray_h = h0 + s * (h1 - h0);
    return ray_h <= b.height;
}
} // namespace detail

inline bool blocker_occludes(const Pose& tx, const Pose& rx, const Blocker& b) {
    return detail::segment_blocked(tx.x, tx.y, tx.height, rx.x, rx.y, rx.height, b);
}

/// Ground-reflected path is occluded only if a blocker cuts one of its legs.
inline bool blocker_occludes_gr(const Pose& tx, const Pose& rx, const Blocker& b) {
    double bx, by;
    gr_bounce_point(tx, rx, bx, by);
    return detail::segment_blocked(tx.x, tx.y, tx.height, bx, by, 0.0, b) ||
           detail::segment_blocked(bx, by, 0.0, rx.x, rx.y, rx.height, b);
}

inline bool any_blocks_los(const Pose& tx, const Pose& rx, const std::vector<Blocker>& bs) {
    for (const Blocker& b : bs)
        if (blocker_occludes(tx, rx, b)) return true;
    return false;
}

inline bool any_blocks_gr(const Pose& tx, const Pose& rx, const std::vector<Blocker>& bs) {
    for (const Blocker& b : bs)
        if (blocker_occludes_gr(tx, rx, b)) return true;
    return false;
}

struct PathRss {
    double los_dbm;
    double gr_dbm;
    double total_dbm; // max-power combining, clamped at the noise floor
};

namespace detail {
inline double path_rss(const ChannelConfig& cfg, const PathComponent& p,
                       const Pose& tx, const Pose& rx,
                       const Codebook& tx_cb, int tx_beam,
                       const Codebook& rx_cb, int rx_beam, bool occluded) {
    double g_tx = gain(tx_cb, tx_beam, wrap_deg(p.depart_az_deg - tx.boresight_az_deg),
                       p.depart_zen_deg - tx.boresight_zen_deg);
    double g_rx = gain(rx_cb, rx_beam, wrap_deg(p.arrive_az_deg - rx.boresight_az_deg),
                       p.arrive_zen_deg - rx.boresight_zen_deg);
    double rss = cfg.tx_power_dbm + g_tx + g_rx - fspl_db(p.length_m, cfg.carrier_hz) -
                 cfg.system_loss_db - p.extra_loss_db;
    if (occluded) rss -= cfg.blockage_attenuation_db;
    return rss;
}
} // namespace detail

/// RSS of the two-path (LoS + single ground bounce) channel. Paths combine
/// by max power; the result never reports below the noise floor.
/// `force_gr_blocked` / `force_gr_clear` let a caller override the geometric
/// occlusion of the reflected path (per-event availability modeling).
inline PathRss rss_detail(const ChannelConfig& cfg, const Pose& tx, const Pose& rx,
                          const Codebook& tx_cb, int tx_beam,
                          const Codebook& rx_cb, int rx_beam,
                          const std::vector<Blocker>& blockers,
                          bool force_gr_blocked = false, bool force_gr_clear = false) {
    PathComponent los = los_path(tx, rx);
    PathComponent gr = ground_reflection_path(tx, rx, cfg.gr_loss);
    bool los_occ = any_blocks_los(tx, rx, blockers);
    bool gr_occ = force_gr_blocked || (!force_gr_clear && any_blocks_gr(tx, rx, blockers));
    PathRss r{};
    r.los_dbm = detail::path_rss(cfg, los, tx, rx, tx_cb, tx_beam, rx_cb, rx_beam, los_occ);
    r.gr_dbm = detail::path_rss(cfg, gr, tx, rx, tx_cb, tx_beam, rx_cb, rx_beam, gr_occ);
    r.total_dbm = std::max(cfg.noise_floor_dbm, std::max(r.los_dbm, r.gr_dbm));
    return r;
}

inline double rss(const ChannelConfig& cfg, const Pose& tx, const Pose& rx,
                  const Codebook& tx_cb, int tx_beam,
                  const Codebook& rx_cb, int rx_beam,
                  const std::vector<Blocker>& blockers = {}) {
    return rss_detail(cfg, tx, rx, tx_cb, tx_beam, rx_cb, rx_beam, blockers).total_dbm;
}

/// System loss that pins the aligned-beam LoS RSS at `target_rss_dbm` for
/// this link geometry (gains taken at exact boresight alignment).
inline double calibrate_system_loss(const ChannelConfig& cfg, const Pose& tx, const Pose& rx,
                                    double tx_gain_db, double rx_gain_db,
                                    double target_rss_dbm) {
    PathComponent los = los_path(tx, rx);
    double uncal = cfg.tx_power_dbm + tx_gain_db + rx_gain_db -
                   fspl_db(los.length_m, cfg.carrier_hz);
    return uncal - target_rss_dbm;
}

} // namespace terra
