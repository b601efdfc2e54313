#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "terra/angles.hpp"
#include "terra/channel.hpp"
#include "terra/rng.hpp"

namespace terra {

enum class MobilityKind { Static, LinearWalk, Rotational, FreeWalk };

/// Deterministic function of (model, t). The free walk is a bounded random
/// waypoint walk whose boresight follows the heading plus a slew-limited
/// random jitter; all randomness comes from `seed`.
struct MobilityModel {
    MobilityKind kind = MobilityKind::Static;
    Pose start;
    double speed_mps = 1.0;            // linear/free walk
    double heading_deg = 0.0;          // linear walk
    double trajectory_length_m = 2.0;  // linear walk, clamps at the end
    double angular_velocity_dps = 90.0; // rotational
    double sector_lo_deg = 0.0, sector_hi_deg = 0.0; // rotational sweep, absolute
    std::array<double, 4> bounds{0, 0, 0, 0}; // free walk: x0, y0, x1, y1
    double jitter_amplitude_deg = 10.0;       // free walk boresight jitter
    double jitter_rate_cap_dps = 458.0;       // ~8 rad/s
    double jitter_interval_s = 0.25;          // free walk: jitter re-target cadence
    std::uint64_t seed = 0;
};

inline void validate(const MobilityModel& m) {
    if (m.kind == MobilityKind::FreeWalk) {
        if (!(m.bounds[2] > m.bounds[0]) || !(m.bounds[3] > m.bounds[1]))
            throw std::invalid_argument("free_walk requires a non-empty bounds rectangle");
        if (!(m.speed_mps > 0)) throw std::invalid_argument("free_walk requires speed > 0");
        if (!(m.jitter_interval_s > 0))
            throw std::invalid_argument("free_walk requires jitter_interval > 0");
    }
    if (m.kind == MobilityKind::Rotational && !(m.sector_hi_deg > m.sector_lo_deg))
        throw std::invalid_argument("rotational requires sector_hi > sector_lo");
    if (m.kind == MobilityKind::LinearWalk && !(m.speed_mps >= 0))
        throw std::invalid_argument("linear_walk requires speed >= 0");
}

/// Caches the waypoint history of a free walk so per-slot queries stay O(1)
/// amortized. Queries may come in any order; segments are generated purely
/// sequentially from the seed, so results depend only on (model, t).
class MobilitySampler {
  public:
    explicit MobilitySampler(const MobilityModel& m) : m_(m), rng_(derive_seed(m.seed, 0xF3EE)) {
        validate(m_);
        if (m_.kind == MobilityKind::FreeWalk) {
            Segment s0;
            s0.t0 = 0.0;
            s0.x0 = m_.start.x;
            s0.y0 = m_.start.y;
            start_segment(s0);
            segs_.push_back(s0);
        }
    }

    Pose at(double t) const {
        if (t < 0) t = 0;
        const MobilityModel& m = m_;
        Pose p = m.start;
        switch (m.kind) {
            case MobilityKind::Static:
                return p;
            case MobilityKind::LinearWalk: {
                double d = std::min(t * m.speed_mps, m.trajectory_length_m);
                p.x += d * std::cos(deg2rad(m.heading_deg));
                p.y += d * std::sin(deg2rad(m.heading_deg));
                return p;
            }
            case MobilityKind::Rotational: {
                // triangle wave over [lo, hi] at the configured rate, starting
                // at the initial boresight moving toward hi
                double lo = m.sector_lo_deg, hi = m.sector_hi_deg;
                double span = hi - lo;
                double x0 = std::clamp(m.start.boresight_az_deg, lo, hi) - lo;
                double phase = x0 + m.angular_velocity_dps * t;
                double cycle = std::fmod(phase, 2.0 * span);
                p.boresight_az_deg = lo + (cycle <= span ? cycle : 2.0 * span - cycle);
                return p;
            }
            case MobilityKind::FreeWalk:
                return free_walk_at(t);
        }
        return p;
    }

  private:
    struct Segment {
        double t0 = 0, t1 = 0;
        double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
        double heading_deg = 0;
    };

    void start_segment(Segment& s) const {
        double wx = rng_.uniform(m_.bounds[0], m_.bounds[2]);
        double wy = rng_.uniform(m_.bounds[1], m_.bounds[3]);
        double len = std::hypot(wx - s.x0, wy - s.y0);
        if (len < 0.25) len = 0.25, wx = s.x0 + 0.25, wy = s.y0; // degenerate waypoint
        s.x1 = wx;
        s.y1 = wy;
        s.t1 = s.t0 + len / m_.speed_mps;
        s.heading_deg = rad2deg(std::atan2(wy - s.y0, wx - s.x0));
    }

    /// Piecewise-linear jitter on its own clock, independent of waypoints:
    /// every jitter_interval_s it slews toward a fresh uniform target in
    /// [-amplitude, amplitude], rate-capped. Targets are drawn from
    /// per-knot derived seeds so values depend only on (model, t).
    double jit_at(double t) const {
        double iv = m_.jitter_interval_s;
        std::size_t k = static_cast<std::size_t>(t / iv);
        while (jit_knots_.size() <= k + 1) {
            std::size_t i = jit_knots_.size() - 1;
            Rng r(derive_seed(m_.seed, 0x117E, i));
            double target = r.uniform(-m_.jitter_amplitude_deg, m_.jitter_amplitude_deg);
            double max_delta = m_.jitter_rate_cap_dps * iv;
            double cur = jit_knots_.back();
            jit_knots_.push_back(cur + std::clamp(target - cur, -max_delta, max_delta));
        }
        double f = (t - static_cast<double>(k) * iv) / iv;
        return jit_knots_[k] + f * (jit_knots_[k + 1] - jit_knots_[k]);
    }

    Pose free_walk_at(double t) const {
        while (segs_.back().t1 < t) {
            Segment s;
            s.t0 = segs_.back().t1;
            s.x0 = segs_.back().x1;
            s.y0 = segs_.back().y1;
            start_segment(s);
            segs_.push_back(s);
        }
        std::size_t lo = 0, hi = segs_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (segs_[mid].t1 < t) lo = mid + 1; else hi = mid;
        }
        const Segment& s = segs_[lo];
        double f = s.t1 > s.t0 ? std::clamp((t - s.t0) / (s.t1 - s.t0), 0.0, 1.0) : 0.0;
        Pose p = m_.start;
        p.x = s.x0 + f * (s.x1 - s.x0);
        p.y = s.y0 + f * (s.y1 - s.y0);
        p.boresight_az_deg = wrap_deg(s.heading_deg + jit_at(t));
        return p;
    }

    MobilityModel m_;
    mutable Rng rng_;
    mutable std::vector<Segment> segs_;
    mutable std::vector<double> jit_knots_{0.0};
};

inline Pose pose_at(const MobilityModel& m, double t) { return MobilitySampler(m).at(t); }

/// Poisson process of blocker crossings. Each event walks a blocker along
/// the crossing line at crossing_speed, centered on the line midpoint at the
/// middle of its life; lifetime is duration_mean * (1 +/- jitter * U[-1,1]).
/// A non-empty scripted_times list replaces the Poisson arrivals.
struct BlockerProcess {
    double arrival_rate_hz = 0.0;
    double duration_mean_s = 0.2;
    double duration_jitter = 0.25; // fraction of the mean
    double crossing_speed_mps = 1.0;
    double line_x0 = 0, line_y0 = 0, line_x1 = 0, line_y1 = 1; // crossing axis
    double blocker_height_m = 1.78;
    double blocker_width_m = 0.40;
    std::vector<double> scripted_times;
    std::uint64_t seed = 0;
};

class BlockerSampler {
  public:
    explicit BlockerSampler(const BlockerProcess& p) : p_(p), arrival_rng_(derive_seed(p.seed, 0xB10C)) {}

    /// Blockers alive at time t.
    std::vector<Blocker> at(double t) const {
        std::vector<Blocker> out;
        at(t, out);
        return out;
    }

    /// Same, filling a caller-owned buffer (per-slot hot path).
    void at(double t, std::vector<Blocker>& out) const {
        extend(t);
        out.clear();
        for (std::size_t i = 0; i < arrivals_.size() && arrivals_[i] <= t; ++i) {
            double d = durations_[i];
            if (t >= arrivals_[i] && t < arrivals_[i] + d) {
                Blocker b;
                b.height = p_.blocker_height_m;
                b.width = p_.blocker_width_m;
                position(i, t, b.x, b.y);
                out.push_back(b);
            }
        }
    }

    /// Index of the event covering time t, or -1.
    int event_at(double t) const {
        extend(t);
        for (std::size_t i = 0; i < arrivals_.size() && arrivals_[i] <= t; ++i)
            if (t >= arrivals_[i] && t < arrivals_[i] + durations_[i]) return static_cast<int>(i);
        return -1;
    }

    std::size_t events_before(double t) const {
        extend(t);
        std::size_t n = 0;
        while (n < arrivals_.size() && arrivals_[n] <= t) ++n;
        return n;
    }

  private:
    void extend(double t) const {
        if (!p_.scripted_times.empty()) {
            if (arrivals_.empty()) {
                arrivals_ = p_.scripted_times;
                for (std::size_t i = 0; i < arrivals_.size(); ++i)
                    durations_.push_back(draw_duration(i));
            }
            return;
        }
        if (p_.arrival_rate_hz <= 0) return;
        while (horizon_ <= t) {
            horizon_ += arrival_rng_.exponential(p_.arrival_rate_hz);
            arrivals_.push_back(horizon_);
            durations_.push_back(draw_duration(arrivals_.size() - 1));
        }
    }

    double draw_duration(std::size_t i) const {
        Rng r(derive_seed(p_.seed, 0xD0, i));
        double u = r.uniform(-1.0, 1.0);
        return std::max(1e-3, p_.duration_mean_s * (1.0 + p_.duration_jitter * u));
    }

    void position(std::size_t i, double t, double& x, double& y) const {
        double mx = 0.5 * (p_.line_x0 + p_.line_x1);
        double my = 0.5 * (p_.line_y0 + p_.line_y1);
        double dx = p_.line_x1 - p_.line_x0, dy = p_.line_y1 - p_.line_y0;
        double len = std::hypot(dx, dy);
        if (len <= 0) { x = mx; y = my; return; }
        double t_mid = arrivals_[i] + 0.5 * durations_[i];
        double s = (t - t_mid) * p_.crossing_speed_mps;
        x = mx + s * dx / len;
        y = my + s * dy / len;
    }

    BlockerProcess p_;
    mutable Rng arrival_rng_;
    mutable double horizon_ = 0.0;
    mutable std::vector<double> arrivals_;
    mutable std::vector<double> durations_;
};

inline std::vector<Blocker> active_blockers(const BlockerProcess& p, double t) {
    return BlockerSampler(p).at(t);
}

} // namespace terra
