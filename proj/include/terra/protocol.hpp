#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "terra/array.hpp"
#include "terra/channel.hpp"

namespace terra {

enum class ProtocolState {
    LosOperation,
    GroundReflectedDiscovery,
    ExhaustiveSearch,
    NlosOperation,
    NeighborAcquisition,
    NeighborTracking,
};

inline const char* to_string(ProtocolState s) {
    switch (s) {
        case ProtocolState::LosOperation: return "LosOperation";
        case ProtocolState::GroundReflectedDiscovery: return "GroundReflectedDiscovery";
        case ProtocolState::ExhaustiveSearch: return "ExhaustiveSearch";
        case ProtocolState::NlosOperation: return "NlosOperation";
        case ProtocolState::NeighborAcquisition: return "NeighborAcquisition";
        case ProtocolState::NeighborTracking: return "NeighborTracking";
    }
    return "?";
}

struct ProtocolConfig {
    double blockage_drop_db = 15.0;
    double adapt_drop_db = 3.0;
    double revert_margin_db = 3.0;
    int ref_window = 10;
    double reconnect_penalty_s = 1.0;
    int neighbor_multiplex = 4; // every k-th sweep period is a neighbor occasion
    int grd_retry_periods = 50; // re-probe cadence while unprotected
    // acquisition settles only for a candidate this far above the decode
    // floor; a marginal brush that decodes for one dwell is not a link
    double acquire_margin_db = 6.0;
    bool pose_available = true;
};

inline void validate(const ProtocolConfig& c) {
    if (!(c.blockage_drop_db > c.adapt_drop_db))
        throw std::invalid_argument("blockage_drop must exceed adapt_drop");
    if (c.ref_window < 1) throw std::invalid_argument("ref_window must be >= 1");
    if (c.neighbor_multiplex < 1) throw std::invalid_argument("neighbor_multiplex must be >= 1");
    if (c.acquire_margin_db < 0) throw std::invalid_argument("acquire_margin must be >= 0");
}

/// Windowed-max reference: the max of the last `window` accepted samples.
class RefWindow {
  public:
    explicit RefWindow(int window = 10) : window_(window) {}
    void reset(double x) {
        buf_.clear();
        buf_.push_back(x);
    }
    void push(double x) {
        buf_.push_back(x);
        while (static_cast<int>(buf_.size()) > window_) buf_.pop_front();
    }
    bool empty() const { return buf_.empty(); }
    double max() const {
        if (buf_.empty()) return -INFINITY;
        return *std::max_element(buf_.begin(), buf_.end());
    }
    void set_window(int w) { window_ = w; }

  private:
    int window_;
    std::deque<double> buf_;
};

struct BeamStore {
    std::optional<int> los_beam;
    std::optional<int> gr_beam;
    std::optional<int> neighbor_beam;
    RefWindow los_ref{10};
    RefWindow neighbor_ref{10};

    double los_ref_rss() const { return los_ref.max(); }
    double neighbor_ref_rss() const { return neighbor_ref.max(); }
};

struct Sample {
    double t = 0;
    int station = -1;
    int beam = -1;
    double rss = -INFINITY;
};

enum class ActionKind {
    None,
    SwitchToGr,      // fall back to the stored reflected beam
    ProbeNeighbors,  // adaptation probing around the current beam
    BeginGrd,        // refresh the reflected reserve
    BeginScan,       // exhaustive search, outage under way
    Revert,          // LoS recovered
    OutageStart,
    StaleSampleIgnored,
};

struct Action {
    ActionKind kind = ActionKind::None;
    int beam = -1;
};

struct OnSampleResult {
    ProtocolState state;
    std::vector<Action> actions;
};

/// Serving-side per-period decision. Samples must be for the beam the state
/// listens on; anything else is ignored with a diagnostic action.
inline OnSampleResult on_sample(ProtocolState state, BeamStore& store,
                                const ProtocolConfig& cfg, const ChannelConfig& ch,
                                const Sample& s) {
    OnSampleResult r{state, {}};
    switch (state) {
        case ProtocolState::LosOperation: {
            if (!store.los_beam || s.beam != *store.los_beam) {
                r.actions.push_back({ActionKind::StaleSampleIgnored, s.beam});
                return r;
            }
            double ref = store.los_ref_rss();
            // a sharp drop and an undecodable beacon both mean the direct
            // path is gone; the relative test alone goes blind when the
            // reference sits close to the decode floor
            if (s.rss <= ref - cfg.blockage_drop_db || s.rss < ch.decode_threshold_dbm) {
                if (store.gr_beam) {
                    r.state = ProtocolState::NlosOperation;
                    r.actions.push_back({ActionKind::SwitchToGr, *store.gr_beam});
                } else {
                    r.state = ProtocolState::ExhaustiveSearch;
                    r.actions.push_back({ActionKind::OutageStart, -1});
                    r.actions.push_back({ActionKind::BeginScan, -1});
                }
                return r; // reference frozen at its pre-blockage value
            }
            if (s.rss <= ref - cfg.adapt_drop_db) {
                r.actions.push_back({ActionKind::ProbeNeighbors, *store.los_beam});
                return r;
            }
            store.los_ref.push(s.rss);
            return r;
        }
        case ProtocolState::NlosOperation: {
            if (!store.gr_beam || s.beam != *store.gr_beam) {
                r.actions.push_back({ActionKind::StaleSampleIgnored, s.beam});
                return r;
            }
            if (s.rss < ch.decode_threshold_dbm) {
                store.gr_beam.reset();
                r.state = ProtocolState::ExhaustiveSearch;
                r.actions.push_back({ActionKind::OutageStart, -1});
                r.actions.push_back({ActionKind::BeginScan, -1});
            }
            return r;
        }
        case ProtocolState::NeighborTracking: {
            if (!store.neighbor_beam || s.beam != *store.neighbor_beam) {
                r.actions.push_back({ActionKind::StaleSampleIgnored, s.beam});
                return r;
            }
            if (s.rss <= store.neighbor_ref_rss() - cfg.adapt_drop_db) {
                r.actions.push_back({ActionKind::ProbeNeighbors, *store.neighbor_beam});
                return r;
            }
            store.neighbor_ref.push(s.rss);
            return r;
        }
        // Probing / scanning states are driven by their probe results, not
        // by the periodic sample stream.
        case ProtocolState::GroundReflectedDiscovery:
        case ProtocolState::ExhaustiveSearch:
        case ProtocolState::NeighborAcquisition:
            return r;
    }
    return r;
}

/// LoS recovery check, run once per sweep period while on the reflected
/// beam. True means revert to los_beam.
inline bool blockage_recovery_step(const BeamStore& store, const ProtocolConfig& cfg,
                                   double los_probe_rss) {
    return los_probe_rss >= store.los_ref_rss() - cfg.revert_margin_db;
}

struct AdaptResult {
    int beam = -1;      // chosen beam (may be the incumbent)
    bool switched = false;
    bool lost = false;  // tracking only: everything under the decode threshold
    int probes_used = 0;
};

/// Pick argmax over probed neighbors plus the incumbent; ties go to the
/// lowest beam id. A switch invalidates the stored reflected beam.
inline AdaptResult los_adapt(BeamStore& store, const Codebook& cb,
                             const std::map<int, double>& probe_rss, double incumbent_rss) {
    if (!store.los_beam) throw std::logic_error("los_adapt without a serving beam");
    AdaptResult res;
    res.probes_used = static_cast<int>(probe_rss.size());
    int best = *store.los_beam;
    double best_rss = incumbent_rss;
    for (const auto& [b, v] : probe_rss) {
        if (v > best_rss || (v == best_rss && b < best)) {
            best = b;
            best_rss = v;
        }
    }
    res.beam = best;
    res.switched = best != *store.los_beam;
    if (res.switched) {
        store.los_beam = best;
        store.gr_beam.reset(); // stale once the serving beam moves
    }
    store.los_ref.reset(best_rss);
    return res;
}

/// Tracking-side adaptation; same argmax rule. When nothing (incumbent
/// included) clears the decode threshold the neighbor is lost.
inline AdaptResult nrba_adapt(BeamStore& store, const Codebook& cb, const ChannelConfig& ch,
                              const std::map<int, double>& probe_rss, double incumbent_rss) {
    if (!store.neighbor_beam) throw std::logic_error("nrba_adapt without a tracked beam");
    AdaptResult res;
    res.probes_used = static_cast<int>(probe_rss.size());
    int best = *store.neighbor_beam;
    double best_rss = incumbent_rss;
    for (const auto& [b, v] : probe_rss) {
        if (v > best_rss || (v == best_rss && b < best)) {
            best = b;
            best_rss = v;
        }
    }
    if (best_rss < ch.decode_threshold_dbm) {
        res.lost = true;
        store.neighbor_beam.reset();
        return res;
    }
    res.beam = best;
    res.switched = best != *store.neighbor_beam;
    store.neighbor_beam = best;
    store.neighbor_ref.reset(best_rss);
    return res;
}

/// Candidate beams for the reflected-reserve probe. With pose information
/// the mobile aims straight down-grid from the serving beam: the (at most
/// two) same-column beams below it. Without pose it must consider every
/// beam steered further toward the ground than the serving beam.
inline std::vector<int> grd_candidates(const Codebook& cb, int los_beam, bool pose_available) {
    const Beam& los = cb.at(los_beam);
    std::vector<int> out;
    if (pose_available) {
        for (int dr = 1; dr <= 2; ++dr) {
            int r = los.row + dr;
            if (r < cb.rows) out.push_back(r * cb.cols + los.col);
        }
        return out;
    }
    for (const Beam& b : cb.beams)
        if (b.id != los_beam && b.steer_zen_deg > los.steer_zen_deg) out.push_back(b.id);
    return out;
}

struct GrdResult {
    std::optional<int> gr_beam;
    int probes_used = 0;
};

/// Evaluate probe results for the reflected reserve: best candidate at or
/// above the decode threshold wins (ties to the lowest id); nothing above
/// leaves the store unprotected.
inline GrdResult grd_search(BeamStore& store, const ChannelConfig& ch,
                            const std::map<int, double>& probe_rss) {
    GrdResult res;
    res.probes_used = static_cast<int>(probe_rss.size());
    std::optional<int> best;
    double best_rss = -INFINITY;
    for (const auto& [b, v] : probe_rss) {
        if (v < ch.decode_threshold_dbm) continue;
        if (!best || v > best_rss || (v == best_rss && b < *best)) {
            best = b;
            best_rss = v;
        }
    }
    if (best && store.los_beam && *best == *store.los_beam) best.reset();
    store.gr_beam = best;
    res.gr_beam = best;
    return res;
}

/// Static transition table, exported as documentation.
inline std::string transition_graph_dot() {
    return "digraph terra_states {\n"
           "  rankdir=LR;\n"
           "  LosOperation -> GroundReflectedDiscovery [label=\"reserve refresh / serving beam moved\"];\n"
           "  GroundReflectedDiscovery -> LosOperation [label=\"gr stored / gr not found\"];\n"
           "  LosOperation -> NlosOperation [label=\"blockage drop, reflected fallback\"];\n"
           "  LosOperation -> ExhaustiveSearch [label=\"blockage drop, no fallback (outage)\"];\n"
           "  NlosOperation -> LosOperation [label=\"LoS back within revert margin\"];\n"
           "  NlosOperation -> ExhaustiveSearch [label=\"reflected path lost (outage)\"];\n"
           "  ExhaustiveSearch -> LosOperation [label=\"beam found + reconnect penalty\"];\n"
           "  NeighborAcquisition -> NeighborTracking [label=\"neighbor beam found\"];\n"
           "  NeighborTracking -> NeighborAcquisition [label=\"all probes below decode threshold\"];\n"
           "}\n";
}

} // namespace terra
