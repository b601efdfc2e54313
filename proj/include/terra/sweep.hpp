#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "terra/array.hpp"
#include "terra/channel.hpp"
#include "terra/mobility.hpp"
#include "terra/protocol.hpp"
#include "terra/rng.hpp"
#include "terra/trace.hpp"

namespace terra {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Base-station broadcast sweep: each beam held for beam_dwell, cycling
/// through beam_order; one full cycle is the sweep period.
struct SweepSchedule {
    double beam_dwell_s = 800e-6;
    std::vector<int> beam_order; // filled from the codebook when empty
    bool random_phase = true;    // engine draws the phase per run
    double phase_s = 0.0;

    double period_s() const { return beam_dwell_s * static_cast<double>(beam_order.size()); }
};

inline int bs_beam_at(const SweepSchedule& s, double t) {
    if (s.beam_order.empty()) throw ScenarioError("sweep schedule has no beam order");
    double period = s.period_s();
    double x = std::fmod(t - s.phase_s, period);
    if (x < 0) x += period;
    auto idx = static_cast<std::size_t>(x / s.beam_dwell_s);
    if (idx >= s.beam_order.size()) idx = s.beam_order.size() - 1; // fp edge at the boundary
    return s.beam_order[idx];
}

struct Station {
    Pose pose;
    Codebook codebook;
    SweepSchedule sweep;
    int carrier_id = 0; // 0 = serving carrier, anything else is a neighbor
};

enum class SimMode { Protocol, ScanSurvey };

struct SimSection {
    double horizon_s = 1.0;
    double slot_s = 100e-6;
    SimMode mode = SimMode::Protocol;
    int oracle_stride_periods = 0; // 0 disables oracle logging
};

struct AnalysisSection {
    double outage_floor_dbm = -70.0;
    double within_margin_db = 6.0;
    double oracle_margin_db = 3.0;
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<Station> stations;
    Codebook mobile_codebook;
    Pose mobile_start; // convenience copy of mobility.start
    MobilityModel mobility;
    ChannelConfig channel;
    std::optional<double> calibrate_rss_los_dbm; // pins system_loss at load
    double gr_availability = NAN; // NaN = geometric occlusion of the reflected path
    BlockerProcess blockers;
    ProtocolConfig protocol;
    SimSection sim;
    AnalysisSection analysis;
};

namespace detail {
inline int slots_of(double span_s, double slot_s, const char* what) {
    double q = span_s / slot_s;
    double r = std::round(q);
    if (std::abs(q - r) > 1e-6 || r < 1)
        throw ScenarioError(std::string(what) + " must be a positive multiple of the slot");
    return static_cast<int>(r);
}
} // namespace detail

/// All configuration inconsistencies are reported here, before t = 0.
inline void validate(Scenario& sc) {
    if (sc.sim.horizon_s <= 0) throw ScenarioError("sim.horizon must be positive");
    if (sc.sim.slot_s <= 0) throw ScenarioError("sim.slot must be positive");
    if (sc.stations.empty()) throw ScenarioError("scenario needs at least one station");
    if (sc.mobile_codebook.size() == 0) throw ScenarioError("mobile codebook is empty");
    validate(sc.protocol);
    sc.mobility.start = sc.mobile_start;
    validate(sc.mobility);

    int serving = -1;
    for (std::size_t i = 0; i < sc.stations.size(); ++i) {
        Station& st = sc.stations[i];
        if (st.codebook.size() == 0) throw ScenarioError("station codebook is empty");
        if (st.sweep.beam_order.empty()) {
            st.sweep.beam_order.resize(static_cast<std::size_t>(st.codebook.size()));
            for (int b = 0; b < st.codebook.size(); ++b)
                st.sweep.beam_order[static_cast<std::size_t>(b)] = b;
        }
        for (int b : st.sweep.beam_order)
            if (b < 0 || b >= st.codebook.size())
                throw ScenarioError("sweep beam_order references an unknown beam");
        detail::slots_of(st.sweep.beam_dwell_s, sc.sim.slot_s, "beam_dwell");
        if (st.carrier_id == 0) {
            if (serving >= 0) throw ScenarioError("more than one serving (carrier 0) station");
            serving = static_cast<int>(i);
        }
    }
    int spp = detail::slots_of(sc.stations[0].sweep.period_s(), sc.sim.slot_s, "sweep period");
    for (const Station& st : sc.stations)
        if (detail::slots_of(st.sweep.period_s(), sc.sim.slot_s, "sweep period") != spp)
            throw ScenarioError("stations must share one sweep period length");
    if (!std::isnan(sc.gr_availability) &&
        (sc.gr_availability < 0.0 || sc.gr_availability > 1.0))
        throw ScenarioError("gr_availability must lie in [0, 1]");

    if (sc.calibrate_rss_los_dbm && !sc.stations.empty()) {
        // pin against the serving station; neighbor-only scenarios use station 0
        std::size_t ref = serving >= 0 ? static_cast<std::size_t>(serving) : 0;
        const Station& st = sc.stations[ref];
        sc.channel.system_loss_db = calibrate_system_loss(
            sc.channel, st.pose, sc.mobile_start, st.codebook.geometry.boresight_gain_db,
            sc.mobile_codebook.geometry.boresight_gain_db, *sc.calibrate_rss_los_dbm);
    }
}

struct ScanResult {
    int dwells = 0;
    std::optional<int> beam;
    double rss = -INFINITY;
    int station = -1;
    int bs_beam = -1;
};

/// Discrete-time simulation of one scenario run. Deterministic: every
/// random stream is derived from the scenario seed.
class Engine {
  public:
    explicit Engine(Scenario sc) : sc_(std::move(sc)) {
        validate(sc_);
        slot_ = sc_.sim.slot_s;
        spp_ = detail::slots_of(sc_.stations[0].sweep.period_s(), slot_, "sweep period");
        n_slots_ = static_cast<long long>(std::ceil(sc_.sim.horizon_s / slot_));
        for (std::size_t i = 0; i < sc_.stations.size(); ++i) {
            if (sc_.stations[i].carrier_id == 0) serving_ = static_cast<int>(i);
            else neighbors_.push_back(static_cast<int>(i));
        }
        MobilityModel mm = sc_.mobility;
        mm.start = sc_.mobile_start;
        mm.seed = derive_seed(sc_.seed, 0xA4, sc_.mobility.seed);
        mobility_.emplace(mm);
        BlockerProcess bp = sc_.blockers;
        bp.seed = derive_seed(sc_.seed, 0xA5, sc_.blockers.seed);
        blockers_.emplace(bp);
        Rng phase_rng(derive_seed(sc_.seed, 0xA1));
        phase_slots_.resize(sc_.stations.size(), 0);
        for (std::size_t i = 0; i < sc_.stations.size(); ++i) {
            Station& st = sc_.stations[i];
            int spd = detail::slots_of(st.sweep.beam_dwell_s, slot_, "beam_dwell");
            spd_.push_back(spd);
            if (st.sweep.random_phase)
                phase_slots_[i] = static_cast<int>(phase_rng.uniform_index(static_cast<std::uint64_t>(spp_)));
            else
                phase_slots_[i] = detail::slots_of(st.sweep.phase_s + st.sweep.period_s(), slot_,
                                                   "sweep phase") % spp_;
            st.sweep.phase_s = phase_slots_[i] * slot_;
        }
        scan_rng_.emplace(derive_seed(sc_.seed, 0xA2));
    }

    const Scenario& scenario() const { return sc_; }

    Trace run() {
        trace_ = Trace{};
        trace_.seed = sc_.seed;
        trace_.scenario_name = sc_.name;
        init_link();
        for (long long k = 0; k < n_slots_; ++k) {
            double t = static_cast<double>(k) * slot_;
            if (k % spp_ == 0) begin_period(k);
            pose_ = mobility_->at(t);
            blockers_->at(t, scratch_blockers_);
            update_blockage_truth(t);
            step_slot(k, t);
            if ((k + 1) % spp_ == 0) end_period(k, (static_cast<double>(k) + 1.0) * slot_);
        }
        finalize(static_cast<double>(n_slots_) * slot_);
        return std::move(trace_);
    }

  private:
    enum class Side { Serving, Neighbor, Survey };

    struct ProbePlan {
        enum class Purpose { LosAdapt, Grd, Track } purpose = Purpose::LosAdapt;
        std::vector<int> queue;
        std::map<int, double> results;
        double incumbent_rss = -INFINITY;
        int assigned_this_dwell = 0;
        bool armed = false;
    };

    struct ScanState {
        bool active = false;
        int start = 0;
        int prior_beam = -1; // pose-predicted candidate, if any
        int idx = 0;
        double best = -INFINITY;
        double best_t = 0;
        int best_station = -1;
        int best_bs_beam = -1;
        // best candidate seen over the whole cycle (serving recovery picks
        // the argmax of a full sweep, not the first decodable beam)
        double cycle_best = -INFINITY;
        int cycle_beam = -1;
        int cycle_station = -1;
        int cycle_bs_beam = -1;
        int candidate(int n) const { return (start + idx) % n; }
        void new_dwell() { best = -INFINITY; best_t = 0; best_station = -1; best_bs_beam = -1; }
    };

    // ---- setup ----------------------------------------------------------

    void init_link() {
        pose_ = mobility_->at(0.0);
        blockers_->at(0.0, scratch_blockers_);
        if (sc_.sim.mode == SimMode::ScanSurvey) {
            arm_survey_scan();
            return;
        }
        if (serving_ >= 0) {
            const Station& st = station(serving_);
            serving_bs_beam_ = best_bs_beam_toward_mobile(serving_);
            int best = -1;
            double best_rss = -INFINITY;
            for (int b = 0; b < sc_.mobile_codebook.size(); ++b) {
                double v = station_rss(serving_, serving_bs_beam_, b, 0.0);
                if (v > best_rss) { best_rss = v; best = b; }
            }
            (void)st;
            store_.los_beam = best;
            store_.los_ref.set_window(sc_.protocol.ref_window);
            store_.los_ref.reset(best_rss);
            serving_state_ = ProtocolState::LosOperation;
        }
        store_.neighbor_ref.set_window(sc_.protocol.ref_window);
        if (!neighbors_.empty()) {
            neighbor_state_ = ProtocolState::NeighborAcquisition;
            arm_neighbor_scan();
        }
    }

    // ---- per-period bookkeeping -----------------------------------------

    Side side_of_period(long long p) const {
        if (sc_.sim.mode == SimMode::ScanSurvey) return Side::Survey;
        if (serving_ < 0) return Side::Neighbor;
        if (!neighbors_.empty() &&
            (p % sc_.protocol.neighbor_multiplex) == sc_.protocol.neighbor_multiplex - 1)
            return Side::Neighbor;
        return Side::Serving;
    }

    void begin_period(long long k) {
        long long p = k / spp_;
        side_ = side_of_period(p);
        operating_best_ = -INFINITY;
        operating_t_ = 0;
        operating_beam_ = -1;
        if (side_ == Side::Serving && serving_ >= 0 &&
            serving_state_ != ProtocolState::ExhaustiveSearch) {
            pose_ = mobility_->at(static_cast<double>(k) * slot_);
            serving_bs_beam_ = best_bs_beam_toward_mobile(serving_);
        }
        if ((side_ == Side::Serving && serving_scan_.active) ||
            (side_ == Side::Neighbor && neighbor_scan_.active) || side_ == Side::Survey)
            active_scan().new_dwell();
    }

    // ---- slot step -------------------------------------------------------

    void step_slot(long long k, double t) {
        switch (side_) {
            case Side::Survey: scan_slot(k, t, all_station_ids_()); break;
            case Side::Neighbor:
                if (neighbor_state_ == ProtocolState::NeighborAcquisition)
                    scan_slot(k, t, neighbors_);
                else
                    tracking_slot(k, t);
                break;
            case Side::Serving: serving_slot(k, t); break;
        }
    }

    void serving_slot(long long k, double t) {
        if (serving_ < 0) return;
        if (serving_state_ == ProtocolState::ExhaustiveSearch) {
            if (!std::isnan(reconnect_until_) && t < reconnect_until_) return; // resynchronizing
            std::vector<int> only{serving_};
            scan_slot(k, t, only);
            return;
        }
        auto [dwell, offset] = local_dwell(serving_, k);
        int bs = station(serving_).sweep.beam_order[static_cast<std::size_t>(dwell)];
        if (bs != serving_bs_beam_) return; // outside the serving dwell, radio idles on data
        bool last = offset == spd_[static_cast<std::size_t>(serving_)] - 1;
        if (serving_state_ == ProtocolState::NlosOperation) {
            if (offset == 0) {
                double v = station_rss(serving_, bs, *store_.los_beam, t);
                log_probe(t, serving_, *store_.los_beam, v);
                if (blockage_recovery_step(store_, sc_.protocol, v)) {
                    transition(t, ProtocolState::NlosOperation, ProtocolState::LosOperation, "revert");
                    push_beam_switch(t, serving_, *store_.gr_beam, *store_.los_beam, "revert", -1);
                    serving_state_ = ProtocolState::LosOperation;
                    store_.los_ref.push(v);
                    note_operating(t, *store_.los_beam, v);
                    revert_this_dwell_ = true;
                }
                return;
            }
            if (revert_this_dwell_) {
                double v = station_rss(serving_, bs, *store_.los_beam, t);
                note_operating(t, *store_.los_beam, v);
            } else {
                double v = station_rss(serving_, bs, *store_.gr_beam, t);
                note_operating(t, *store_.gr_beam, v);
                if (last) resolve_nlos_dwell(t);
            }
            if (last) revert_this_dwell_ = false;
            return;
        }
        // LosOperation / GroundReflectedDiscovery share the probing fabric.
        if (offset == 0) {
            double v = station_rss(serving_, bs, *store_.los_beam, t);
            note_operating(t, *store_.los_beam, v);
            if (serving_state_ == ProtocolState::LosOperation && !plan_.armed)
                act_on_serving_sample(t, v);
            plan_.assigned_this_dwell = 0;
            return;
        }
        if (plan_.armed && static_cast<std::size_t>(plan_.assigned_this_dwell) < plan_.queue.size() &&
            plan_.assigned_this_dwell < offset) {
            int beam = plan_.queue[static_cast<std::size_t>(plan_.assigned_this_dwell)];
            double v = station_rss(serving_, bs, beam, t);
            plan_.results[beam] = v;
            plan_.assigned_this_dwell++;
            log_probe(t, serving_, beam, v);
        } else {
            double v = station_rss(serving_, bs, current_serving_beam(), t);
            note_operating(t, current_serving_beam(), v);
        }
        if (last && plan_.armed) resolve_serving_plan(t);
    }

    void tracking_slot(long long k, double t) {
        auto [dwell, offset] = local_dwell(tracked_station_, k);
        int bs = station(tracked_station_).sweep.beam_order[static_cast<std::size_t>(dwell)];
        if (bs != tracked_bs_beam_) return;
        bool last = offset == spd_[static_cast<std::size_t>(tracked_station_)] - 1;
        if (offset == 0) {
            double v = station_rss(tracked_station_, bs, *store_.neighbor_beam, t);
            note_operating(t, *store_.neighbor_beam, v);
            if (!track_plan_.armed) act_on_tracking_sample(t, v);
            track_plan_.assigned_this_dwell = 0;
            return;
        }
        if (track_plan_.armed &&
            static_cast<std::size_t>(track_plan_.assigned_this_dwell) < track_plan_.queue.size() &&
            track_plan_.assigned_this_dwell < offset) {
            int beam = track_plan_.queue[static_cast<std::size_t>(track_plan_.assigned_this_dwell)];
            double v = station_rss(tracked_station_, bs, beam, t);
            track_plan_.results[beam] = v;
            track_plan_.assigned_this_dwell++;
            log_probe(t, tracked_station_, beam, v);
        } else {
            double v = station_rss(tracked_station_, bs, *store_.neighbor_beam, t);
            note_operating(t, *store_.neighbor_beam, v);
        }
        if (last && track_plan_.armed) resolve_tracking_plan(t);
    }

    void scan_slot(long long k, double t, const std::vector<int>& station_set) {
        ScanState& scan = active_scan();
        if (!scan.active) return;
        int candidate = scan.candidate(sc_.mobile_codebook.size());
        for (int si : station_set) {
            auto [dwell, offset] = local_dwell(si, k);
            (void)offset;
            int bs = station(si).sweep.beam_order[static_cast<std::size_t>(dwell)];
            double v = station_rss(si, bs, candidate, t);
            if (v > scan.best) {
                scan.best = v;
                scan.best_t = t;
                scan.best_station = si;
                scan.best_bs_beam = bs;
            }
        }
    }

    // ---- decisions -------------------------------------------------------

    void act_on_serving_sample(double t, double v) {
        Sample s{t, serving_, *store_.los_beam, v};
        OnSampleResult r = on_sample(serving_state_, store_, sc_.protocol, sc_.channel, s);
        for (const Action& a : r.actions) {
            switch (a.kind) {
                case ActionKind::SwitchToGr:
                    transition(t, serving_state_, ProtocolState::NlosOperation, "blockage_drop");
                    push_beam_switch(t, serving_, *store_.los_beam, a.beam, "gr_fallback", -1);
                    break;
                case ActionKind::OutageStart:
                    begin_outage(t, "blockage_no_fallback");
                    break;
                case ActionKind::BeginScan:
                    transition(t, serving_state_, ProtocolState::ExhaustiveSearch, "blockage_drop");
                    arm_serving_scan();
                    break;
                case ActionKind::ProbeNeighbors: {
                    plan_ = ProbePlan{};
                    plan_.purpose = ProbePlan::Purpose::LosAdapt;
                    plan_.queue = angular_neighbors(sc_.mobile_codebook, *store_.los_beam);
                    plan_.incumbent_rss = v;
                    plan_.armed = true;
                    break;
                }
                default: break;
            }
        }
        serving_state_ = r.state;
    }

    void act_on_tracking_sample(double t, double v) {
        Sample s{t, tracked_station_, *store_.neighbor_beam, v};
        OnSampleResult r = on_sample(ProtocolState::NeighborTracking, store_, sc_.protocol, sc_.channel, s);
        for (const Action& a : r.actions) {
            if (a.kind == ActionKind::ProbeNeighbors) {
                track_plan_ = ProbePlan{};
                track_plan_.purpose = ProbePlan::Purpose::Track;
                track_plan_.queue = angular_neighbors(sc_.mobile_codebook, *store_.neighbor_beam);
                track_plan_.incumbent_rss = v;
                track_plan_.armed = true;
            }
        }
    }

    void resolve_serving_plan(double t) {
        if (static_cast<std::size_t>(plan_.assigned_this_dwell) < plan_.queue.size()) {
            // more candidates than dwell slots; finish in the next sweep period
            plan_.queue.erase(plan_.queue.begin(), plan_.queue.begin() + plan_.assigned_this_dwell);
            return;
        }
        if (plan_.purpose == ProbePlan::Purpose::LosAdapt) {
            int old = *store_.los_beam;
            AdaptResult ar = los_adapt(store_, sc_.mobile_codebook, plan_.results, plan_.incumbent_rss);
            double chosen_rss = ar.switched ? plan_.results[ar.beam] : plan_.incumbent_rss;
            if (ar.switched) {
                push_beam_switch(t, serving_, old, ar.beam, "adapt", total_probes(plan_));
                note_operating(t, ar.beam, chosen_rss);
                enter_grd(t, "serving_beam_moved");
            } else {
                note_operating(t, old, chosen_rss);
            }
        } else { // Grd
            GrdResult gr = grd_search(store_, sc_.channel, plan_.results);
            transition(t, ProtocolState::GroundReflectedDiscovery, ProtocolState::LosOperation,
                       gr.gr_beam ? "gr_stored" : "gr_not_found");
            serving_state_ = ProtocolState::LosOperation;
            periods_since_grd_ = 0;
        }
        plan_ = ProbePlan{};
    }

    void resolve_tracking_plan(double t) {
        if (static_cast<std::size_t>(track_plan_.assigned_this_dwell) < track_plan_.queue.size()) {
            track_plan_.queue.erase(track_plan_.queue.begin(),
                                    track_plan_.queue.begin() + track_plan_.assigned_this_dwell);
            return;
        }
        int old = *store_.neighbor_beam;
        int probes = static_cast<int>(track_plan_.results.size());
        AdaptResult ar = nrba_adapt(store_, sc_.mobile_codebook, sc_.channel, track_plan_.results,
                                    track_plan_.incumbent_rss);
        if (ar.lost) {
            transition(t, ProtocolState::NeighborTracking, ProtocolState::NeighborAcquisition, "lost");
            neighbor_state_ = ProtocolState::NeighborAcquisition;
            arm_neighbor_scan();
            operating_best_ = -INFINITY; // nothing decodable, no sample this period
            operating_beam_ = -1;
        } else {
            double chosen_rss = ar.switched ? track_plan_.results[ar.beam] : track_plan_.incumbent_rss;
            if (ar.switched)
                push_beam_switch(t, tracked_station_, old, ar.beam, "adapt", probes);
            note_operating(t, *store_.neighbor_beam, chosen_rss);
        }
        track_plan_ = ProbePlan{};
    }

    void resolve_nlos_dwell(double t) {
        if (operating_best_ == -INFINITY) return;
        Sample s{operating_t_, serving_, *store_.gr_beam, operating_best_};
        OnSampleResult r = on_sample(ProtocolState::NlosOperation, store_, sc_.protocol, sc_.channel, s);
        for (const Action& a : r.actions) {
            if (a.kind == ActionKind::OutageStart) begin_outage(t, "gr_lost");
            if (a.kind == ActionKind::BeginScan) {
                transition(t, ProtocolState::NlosOperation, ProtocolState::ExhaustiveSearch, "gr_lost");
                arm_serving_scan();
            }
        }
        serving_state_ = r.state;
    }

    void enter_grd(double t, const char* reason) {
        auto cands = grd_candidates(sc_.mobile_codebook, *store_.los_beam, sc_.protocol.pose_available);
        transition(t, ProtocolState::LosOperation, ProtocolState::GroundReflectedDiscovery, reason);
        serving_state_ = ProtocolState::GroundReflectedDiscovery;
        if (cands.empty()) {
            store_.gr_beam.reset();
            transition(t, ProtocolState::GroundReflectedDiscovery, ProtocolState::LosOperation,
                       "gr_not_found");
            serving_state_ = ProtocolState::LosOperation;
            periods_since_grd_ = 0;
            return;
        }
        plan_ = ProbePlan{};
        plan_.purpose = ProbePlan::Purpose::Grd;
        plan_.queue = cands;
        plan_.armed = true;
    }

    // ---- period end ------------------------------------------------------

    void end_period(long long k, double t_end) {
        long long p = k / spp_;
        if (side_ == Side::Survey) {
            finish_scan_dwell(t_end, true);
            return;
        }
        if (side_ == Side::Neighbor) {
            if (neighbor_state_ == ProtocolState::NeighborAcquisition && neighbor_scan_.active)
                finish_scan_dwell(t_end, false);
            else
                flush_measurement(p);
            return;
        }
        // serving side
        if (serving_state_ == ProtocolState::ExhaustiveSearch) {
            if (!std::isnan(reconnect_until_)) {
                if (t_end >= reconnect_until_) complete_reconnect(reconnect_until_);
            } else if (serving_scan_.active) {
                finish_serving_scan_dwell(t_end);
            }
            return;
        }
        flush_measurement(p);
        ++periods_since_grd_;
        if (serving_state_ == ProtocolState::LosOperation && !plan_.armed && !store_.gr_beam &&
            (!grd_ever_run_ || periods_since_grd_ >= sc_.protocol.grd_retry_periods)) {
            grd_ever_run_ = true;
            enter_grd(t_end, grd_attempted_once_ ? "reserve_refresh" : "initial_reserve");
            grd_attempted_once_ = true;
        }
    }

    void flush_measurement(long long p) {
        if (operating_best_ == -INFINITY) return;
        TraceEvent e;
        e.t = operating_t_;
        e.kind = EventKind::Measurement;
        e.station = side_ == Side::Neighbor ? tracked_station_ : serving_;
        e.beam = operating_beam_;
        e.rss = operating_best_;
        if (sc_.sim.oracle_stride_periods > 0 && p % sc_.sim.oracle_stride_periods == 0) {
            int si = e.station;
            int bs = side_ == Side::Neighbor ? tracked_bs_beam_ : serving_bs_beam_;
            e.oracle = oracle_rss(si, bs, operating_t_);
        }
        trace_.events.push_back(e);
        operating_best_ = -INFINITY;
        operating_beam_ = -1;
    }

    void finish_scan_dwell(double t_end, bool survey) {
        ScanState& scan = active_scan();
        if (!scan.active) return;
        int n = sc_.mobile_codebook.size();
        int candidate = scan.candidate(n);
        log_scan_measurement(scan.best_t > 0 ? scan.best_t : t_end - slot_, candidate, scan);
        if (scan.best > scan.cycle_best) {
            scan.cycle_best = scan.best;
            scan.cycle_beam = candidate;
            scan.cycle_station = scan.best_station;
            scan.cycle_bs_beam = scan.best_bs_beam;
        }
        // surveys time to the first decode; the protocol trusts the
        // pose-predicted beam at the decode floor but makes any other
        // candidate clear a margin, so a marginal brush in a far lobe
        // does not masquerade as a link
        double bar = sc_.channel.decode_threshold_dbm +
                     (survey || candidate == scan.prior_beam
                          ? 0.0
                          : sc_.protocol.acquire_margin_db);
        bool found = scan.best >= bar;
        int acq_beam = candidate;
        double acq_rss = scan.best;
        int acq_station = scan.best_station;
        int acq_bs_beam = scan.best_bs_beam;
        scan.idx++;
        if (!found && !survey && scan.idx >= n &&
            scan.cycle_best >= sc_.channel.decode_threshold_dbm) {
            found = true;
            acq_beam = scan.cycle_beam;
            acq_rss = scan.cycle_best;
            acq_station = scan.cycle_station;
            acq_bs_beam = scan.cycle_bs_beam;
        }
        if (found) {
            // acquisition latency spans the whole episode: a fruitless full
            // cycle re-arms the scan but the clock keeps running
            int dwells = static_cast<int>(episode_dwells_) + scan.idx;
            episode_dwells_ = 0;
            if (survey) {
                push_scan_transition(t_end, "scan_complete", dwells);
                arm_survey_scan();
            } else {
                store_.neighbor_beam = acq_beam;
                store_.neighbor_ref.reset(acq_rss);
                tracked_station_ = acq_station;
                tracked_bs_beam_ = acq_bs_beam;
                neighbor_scan_.active = false;
                TraceEvent e;
                e.t = t_end;
                e.kind = EventKind::StateTransition;
                e.from_state = to_string(ProtocolState::NeighborAcquisition);
                e.to_state = to_string(ProtocolState::NeighborTracking);
                e.reason = "acquired";
                e.dwells = dwells;
                trace_.events.push_back(e);
                push_beam_switch(t_end, tracked_station_, -1, acq_beam, "acquired", -1);
                neighbor_state_ = ProtocolState::NeighborTracking;
                // the chosen beam can still sit a whole beam off the peak;
                // refine on the next tracked occasion
                track_plan_ = ProbePlan{};
                track_plan_.purpose = ProbePlan::Purpose::Track;
                track_plan_.queue = angular_neighbors(sc_.mobile_codebook, acq_beam);
                track_plan_.incumbent_rss = acq_rss;
                track_plan_.armed = true;
            }
            return;
        }
        if (scan.idx >= n) { // full cycle, nothing usable
            episode_dwells_ += n;
            push_scan_transition(t_end, "scan_failed", n);
            if (survey)
                arm_survey_scan();
            else
                arm_neighbor_scan();
        }
    }

    void finish_serving_scan_dwell(double t_end) {
        ScanState& scan = serving_scan_;
        int n = sc_.mobile_codebook.size();
        int candidate = scan.candidate(n);
        log_scan_measurement(scan.best_t > 0 ? scan.best_t : t_end - slot_, candidate, scan);
        if (scan.best > scan.cycle_best) {
            scan.cycle_best = scan.best;
            scan.cycle_beam = candidate;
            scan.cycle_station = scan.best_station;
            scan.cycle_bs_beam = scan.best_bs_beam;
        }
        scan.idx++;
        if (scan.idx < n) return;
        // full cycle done; reconnect on the argmax if it decodes at all,
        // otherwise start another sweep and keep searching through the outage
        if (scan.cycle_best >= sc_.channel.decode_threshold_dbm) {
            es_found_beam_ = scan.cycle_beam;
            es_found_rss_ = scan.cycle_best;
            es_found_bs_beam_ = scan.cycle_bs_beam;
            es_dwells_ = scan.idx;
            scan.active = false;
            reconnect_until_ = t_end + sc_.protocol.reconnect_penalty_s;
            return;
        }
        arm_serving_scan();
    }

    void complete_reconnect(double t) {
        store_.los_beam = es_found_beam_;
        store_.los_ref.reset(es_found_rss_);
        store_.gr_beam.reset();
        serving_bs_beam_ = es_found_bs_beam_;
        end_outage(t);
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::Reconnect;
        e.penalty = sc_.protocol.reconnect_penalty_s;
        e.dwells = es_dwells_;
        trace_.events.push_back(e);
        transition(t, ProtocolState::ExhaustiveSearch, ProtocolState::LosOperation, "reconnect");
        serving_state_ = ProtocolState::LosOperation;
        reconnect_until_ = NAN;
        periods_since_grd_ = sc_.protocol.grd_retry_periods; // refresh promptly
    }

    // ---- scans -----------------------------------------------------------

    ScanState& active_scan() {
        if (side_ == Side::Survey) return survey_scan_;
        if (side_ == Side::Neighbor) return neighbor_scan_;
        return serving_scan_;
    }

    void arm_survey_scan() {
        survey_scan_ = ScanState{};
        survey_scan_.active = true;
        survey_scan_.start = static_cast<int>(scan_rng_->uniform_index(
            static_cast<std::uint64_t>(sc_.mobile_codebook.size())));
    }
    void arm_neighbor_scan() {
        neighbor_scan_ = ScanState{};
        neighbor_scan_.active = true;
        // with pose knowledge the handset aims where the station should be
        // and sweeps outward from there; otherwise straight ahead is the
        // only prior worth having
        int start = nearest_beam(sc_.mobile_codebook, 0.0, 0.0);
        if (sc_.protocol.pose_available && !neighbors_.empty()) {
            int target = neighbors_.front();
            double best_d2 = INFINITY;
            for (int si : neighbors_) {
                const Pose& sp = station(si).pose;
                double dx = sp.x - pose_.x, dy = sp.y - pose_.y;
                double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) { best_d2 = d2; target = si; }
            }
            PathComponent fwd = los_path(pose_, station(target).pose);
            start = nearest_beam(sc_.mobile_codebook,
                                 wrap_deg(fwd.depart_az_deg - pose_.boresight_az_deg),
                                 fwd.depart_zen_deg - pose_.boresight_zen_deg);
            neighbor_scan_.prior_beam = start;
        }
        neighbor_scan_.start = start;
    }
    void arm_serving_scan() {
        serving_scan_ = ScanState{};
        serving_scan_.active = true;
        serving_scan_.start = static_cast<int>(scan_rng_->uniform_index(
            static_cast<std::uint64_t>(sc_.mobile_codebook.size())));
    }

    // ---- channel hooks ---------------------------------------------------

    const Station& station(int i) const { return sc_.stations[static_cast<std::size_t>(i)]; }

    std::pair<int, int> local_dwell(int si, long long k) const {
        int spd = spd_[static_cast<std::size_t>(si)];
        long long local = (k - phase_slots_[static_cast<std::size_t>(si)]) % spp_;
        if (local < 0) local += spp_;
        return {static_cast<int>(local / spd), static_cast<int>(local % spd)};
    }

    int best_bs_beam_toward_mobile(int si) const {
        const Station& st = station(si);
        PathComponent los = los_path(st.pose, pose_);
        return nearest_beam(st.codebook, wrap_deg(los.depart_az_deg - st.pose.boresight_az_deg),
                            los.depart_zen_deg - st.pose.boresight_zen_deg);
    }

    double station_rss(int si, int bs_beam, int rx_beam, double t) const {
        const Station& st = station(si);
        bool force_blocked = false, force_clear = false;
        if (!std::isnan(sc_.gr_availability)) {
            int ev = blockers_->event_at(t);
            if (ev >= 0) {
                auto it = gr_avail_.find(ev);
                if (it == gr_avail_.end()) {
                    bool avail =
                        Rng(derive_seed(sc_.seed, 0xA3, static_cast<std::uint64_t>(ev))).uniform() <
                        sc_.gr_availability;
                    it = gr_avail_.emplace(ev, avail).first;
                }
                force_blocked = !it->second;
                force_clear = it->second;
            }
        }
        return rss_detail(sc_.channel, st.pose, pose_, st.codebook, bs_beam, sc_.mobile_codebook,
                          rx_beam, scratch_blockers_, force_blocked, force_clear)
            .total_dbm;
    }

    // Reference receiver: best rx beam for the same instant and tx beam.
    double oracle_rss(int si, int bs_beam, double t) {
        Pose saved_pose = pose_;
        std::vector<Blocker> saved_blockers = scratch_blockers_;
        pose_ = mobility_->at(t);
        blockers_->at(t, scratch_blockers_);
        double best = -INFINITY;
        for (int b = 0; b < sc_.mobile_codebook.size(); ++b)
            best = std::max(best, station_rss(si, bs_beam, b, t));
        pose_ = saved_pose;
        scratch_blockers_ = std::move(saved_blockers);
        return best;
    }

    int current_serving_beam() const {
        return serving_state_ == ProtocolState::NlosOperation ? *store_.gr_beam : *store_.los_beam;
    }

    // ---- blockage ground truth & outage ----------------------------------

    void update_blockage_truth(double t) {
        if (serving_ < 0 || sc_.sim.mode == SimMode::ScanSurvey) return;
        bool occ = any_blocks_los(station(serving_).pose, pose_, scratch_blockers_);
        if (occ && !blockage_active_) {
            blockage_active_ = true;
            TraceEvent e;
            e.t = t;
            e.kind = EventKind::BlockageStart;
            e.ref = store_.los_ref_rss();
            trace_.events.push_back(e);
        } else if (!occ && blockage_active_) {
            blockage_active_ = false;
            TraceEvent e;
            e.t = t;
            e.kind = EventKind::BlockageEnd;
            trace_.events.push_back(e);
        }
    }

    void begin_outage(double t, const char* reason) {
        if (outage_active_) return;
        outage_active_ = true;
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::OutageStart;
        e.reason = reason;
        trace_.events.push_back(e);
    }

    void end_outage(double t) {
        if (!outage_active_) return;
        outage_active_ = false;
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::OutageEnd;
        trace_.events.push_back(e);
    }

    void finalize(double t) {
        if (blockage_active_) {
            TraceEvent e;
            e.t = t;
            e.kind = EventKind::BlockageEnd;
            e.reason = "horizon";
            trace_.events.push_back(e);
            blockage_active_ = false;
        }
        if (outage_active_) {
            TraceEvent e;
            e.t = t;
            e.kind = EventKind::OutageEnd;
            e.reason = "horizon";
            trace_.events.push_back(e);
            outage_active_ = false;
        }
    }

    // ---- logging ---------------------------------------------------------

    // Period sample: max over operating slots; a beam change (switch) starts
    // a fresh record so the logged sample always describes the final beam.
    void note_operating(double t, int beam, double v) {
        if (beam != operating_beam_ || v > operating_best_) {
            operating_best_ = v;
            operating_beam_ = beam;
            operating_t_ = t;
        }
    }

    void log_probe(double t, int si, int beam, double v) {
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::Measurement;
        e.station = si;
        e.beam = beam;
        e.rss = v;
        e.probe = true;
        trace_.events.push_back(e);
    }

    void log_scan_measurement(double t, int beam, const ScanState& scan) {
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::Measurement;
        if (scan.best_station >= 0) e.station = scan.best_station;
        e.beam = beam;
        e.rss = scan.best == -INFINITY ? sc_.channel.noise_floor_dbm : scan.best;
        e.scan = true;
        trace_.events.push_back(e);
    }

    void push_scan_transition(double t, const char* reason, int dwells) {
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::StateTransition;
        e.from_state = to_string(ProtocolState::NeighborAcquisition);
        e.to_state = to_string(ProtocolState::NeighborAcquisition);
        e.reason = reason;
        e.dwells = dwells;
        trace_.events.push_back(e);
    }

    void transition(double t, ProtocolState from, ProtocolState to, const char* reason) {
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::StateTransition;
        e.from_state = to_string(from);
        e.to_state = to_string(to);
        e.reason = reason;
        trace_.events.push_back(e);
    }

    void push_beam_switch(double t, int si, int from, int to, const char* reason, int probes) {
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::BeamSwitch;
        e.station = si;
        e.from_beam = from;
        e.to_beam = to;
        e.reason = reason;
        if (probes >= 0) e.probes = probes;
        trace_.events.push_back(e);
    }

    static int total_probes(const ProbePlan& p) { return static_cast<int>(p.results.size()); }

    std::vector<int> all_station_ids_() const {
        std::vector<int> v(sc_.stations.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
        return v;
    }

    // ---- members ---------------------------------------------------------

    Scenario sc_;
    double slot_ = 100e-6;
    int spp_ = 200;
    long long n_slots_ = 0;
    int serving_ = -1;
    std::vector<int> neighbors_;
    std::vector<int> spd_;
    std::vector<int> phase_slots_;
    std::optional<MobilitySampler> mobility_;
    std::optional<BlockerSampler> blockers_;
    std::optional<Rng> scan_rng_;

    Trace trace_;
    Pose pose_;
    std::vector<Blocker> scratch_blockers_;

    BeamStore store_;
    ProtocolState serving_state_ = ProtocolState::LosOperation;
    ProtocolState neighbor_state_ = ProtocolState::NeighborAcquisition;
    Side side_ = Side::Serving;
    int serving_bs_beam_ = -1;

    ProbePlan plan_;
    ProbePlan track_plan_;
    ScanState serving_scan_, neighbor_scan_, survey_scan_;
    long long episode_dwells_ = 0; // carried across fruitless scan cycles
    mutable std::map<int, bool> gr_avail_;
    int tracked_station_ = -1;
    int tracked_bs_beam_ = -1;
    long long periods_since_grd_ = 0;
    bool grd_ever_run_ = false;
    bool grd_attempted_once_ = false;
    bool revert_this_dwell_ = false;

    double reconnect_until_ = NAN;
    int es_found_beam_ = -1;
    int es_found_bs_beam_ = -1;
    double es_found_rss_ = -INFINITY;
    int es_dwells_ = 0;

    bool blockage_active_ = false;
    bool outage_active_ = false;

    double operating_best_ = -INFINITY;
    double operating_t_ = 0;
    int operating_beam_ = -1;
};

inline Trace run_scenario(const Scenario& sc) { return Engine(sc).run(); }

} // namespace terra
