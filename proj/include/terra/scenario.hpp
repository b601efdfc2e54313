#pragma once

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "terra/sweep.hpp"

namespace terra {

inline constexpr const char* kScenarioSchema = "scenario_v1";

namespace detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

inline void expect_keys(const json& j, const std::string& path,
                        std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ScenarioError("expected an object at " + path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ScenarioError("unknown key " + path + "/" + it.key());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

inline Pose parse_pose(const json& j, const std::string& path) {
    expect_keys(j, path, {"x", "y", "height", "boresight_az_deg", "boresight_zen_deg"});
    Pose p;
    p.x = get_or(j, "x", 0.0);
    p.y = get_or(j, "y", 0.0);
    p.height = get_or(j, "height", 0.0);
    p.boresight_az_deg = get_or(j, "boresight_az_deg", 0.0);
    p.boresight_zen_deg = get_or(j, "boresight_zen_deg", 0.0);
    return p;
}

inline ojson dump_pose(const Pose& p) {
    return ojson{{"x", p.x},
                 {"y", p.y},
                 {"height", p.height},
                 {"boresight_az_deg", p.boresight_az_deg},
                 {"boresight_zen_deg", p.boresight_zen_deg}};
}

inline ArrayGeometry parse_array(const json& j, const std::string& path, double carrier_hz) {
    expect_keys(j, path,
                {"kind", "elements_x", "elements_y", "spacing_wl", "boresight_gain_db",
                 "sidelobe_floor_db"});
    ArrayGeometry g;
    std::string kind = get_or<std::string>(j, "kind", "linear");
    if (kind == "linear") g.kind = ArrayKind::Linear;
    else if (kind == "planar") g.kind = ArrayKind::Planar;
    else throw ScenarioError("unknown array kind at " + path + ": " + kind);
    g.elements_x = get_or(j, "elements_x", 12);
    g.elements_y = get_or(j, "elements_y", g.kind == ArrayKind::Planar ? 8 : 1);
    g.spacing_wl = get_or(j, "spacing_wl", 0.5);
    g.carrier_hz = carrier_hz;
    g.boresight_gain_db = get_or(j, "boresight_gain_db", 17.0);
    if (j.contains("sidelobe_floor_db") && !j["sidelobe_floor_db"].is_null())
        g.sidelobe_floor_db = j["sidelobe_floor_db"].get<double>();
    return g;
}

inline ojson dump_array(const ArrayGeometry& g) {
    ojson o{{"kind", g.kind == ArrayKind::Planar ? "planar" : "linear"},
            {"elements_x", g.elements_x},
            {"elements_y", g.elements_y},
            {"spacing_wl", g.spacing_wl},
            {"boresight_gain_db", g.boresight_gain_db}};
    if (g.sidelobe_floor_db) o["sidelobe_floor_db"] = *g.sidelobe_floor_db;
    return o;
}

struct CodebookSpec {
    double az_lo = -50, az_hi = 60;
    int n_az = 25;
    double zen_lo = 0, zen_hi = 0;
    int n_zen = 1;
};

inline CodebookSpec parse_codebook(const json& j, const std::string& path) {
    expect_keys(j, path, {"az_lo_deg", "az_hi_deg", "n_az", "zen_lo_deg", "zen_hi_deg", "n_zen"});
    CodebookSpec s;
    s.az_lo = get_or(j, "az_lo_deg", -50.0);
    s.az_hi = get_or(j, "az_hi_deg", 60.0);
    s.n_az = get_or(j, "n_az", 25);
    s.zen_lo = get_or(j, "zen_lo_deg", 0.0);
    s.zen_hi = get_or(j, "zen_hi_deg", 0.0);
    s.n_zen = get_or(j, "n_zen", 1);
    return s;
}

inline ojson dump_codebook(const Codebook& cb) {
    double az_lo = cb.beams.front().steer_az_deg;
    double az_hi = cb.beams.back().steer_az_deg;
    double zen_lo = cb.beams.front().steer_zen_deg;
    double zen_hi = cb.beams.back().steer_zen_deg;
    return ojson{{"az_lo_deg", az_lo},   {"az_hi_deg", az_hi},   {"n_az", cb.cols},
                 {"zen_lo_deg", zen_lo}, {"zen_hi_deg", zen_hi}, {"n_zen", cb.rows}};
}

inline Codebook build_codebook(const ArrayGeometry& g, const CodebookSpec& s) {
    return make_codebook(g, s.az_lo, s.az_hi, s.n_az, s.zen_lo, s.zen_hi, s.n_zen);
}

inline MobilityModel parse_mobility(const json& j, const std::string& path) {
    expect_keys(j, path,
                {"kind", "speed_mps", "heading_deg", "trajectory_length_m", "angular_velocity_dps",
                 "sector_lo_deg", "sector_hi_deg", "bounds", "jitter_amplitude_deg",
                 "jitter_rate_cap_dps", "jitter_interval_s", "seed"});
    MobilityModel m;
    std::string kind = get_or<std::string>(j, "kind", "static");
    if (kind == "static") m.kind = MobilityKind::Static;
    else if (kind == "linear_walk") m.kind = MobilityKind::LinearWalk;
    else if (kind == "rotational") m.kind = MobilityKind::Rotational;
    else if (kind == "free_walk") m.kind = MobilityKind::FreeWalk;
    else throw ScenarioError("unknown mobility kind at " + path + ": " + kind);
    m.speed_mps = get_or(j, "speed_mps", 1.0);
    m.heading_deg = get_or(j, "heading_deg", 0.0);
    m.trajectory_length_m = get_or(j, "trajectory_length_m", 2.0);
    m.angular_velocity_dps = get_or(j, "angular_velocity_dps", 90.0);
    m.sector_lo_deg = get_or(j, "sector_lo_deg", -45.0);
    m.sector_hi_deg = get_or(j, "sector_hi_deg", 45.0);
    if (j.contains("bounds")) {
        auto b = j["bounds"].get<std::vector<double>>();
        if (b.size() != 4) throw ScenarioError("bounds at " + path + " must have 4 numbers");
        for (int i = 0; i < 4; ++i)
            m.bounds[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)];
    }
    m.jitter_amplitude_deg = get_or(j, "jitter_amplitude_deg", 10.0);
    m.jitter_rate_cap_dps = get_or(j, "jitter_rate_cap_dps", 458.0);
    m.jitter_interval_s = get_or(j, "jitter_interval_s", 0.25);
    m.seed = get_or<std::uint64_t>(j, "seed", 0);
    return m;
}

inline ojson dump_mobility(const MobilityModel& m) {
    const char* kind = "static";
    if (m.kind == MobilityKind::LinearWalk) kind = "linear_walk";
    if (m.kind == MobilityKind::Rotational) kind = "rotational";
    if (m.kind == MobilityKind::FreeWalk) kind = "free_walk";
    ojson o{{"kind", kind},
            {"speed_mps", m.speed_mps},
            {"heading_deg", m.heading_deg},
            {"trajectory_length_m", m.trajectory_length_m},
            {"angular_velocity_dps", m.angular_velocity_dps},
            {"sector_lo_deg", m.sector_lo_deg},
            {"sector_hi_deg", m.sector_hi_deg},
            {"jitter_amplitude_deg", m.jitter_amplitude_deg},
            {"jitter_rate_cap_dps", m.jitter_rate_cap_dps},
            {"jitter_interval_s", m.jitter_interval_s},
            {"seed", m.seed}};
    if (m.kind == MobilityKind::FreeWalk)
        o["bounds"] = {m.bounds[0], m.bounds[1], m.bounds[2], m.bounds[3]};
    return o;
}

inline BlockerProcess parse_blockers(const json& j, const std::string& path) {
    expect_keys(j, path,
                {"arrival_rate_hz", "duration_mean_s", "duration_jitter", "crossing_speed_mps",
                 "line", "blocker_height_m", "blocker_width_m", "scripted_times", "seed"});
    BlockerProcess b;
    b.arrival_rate_hz = get_or(j, "arrival_rate_hz", 0.0);
    b.duration_mean_s = get_or(j, "duration_mean_s", 0.2);
    b.duration_jitter = get_or(j, "duration_jitter", 0.25);
    b.crossing_speed_mps = get_or(j, "crossing_speed_mps", 1.0);
    if (j.contains("line")) {
        auto l = j["line"].get<std::vector<double>>();
        if (l.size() != 4) throw ScenarioError("line at " + path + " must have 4 numbers");
        b.line_x0 = l[0];
        b.line_y0 = l[1];
        b.line_x1 = l[2];
        b.line_y1 = l[3];
    }
    b.blocker_height_m = get_or(j, "blocker_height_m", 1.78);
    b.blocker_width_m = get_or(j, "blocker_width_m", 0.40);
    if (j.contains("scripted_times"))
        b.scripted_times = j["scripted_times"].get<std::vector<double>>();
    b.seed = get_or<std::uint64_t>(j, "seed", 0);
    return b;
}

inline ojson dump_blockers(const BlockerProcess& b) {
    ojson o{{"arrival_rate_hz", b.arrival_rate_hz},
            {"duration_mean_s", b.duration_mean_s},
            {"duration_jitter", b.duration_jitter},
            {"crossing_speed_mps", b.crossing_speed_mps},
            {"line", {b.line_x0, b.line_y0, b.line_x1, b.line_y1}},
            {"blocker_height_m", b.blocker_height_m},
            {"blocker_width_m", b.blocker_width_m},
            {"seed", b.seed}};
    if (!b.scripted_times.empty()) o["scripted_times"] = b.scripted_times;
    return o;
}

inline ChannelConfig parse_channel(const json& j, const std::string& path, double& calibrate,
                                   bool& has_calibrate) {
    expect_keys(j, path,
                {"carrier_hz", "tx_power_dbm", "system_loss_db", "calibrate_rss_los_dbm",
                 "blockage_attenuation_db", "noise_floor_dbm", "decode_threshold_dbm",
                 "gr_loss_table"});
    ChannelConfig c;
    c.carrier_hz = get_or(j, "carrier_hz", 60e9);
    c.tx_power_dbm = get_or(j, "tx_power_dbm", 20.0);
    c.system_loss_db = get_or(j, "system_loss_db", 0.0);
    c.blockage_attenuation_db = get_or(j, "blockage_attenuation_db", 20.0);
    c.noise_floor_dbm = get_or(j, "noise_floor_dbm", -78.0);
    c.decode_threshold_dbm = get_or(j, "decode_threshold_dbm", c.noise_floor_dbm + 10.0);
    if (j.contains("gr_loss_table")) {
        c.gr_loss.entries.clear();
        for (const auto& e : j["gr_loss_table"]) {
            auto row = e.get<std::vector<double>>();
            if (row.size() != 2)
                throw ScenarioError("gr_loss_table rows at " + path + " must be [tilt, loss]");
            c.gr_loss.entries.emplace_back(row[0], row[1]);
        }
    }
    has_calibrate = j.contains("calibrate_rss_los_dbm") && !j["calibrate_rss_los_dbm"].is_null();
    if (has_calibrate) calibrate = j["calibrate_rss_los_dbm"].get<double>();
    return c;
}

inline ojson dump_channel(const ChannelConfig& c, const std::optional<double>& calibrate) {
    ojson o{{"carrier_hz", c.carrier_hz},
            {"tx_power_dbm", c.tx_power_dbm},
            {"system_loss_db", c.system_loss_db},
            {"blockage_attenuation_db", c.blockage_attenuation_db},
            {"noise_floor_dbm", c.noise_floor_dbm},
            {"decode_threshold_dbm", c.decode_threshold_dbm}};
    if (calibrate) o["calibrate_rss_los_dbm"] = *calibrate;
    ojson table = ojson::array();
    for (const auto& [tilt, loss] : c.gr_loss.entries) table.push_back({tilt, loss});
    o["gr_loss_table"] = table;
    return o;
}

inline ProtocolConfig parse_protocol(const json& j, const std::string& path) {
    expect_keys(j, path,
                {"blockage_drop_db", "adapt_drop_db", "revert_margin_db", "ref_window",
                 "reconnect_penalty_s", "neighbor_multiplex", "grd_retry_periods",
                 "acquire_margin_db", "pose_available"});
    ProtocolConfig p;
    p.blockage_drop_db = get_or(j, "blockage_drop_db", 15.0);
    p.adapt_drop_db = get_or(j, "adapt_drop_db", 3.0);
    p.revert_margin_db = get_or(j, "revert_margin_db", 3.0);
    p.ref_window = get_or(j, "ref_window", 10);
    p.reconnect_penalty_s = get_or(j, "reconnect_penalty_s", 1.0);
    p.neighbor_multiplex = get_or(j, "neighbor_multiplex", 4);
    p.grd_retry_periods = get_or(j, "grd_retry_periods", 50);
    p.acquire_margin_db = get_or(j, "acquire_margin_db", 6.0);
    p.pose_available = get_or(j, "pose_available", true);
    return p;
}

inline ojson dump_protocol(const ProtocolConfig& p) {
    return ojson{{"blockage_drop_db", p.blockage_drop_db},
                 {"adapt_drop_db", p.adapt_drop_db},
                 {"revert_margin_db", p.revert_margin_db},
                 {"ref_window", p.ref_window},
                 {"reconnect_penalty_s", p.reconnect_penalty_s},
                 {"neighbor_multiplex", p.neighbor_multiplex},
                 {"grd_retry_periods", p.grd_retry_periods},
                 {"acquire_margin_db", p.acquire_margin_db},
                 {"pose_available", p.pose_available}};
}

inline SimSection parse_sim(const json& j, const std::string& path) {
    expect_keys(j, path, {"horizon_s", "slot_s", "mode", "oracle_stride_periods"});
    SimSection s;
    s.horizon_s = get_or(j, "horizon_s", 1.0);
    s.slot_s = get_or(j, "slot_s", 100e-6);
    std::string mode = get_or<std::string>(j, "mode", "protocol");
    if (mode == "protocol") s.mode = SimMode::Protocol;
    else if (mode == "scan_survey") s.mode = SimMode::ScanSurvey;
    else throw ScenarioError("unknown sim mode at " + path + ": " + mode);
    s.oracle_stride_periods = get_or(j, "oracle_stride_periods", 0);
    return s;
}

inline ojson dump_sim(const SimSection& s) {
    return ojson{{"horizon_s", s.horizon_s},
                 {"slot_s", s.slot_s},
                 {"mode", s.mode == SimMode::ScanSurvey ? "scan_survey" : "protocol"},
                 {"oracle_stride_periods", s.oracle_stride_periods}};
}

inline AnalysisSection parse_analysis(const json& j, const std::string& path) {
    expect_keys(j, path, {"outage_floor_dbm", "within_margin_db", "oracle_margin_db"});
    AnalysisSection a;
    a.outage_floor_dbm = get_or(j, "outage_floor_dbm", -70.0);
    a.within_margin_db = get_or(j, "within_margin_db", 6.0);
    a.oracle_margin_db = get_or(j, "oracle_margin_db", 3.0);
    return a;
}

inline ojson dump_analysis(const AnalysisSection& a) {
    return ojson{{"outage_floor_dbm", a.outage_floor_dbm},
                 {"within_margin_db", a.within_margin_db},
                 {"oracle_margin_db", a.oracle_margin_db}};
}

} // namespace detail

inline Scenario load_scenario(const nlohmann::json& j) {
    using namespace detail;
    expect_keys(j, "",
                {"schema", "name", "seed", "channel", "gr_availability", "mobile", "stations",
                 "mobility", "blockers", "protocol", "sim", "analysis"});
    if (!j.contains("schema") || j["schema"].get<std::string>() != kScenarioSchema)
        throw ScenarioError("unsupported scenario schema");
    Scenario sc;
    sc.name = get_or<std::string>(j, "name", "scenario");
    sc.seed = get_or<std::uint64_t>(j, "seed", 0);
    double cal = 0;
    bool has_cal = false;
    if (j.contains("channel")) sc.channel = parse_channel(j["channel"], "/channel", cal, has_cal);
    if (has_cal) sc.calibrate_rss_los_dbm = cal;
    if (j.contains("gr_availability") && !j["gr_availability"].is_null())
        sc.gr_availability = j["gr_availability"].get<double>();
    if (!j.contains("mobile")) throw ScenarioError("scenario needs a mobile section");
    expect_keys(j["mobile"], "/mobile", {"pose", "array", "codebook"});
    sc.mobile_start = parse_pose(j["mobile"]["pose"], "/mobile/pose");
    ArrayGeometry mg = parse_array(j["mobile"]["array"], "/mobile/array", sc.channel.carrier_hz);
    sc.mobile_codebook = build_codebook(mg, parse_codebook(j["mobile"]["codebook"], "/mobile/codebook"));
    if (!j.contains("stations") || !j["stations"].is_array() || j["stations"].empty())
        throw ScenarioError("scenario needs a non-empty stations array");
    int idx = 0;
    for (const auto& sj : j["stations"]) {
        std::string path = "/stations/" + std::to_string(idx);
        expect_keys(sj, path, {"pose", "array", "codebook", "sweep", "carrier_id"});
        Station st;
        st.pose = parse_pose(sj.at("pose"), path + "/pose");
        ArrayGeometry g = parse_array(sj.at("array"), path + "/array", sc.channel.carrier_hz);
        st.codebook = build_codebook(g, parse_codebook(sj.at("codebook"), path + "/codebook"));
        if (sj.contains("sweep")) {
            expect_keys(sj["sweep"], path + "/sweep",
                        {"beam_dwell_s", "random_phase", "phase_s", "beam_order"});
            st.sweep.beam_dwell_s = get_or(sj["sweep"], "beam_dwell_s", 800e-6);
            st.sweep.random_phase = get_or(sj["sweep"], "random_phase", true);
            st.sweep.phase_s = get_or(sj["sweep"], "phase_s", 0.0);
            if (sj["sweep"].contains("beam_order"))
                st.sweep.beam_order = sj["sweep"]["beam_order"].get<std::vector<int>>();
        }
        st.carrier_id = get_or(sj, "carrier_id", 0);
        sc.stations.push_back(std::move(st));
        ++idx;
    }
    if (j.contains("mobility")) sc.mobility = parse_mobility(j["mobility"], "/mobility");
    sc.mobility.start = sc.mobile_start;
    if (j.contains("blockers")) sc.blockers = parse_blockers(j["blockers"], "/blockers");
    if (j.contains("protocol")) sc.protocol = parse_protocol(j["protocol"], "/protocol");
    if (j.contains("sim")) sc.sim = parse_sim(j["sim"], "/sim");
    if (j.contains("analysis")) sc.analysis = parse_analysis(j["analysis"], "/analysis");
    return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError("scenario parse error in " + path + ": " + e.what());
    }
    return load_scenario(j);
}

inline nlohmann::ordered_json save_scenario(const Scenario& sc) {
    using namespace detail;
    ojson o;
    o["schema"] = kScenarioSchema;
    o["name"] = sc.name;
    o["seed"] = sc.seed;
    o["channel"] = dump_channel(sc.channel, sc.calibrate_rss_los_dbm);
    if (!std::isnan(sc.gr_availability)) o["gr_availability"] = sc.gr_availability;
    ojson mobile;
    mobile["pose"] = dump_pose(sc.mobile_start);
    mobile["array"] = dump_array(sc.mobile_codebook.geometry);
    mobile["codebook"] = dump_codebook(sc.mobile_codebook);
    o["mobile"] = mobile;
    ojson stations = ojson::array();
    for (const Station& st : sc.stations) {
        ojson sj;
        sj["pose"] = dump_pose(st.pose);
        sj["array"] = dump_array(st.codebook.geometry);
        sj["codebook"] = dump_codebook(st.codebook);
        sj["sweep"] = ojson{{"beam_dwell_s", st.sweep.beam_dwell_s},
                            {"random_phase", st.sweep.random_phase},
                            {"phase_s", st.sweep.phase_s}};
        if (!st.sweep.beam_order.empty()) sj["sweep"]["beam_order"] = st.sweep.beam_order;
        sj["carrier_id"] = st.carrier_id;
        stations.push_back(sj);
    }
    o["stations"] = stations;
    o["mobility"] = dump_mobility(sc.mobility);
    o["blockers"] = dump_blockers(sc.blockers);
    o["protocol"] = dump_protocol(sc.protocol);
    o["sim"] = dump_sim(sc.sim);
    o["analysis"] = dump_analysis(sc.analysis);
    return o;
}

// ---- preset scenarios -----------------------------------------------------

namespace presets {

/// Street-level link: station at 2.5 m, handset at 1 m, 6 m apart, pedestrian
/// crossings in between. Reflected fallback available for most crossings.
inline Scenario blockage(const std::string& name, const GrLossTable& table, double tilt_deg,
                         double availability) {
    Scenario sc;
    sc.name = name;
    sc.seed = 1;
    sc.channel.carrier_hz = 60e9;
    sc.channel.tx_power_dbm = 20.0;
    sc.channel.noise_floor_dbm = -78.0;
    sc.channel.decode_threshold_dbm = -68.0;
    sc.channel.blockage_attenuation_db = 20.0;
    sc.channel.gr_loss = table;
    sc.calibrate_rss_los_dbm = -60.0;
    sc.gr_availability = availability;

    Station bs;
    bs.pose = Pose{0, 0, 2.5, 0, tilt_deg};
    ArrayGeometry bg;
    bg.kind = ArrayKind::Linear;
    bg.elements_x = 12;
    bg.carrier_hz = sc.channel.carrier_hz;
    bs.codebook = make_codebook(bg, -50, 60, 25);
    bs.carrier_id = 0;
    sc.stations.push_back(bs);

    sc.mobile_start = Pose{6, 0, 1.0, 180, 0};
    ArrayGeometry mg;
    mg.kind = ArrayKind::Planar;
    mg.elements_x = 12;
    mg.elements_y = 8;
    mg.carrier_hz = sc.channel.carrier_hz;
    sc.mobile_codebook = make_codebook(mg, -50, 60, 25, -15, 30, 3);

    sc.mobility.kind = MobilityKind::Static;
    // spaced crossings: each recovery (fallback or search + penalty) finishes
    // before the next pedestrian arrives, so events never overlap
    sc.blockers.duration_mean_s = 0.25;
    sc.blockers.duration_jitter = 0.2;
    sc.blockers.crossing_speed_mps = 1.0;
    sc.blockers.line_x0 = 4.5;
    sc.blockers.line_y0 = -0.75;
    sc.blockers.line_x1 = 4.5;
    sc.blockers.line_y1 = 0.75;
    for (int i = 0; i < 10; ++i) sc.blockers.scripted_times.push_back(1.0 + 3.0 * i);
    sc.sim.horizon_s = 30.0;
    sc.sim.mode = SimMode::Protocol;
    return sc;
}

inline GrLossTable concrete_table() {
    return GrLossTable{{{0.0, 6.0}, {10.0, 4.6}, {20.0, 4.05}}};
}

inline GrLossTable gravel_table() {
    // rougher surface: weaker reflection across all tilts
    return GrLossTable{{{0.0, 9.0}, {10.0, 7.4}, {20.0, 6.8}}};
}

inline Scenario blockage_concrete() { return blockage("blockage_concrete", concrete_table(), 0.0, 0.845); }
inline Scenario blockage_gravel() { return blockage("blockage_gravel", gravel_table(), 0.0, 0.845); }

/// Survey base: one station sweeping, handset doing repeated full searches.
inline Scenario search_base(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.seed = 1;
    sc.channel.noise_floor_dbm = -78.0;
    sc.channel.decode_threshold_dbm = -62.0; // only the aligned beam decodes at 6 m
    sc.calibrate_rss_los_dbm = -60.0;
    sc.channel.gr_loss = concrete_table();

    Station bs;
    bs.pose = Pose{0, 0, 2.5, 0, 0};
    ArrayGeometry bg;
    bg.kind = ArrayKind::Linear;
    bg.elements_x = 12;
    bg.carrier_hz = sc.channel.carrier_hz;
    bs.codebook = make_codebook(bg, -50, 60, 25);
    bs.carrier_id = 0;
    sc.stations.push_back(bs);

    sc.mobile_start = Pose{6, 0, 1.0, 180, 0};
    ArrayGeometry mg;
    mg.kind = ArrayKind::Linear;
    mg.elements_x = 12;
    mg.carrier_hz = sc.channel.carrier_hz;
    sc.mobile_codebook = make_codebook(mg, -50, 60, 25);

    sc.mobility.kind = MobilityKind::Static;
    sc.sim.mode = SimMode::ScanSurvey;
    sc.sim.horizon_s = 1.0; // two scan cycles at most
    return sc;
}

inline Scenario search_static() { return search_base("search_static"); }

inline Scenario search_linear_walk() {
    Scenario sc = search_base("search_linear_walk");
    sc.mobility.kind = MobilityKind::LinearWalk;
    sc.mobility.speed_mps = 1.0;
    sc.mobility.heading_deg = 180; // radially toward the station, angles stay put
    sc.mobility.trajectory_length_m = 2.0;
    sc.sim.horizon_s = 2.0;
    return sc;
}

inline Scenario search_rotational(const std::string& name, double dps) {
    Scenario sc = search_base(name);
    sc.mobility.kind = MobilityKind::Rotational;
    sc.mobility.angular_velocity_dps = dps;
    sc.mobility.sector_lo_deg = 135;
    sc.mobility.sector_hi_deg = 225;
    sc.sim.horizon_s = 3.0;
    return sc;
}

inline Scenario search_rotational_90() { return search_rotational("search_rotational_90", 90); }
inline Scenario search_rotational_180() { return search_rotational("search_rotational_180", 180); }

/// Neighbor link only: the handset acquires and silently tracks a station
/// it never talks to.
inline Scenario tracking_base(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.seed = 1;
    sc.channel.noise_floor_dbm = -78.0;
    sc.channel.decode_threshold_dbm = -68.0;
    sc.calibrate_rss_los_dbm = -58.0;
    sc.channel.gr_loss = concrete_table();

    Station bs;
    bs.pose = Pose{0, 0, 2.5, 0, 0};
    ArrayGeometry bg;
    bg.kind = ArrayKind::Linear;
    bg.elements_x = 12;
    bg.carrier_hz = sc.channel.carrier_hz;
    bs.codebook = make_codebook(bg, -50, 60, 25);
    bs.carrier_id = 1;
    sc.stations.push_back(bs);

    sc.mobile_start = Pose{12, 0, 2.5, 180, 0};
    ArrayGeometry mg;
    mg.kind = ArrayKind::Linear;
    mg.elements_x = 12;
    mg.carrier_hz = sc.channel.carrier_hz;
    // handset pitch ~1.5x the half-power width: the sag trigger re-aims
    // before the skirt steepens, and the post-switch residual stays small.
    // Finer pitch hurts: each adaptation resets the reference, so the next
    // trigger needs a fresh 3 dB decay and equilibrium lag grows.
    sc.mobile_codebook = make_codebook(mg, -50, 60, 17);

    sc.sim.mode = SimMode::Protocol;
    sc.sim.horizon_s = 20.0;
    sc.sim.oracle_stride_periods = 1;
    return sc;
}

inline Scenario tracking_rotational(const std::string& name, double dps) {
    Scenario sc = tracking_base(name);
    sc.mobility.kind = MobilityKind::Rotational;
    sc.mobility.angular_velocity_dps = dps;
    sc.mobility.sector_lo_deg = 140;
    sc.mobility.sector_hi_deg = 220;
    return sc;
}

inline Scenario tracking_rotational_60() { return tracking_rotational("tracking_rotational_60", 60); }
inline Scenario tracking_rotational_120() { return tracking_rotational("tracking_rotational_120", 120); }

inline Scenario tracking_free_walk() {
    Scenario sc = tracking_base("tracking_free_walk");
    sc.mobility.kind = MobilityKind::FreeWalk;
    sc.mobility.speed_mps = 1.0;
    sc.mobility.bounds = {11.0, -1.0, 13.0, 1.0};
    // handheld wobble: +/-20 deg re-targeted 5x a second keeps the angular
    // rate in the tens of deg/s band seen on real hand-carried devices
    sc.mobility.jitter_amplitude_deg = 20.0;
    sc.mobility.jitter_interval_s = 0.20;
    return sc;
}

/// Dense planar arrays on a higher carrier; slow rotation, long sweep period.
inline Scenario tracking_overhead_28ghz() {
    Scenario sc;
    sc.name = "tracking_overhead_28ghz";
    sc.seed = 1;
    sc.channel.carrier_hz = 28e9;
    sc.channel.noise_floor_dbm = -78.0;
    sc.channel.decode_threshold_dbm = -68.0;
    sc.calibrate_rss_los_dbm = -58.0;
    sc.channel.gr_loss = concrete_table();

    Station bs;
    bs.pose = Pose{0, 0, 2.5, 0, 0};
    ArrayGeometry bg;
    bg.kind = ArrayKind::Planar;
    bg.elements_x = 32;
    bg.elements_y = 32;
    bg.boresight_gain_db = 27.0;
    bg.carrier_hz = sc.channel.carrier_hz;
    bs.codebook = make_codebook(bg, -45, 45, 32, -45, 45, 32);
    bs.carrier_id = 1;
    sc.stations.push_back(bs);

    sc.mobile_start = Pose{12, 0, 2.5, 180, 0};
    ArrayGeometry mg;
    mg.kind = ArrayKind::Planar;
    mg.elements_x = 32;
    mg.elements_y = 32;
    mg.boresight_gain_db = 27.0;
    mg.carrier_hz = sc.channel.carrier_hz;
    sc.mobile_codebook = make_codebook(mg, -45, 45, 32, -45, 45, 32);

    sc.mobility.kind = MobilityKind::Rotational;
    sc.mobility.angular_velocity_dps = 1.0;
    sc.mobility.sector_lo_deg = 160;
    sc.mobility.sector_hi_deg = 200;
    sc.sim.mode = SimMode::Protocol;
    sc.sim.horizon_s = 60.0;
    sc.sim.oracle_stride_periods = 1;
    return sc;
}

/// Serving link plus two silent neighbors on another carrier.
inline Scenario neighbor_handoff() {
    Scenario sc = blockage("neighbor_handoff", concrete_table(), 0.0, NAN);
    sc.gr_availability = NAN;
    sc.blockers = BlockerProcess{};
    for (double az : {-30.0, 30.0}) {
        Station nb;
        double ang = deg2rad(az);
        nb.pose = Pose{6 - 10 * std::cos(ang), 10 * std::sin(ang), 2.5, 0, 0};
        // face the mobile
        nb.pose.boresight_az_deg = rad2deg(std::atan2(-nb.pose.y, 6 - nb.pose.x));
        ArrayGeometry g;
        g.kind = ArrayKind::Linear;
        g.elements_x = 12;
        g.carrier_hz = sc.channel.carrier_hz;
        nb.codebook = make_codebook(g, -50, 60, 25);
        nb.carrier_id = 1;
        sc.stations.push_back(nb);
    }
    sc.sim.horizon_s = 10.0;
    return sc;
}

} // namespace presets

inline std::vector<std::string> preset_names() {
    return {"blockage_concrete",      "blockage_gravel",        "search_static",
            "search_linear_walk",     "search_rotational_90",   "search_rotational_180",
            "tracking_rotational_60", "tracking_rotational_120", "tracking_free_walk",
            "tracking_overhead_28ghz", "neighbor_handoff"};
}

inline Scenario make_preset(const std::string& name) {
    using namespace presets;
    if (name == "blockage_concrete") return blockage_concrete();
    if (name == "blockage_gravel") return blockage_gravel();
    if (name == "search_static") return search_static();
    if (name == "search_linear_walk") return search_linear_walk();
    if (name == "search_rotational_90") return search_rotational_90();
    if (name == "search_rotational_180") return search_rotational_180();
    if (name == "tracking_rotational_60") return tracking_rotational_60();
    if (name == "tracking_rotational_120") return tracking_rotational_120();
    if (name == "tracking_free_walk") return tracking_free_walk();
    if (name == "tracking_overhead_28ghz") return tracking_overhead_28ghz();
    if (name == "neighbor_handoff") return neighbor_handoff();
    throw ScenarioError("unknown preset: " + name);
}

} // namespace terra
