#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace terra {

inline constexpr const char* kTraceSchema = "trace_v1";

enum class EventKind {
    Measurement,
    StateTransition,
    BeamSwitch,
    BlockageStart,
    BlockageEnd,
    OutageStart,
    OutageEnd,
    Reconnect,
};

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Measurement: return "measurement";
        case EventKind::StateTransition: return "state_transition";
        case EventKind::BeamSwitch: return "beam_switch";
        case EventKind::BlockageStart: return "blockage_start";
        case EventKind::BlockageEnd: return "blockage_end";
        case EventKind::OutageStart: return "outage_start";
        case EventKind::OutageEnd: return "outage_end";
        case EventKind::Reconnect: return "reconnect";
    }
    return "?";
}

inline EventKind event_kind_from(const std::string& s) {
    if (s == "measurement") return EventKind::Measurement;
    if (s == "state_transition") return EventKind::StateTransition;
    if (s == "beam_switch") return EventKind::BeamSwitch;
    if (s == "blockage_start") return EventKind::BlockageStart;
    if (s == "blockage_end") return EventKind::BlockageEnd;
    if (s == "outage_start") return EventKind::OutageStart;
    if (s == "outage_end") return EventKind::OutageEnd;
    if (s == "reconnect") return EventKind::Reconnect;
    throw std::runtime_error("unknown trace event kind: " + s);
}

/// One trace line. Unused fields stay at their sentinels and are omitted
/// from the serialized form.
struct TraceEvent {
    double t = 0.0;
    EventKind kind = EventKind::Measurement;
    int station = -1;
    int beam = -1;
    int from_beam = -1;
    int to_beam = -1;
    int probes = -1;
    int dwells = -1;
    double rss = NAN;
    double oracle = NAN;
    double ref = NAN;
    double penalty = NAN;
    bool probe = false;
    bool scan = false;
    std::string from_state;
    std::string to_state;
    std::string reason;
};

struct Trace {
    std::uint64_t seed = 0;
    std::string scenario_name;
    std::vector<TraceEvent> events;
};

namespace detail {
inline nlohmann::ordered_json event_json(const TraceEvent& e) {
    nlohmann::ordered_json j;
    j["t"] = e.t;
    j["kind"] = to_string(e.kind);
    if (e.station >= 0) j["station"] = e.station;
    if (e.beam >= 0) j["beam"] = e.beam;
    if (e.from_beam >= 0) j["from"] = e.from_beam;
    if (e.to_beam >= 0) j["to"] = e.to_beam;
    if (!std::isnan(e.rss)) j["rss"] = e.rss;
    if (!std::isnan(e.oracle)) j["oracle"] = e.oracle;
    if (!std::isnan(e.ref)) j["ref"] = e.ref;
    if (!std::isnan(e.penalty)) j["penalty"] = e.penalty;
    if (e.probes >= 0) j["probes"] = e.probes;
    if (e.dwells >= 0) j["dwells"] = e.dwells;
    if (e.probe) j["probe"] = true;
    if (e.scan) j["scan"] = true;
    if (!e.from_state.empty()) j["from"] = e.from_state;
    if (!e.to_state.empty()) j["to"] = e.to_state;
    if (!e.reason.empty()) j["reason"] = e.reason;
    return j;
}

inline TraceEvent event_from_json(const nlohmann::json& j) {
    TraceEvent e;
    e.t = j.at("t").get<double>();
    e.kind = event_kind_from(j.at("kind").get<std::string>());
    if (j.contains("station")) e.station = j["station"].get<int>();
    if (j.contains("beam")) e.beam = j["beam"].get<int>();
    if (j.contains("from")) {
        if (j["from"].is_string()) e.from_state = j["from"].get<std::string>();
        else e.from_beam = j["from"].get<int>();
    }
    if (j.contains("to")) {
        if (j["to"].is_string()) e.to_state = j["to"].get<std::string>();
        else e.to_beam = j["to"].get<int>();
    }
    if (j.contains("rss")) e.rss = j["rss"].get<double>();
    if (j.contains("oracle")) e.oracle = j["oracle"].get<double>();
    if (j.contains("ref")) e.ref = j["ref"].get<double>();
    if (j.contains("penalty")) e.penalty = j["penalty"].get<double>();
    if (j.contains("probes")) e.probes = j["probes"].get<int>();
    if (j.contains("dwells")) e.dwells = j["dwells"].get<int>();
    if (j.contains("probe")) e.probe = j["probe"].get<bool>();
    if (j.contains("scan")) e.scan = j["scan"].get<bool>();
    if (j.contains("reason")) e.reason = j["reason"].get<std::string>();
    return e;
}
} // namespace detail

/// JSON-lines serialization: a header line followed by one event per line.
inline void write_trace(const Trace& tr, std::ostream& os) {
    nlohmann::ordered_json hdr;
    hdr["schema"] = kTraceSchema;
    hdr["seed"] = tr.seed;
    hdr["scenario"] = tr.scenario_name;
    os << hdr.dump() << '\n';
    for (const TraceEvent& e : tr.events) os << detail::event_json(e).dump() << '\n';
}

inline Trace read_trace(std::istream& is) {
    Trace tr;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty trace file");
    nlohmann::json hdr = nlohmann::json::parse(line);
    if (!hdr.contains("schema") || hdr["schema"] != kTraceSchema)
        throw std::runtime_error("trace schema mismatch: expected trace_v1");
    tr.seed = hdr.value("seed", 0ULL);
    tr.scenario_name = hdr.value("scenario", "");
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            tr.events.push_back(detail::event_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& ex) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return tr;
}

} // namespace terra
