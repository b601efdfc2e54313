#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "terra/trace.hpp"

namespace terra {

struct Interval {
    double start = 0;
    double end = 0;
};

namespace detail {
inline std::vector<Interval> collect_intervals(const Trace& tr, EventKind open, EventKind close) {
    std::vector<Interval> out;
    std::optional<double> open_t;
    for (const TraceEvent& e : tr.events) {
        if (e.kind == open && !open_t) open_t = e.t;
        if (e.kind == close && open_t) {
            out.push_back({*open_t, e.t});
            open_t.reset();
        }
    }
    if (open_t) out.push_back({*open_t, INFINITY}); // never closed
    return out;
}

inline bool intersects(const Interval& a, const Interval& b) {
    return a.start <= b.end && b.start <= a.end;
}

inline bool in_any(double t, const std::vector<Interval>& iv) {
    for (const Interval& i : iv)
        if (t >= i.start && t < i.end) return true;
    return false;
}
} // namespace detail

inline std::vector<Interval> blockage_intervals(const Trace& tr) {
    return detail::collect_intervals(tr, EventKind::BlockageStart, EventKind::BlockageEnd);
}

inline std::vector<Interval> outage_intervals(const Trace& tr) {
    return detail::collect_intervals(tr, EventKind::OutageStart, EventKind::OutageEnd);
}

/// Operating-link samples: measurements that are neither probes nor scan dwells.
inline std::vector<const TraceEvent*> operating_samples(const Trace& tr) {
    std::vector<const TraceEvent*> out;
    for (const TraceEvent& e : tr.events)
        if (e.kind == EventKind::Measurement && !e.probe && !e.scan) out.push_back(&e);
    return out;
}

/// Fraction of blockage events the link rode out without an outage.
inline double avoidance_fraction(const Trace& tr) {
    auto blocks = blockage_intervals(tr);
    auto outs = outage_intervals(tr);
    if (blocks.empty()) return 1.0;
    int avoided = 0;
    for (const Interval& b : blocks) {
        bool hit = false;
        for (const Interval& o : outs)
            if (detail::intersects(b, o)) { hit = true; break; }
        if (!hit) avoided++;
    }
    return static_cast<double>(avoided) / static_cast<double>(blocks.size());
}

/// Share of blocked time the link spent in outage.
inline double blocked_outage_fraction(const Trace& tr) {
    auto blocks = blockage_intervals(tr);
    auto outs = outage_intervals(tr);
    double blocked = 0, lost = 0;
    for (const Interval& b : blocks) {
        blocked += b.end - b.start;
        for (const Interval& o : outs) {
            double lo = std::max(b.start, o.start);
            double hi = std::min(b.end, o.end);
            if (hi > lo) lost += hi - lo;
        }
    }
    return blocked > 0 ? lost / blocked : 0.0;
}

inline double outage_time_fraction(const Trace& tr, double horizon_s) {
    double lost = 0;
    for (const Interval& o : outage_intervals(tr)) lost += std::min(o.end, horizon_s) - o.start;
    return horizon_s > 0 ? lost / horizon_s : 0.0;
}

/// Fraction of operating samples at or above ref_dbm - margin_db.
inline double within_margin_fraction(const Trace& tr, double ref_dbm, double margin_db) {
    auto samples = operating_samples(tr);
    if (samples.empty()) return 0.0;
    int ok = 0;
    for (const TraceEvent* e : samples)
        if (e->rss >= ref_dbm - margin_db) ok++;
    return static_cast<double>(ok) / static_cast<double>(samples.size());
}

/// RMS gap between logged samples and their paired reference-receiver value.
inline double rms_loss_vs_oracle(const Trace& tr) {
    double sum = 0;
    int n = 0;
    for (const TraceEvent& e : tr.events) {
        if (e.kind != EventKind::Measurement || e.probe || e.scan || std::isnan(e.oracle)) continue;
        double d = e.oracle - e.rss;
        sum += d * d;
        n++;
    }
    return n > 0 ? std::sqrt(sum / n) : 0.0;
}

inline double within_oracle_fraction(const Trace& tr, double margin_db) {
    int n = 0, ok = 0;
    for (const TraceEvent& e : tr.events) {
        if (e.kind != EventKind::Measurement || e.probe || e.scan || std::isnan(e.oracle)) continue;
        n++;
        if (e.oracle - e.rss <= margin_db) ok++;
    }
    return n > 0 ? static_cast<double>(ok) / n : 0.0;
}

/// Dwell counts from completed searches (acquisitions, failed cycles,
/// survey scans and post-outage reconnects).
inline std::vector<int> search_dwell_counts(const Trace& tr) {
    std::vector<int> out;
    for (const TraceEvent& e : tr.events)
        if ((e.kind == EventKind::StateTransition || e.kind == EventKind::Reconnect) && e.dwells >= 1)
            out.push_back(e.dwells);
    return out;
}

struct SummaryStats {
    int count = 0;
    double min = 0, max = 0, mean = 0, median = 0, stddev = 0;
};

inline SummaryStats summarize(std::vector<double> v) {
    SummaryStats s;
    s.count = static_cast<int>(v.size());
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.max = v.back();
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = sum / s.count;
    s.median = s.count % 2 ? v[static_cast<std::size_t>(s.count / 2)]
                           : 0.5 * (v[static_cast<std::size_t>(s.count / 2 - 1)] +
                                    v[static_cast<std::size_t>(s.count / 2)]);
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
    return s;
}

inline SummaryStats summarize_int(const std::vector<int>& v) {
    std::vector<double> d(v.begin(), v.end());
    return summarize(std::move(d));
}

/// Empirical CDF over sorted unique values.
inline std::vector<std::pair<double, double>> cdf(std::vector<double> v) {
    std::vector<std::pair<double, double>> out;
    if (v.empty()) return out;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && v[j] == v[i]) ++j;
        out.emplace_back(v[i], static_cast<double>(j) / static_cast<double>(n));
        i = j;
    }
    return out;
}

/// Kolmogorov-Smirnov distance of integer samples against the discrete
/// uniform distribution on {lo, ..., hi}.
inline double ks_uniform_int(const std::vector<int>& samples, int lo, int hi) {
    if (samples.empty() || hi < lo) return 1.0;
    std::vector<int> s(samples);
    std::sort(s.begin(), s.end());
    double n = static_cast<double>(s.size());
    int span = hi - lo + 1;
    double d = 0;
    for (int k = lo; k <= hi; ++k) {
        auto it = std::upper_bound(s.begin(), s.end(), k);
        double f_emp = static_cast<double>(it - s.begin()) / n;
        double f_uni = static_cast<double>(k - lo + 1) / span;
        d = std::max(d, std::abs(f_emp - f_uni));
    }
    return d;
}

struct RunsTestResult {
    int n1 = 0, n2 = 0, runs = 0;
    double z = 0;
    double p = 1;
    bool reject = false; // at the 5% two-sided level
};

/// Wald-Wolfowitz runs test on a binary sequence (nonzero = 1).
inline RunsTestResult runs_test(const std::vector<int>& seq) {
    RunsTestResult r;
    if (seq.empty()) return r;
    int prev = seq.front() != 0;
    r.runs = 1;
    for (int x : seq) {
        int b = x != 0;
        if (b) r.n1++;
        else r.n2++;
        if (b != prev) {
            r.runs++;
            prev = b;
        }
    }
    if (r.n1 == 0 || r.n2 == 0) {
        r.runs = 1;
        return r;
    }
    double n1 = r.n1, n2 = r.n2, n = n1 + n2;
    double mean = 2.0 * n1 * n2 / n + 1.0;
    double var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0));
    if (var <= 0) return r;
    r.z = (r.runs - mean) / std::sqrt(var);
    r.p = std::erfc(std::abs(r.z) / std::sqrt(2.0));
    r.reject = std::abs(r.z) > 1.959963984540054;
    return r;
}

/// Per-sample beam ids of the operating link, and the derived switch
/// indicator sequence used by the randomness check.
inline std::vector<int> beam_sequence(const Trace& tr) {
    std::vector<int> out;
    for (const TraceEvent* e : operating_samples(tr)) out.push_back(e->beam);
    return out;
}

inline std::vector<int> switch_indicator_sequence(const std::vector<int>& beams) {
    std::vector<int> out;
    for (std::size_t i = 1; i < beams.size(); ++i) out.push_back(beams[i] != beams[i - 1] ? 1 : 0);
    return out;
}

inline int max_probes_per_adaptation(const Trace& tr) {
    int m = 0;
    for (const TraceEvent& e : tr.events)
        if (e.kind == EventKind::BeamSwitch && e.probes > m) m = e.probes;
    return m;
}

struct TraceMetrics {
    std::string scenario;
    std::uint64_t seed = 0;
    int n_measurements = 0;
    int n_blockage_events = 0;
    int n_outage_events = 0;
    double avoidance = 1.0;
    double blocked_outage = 0.0;
    double rms_vs_oracle = 0.0;
    double within_oracle = 1.0;
    int max_probes = 0;
    SummaryStats search_dwells;
    RunsTestResult runs;
};

inline TraceMetrics compute_metrics(const Trace& tr) {
    TraceMetrics m;
    m.scenario = tr.scenario_name;
    m.seed = tr.seed;
    m.n_measurements = static_cast<int>(operating_samples(tr).size());
    m.n_blockage_events = static_cast<int>(blockage_intervals(tr).size());
    m.n_outage_events = static_cast<int>(outage_intervals(tr).size());
    m.avoidance = avoidance_fraction(tr);
    m.blocked_outage = blocked_outage_fraction(tr);
    m.rms_vs_oracle = rms_loss_vs_oracle(tr);
    m.within_oracle = within_oracle_fraction(tr, 3.0);
    m.max_probes = max_probes_per_adaptation(tr);
    m.search_dwells = summarize_int(search_dwell_counts(tr));
    m.runs = runs_test(switch_indicator_sequence(beam_sequence(tr)));
    return m;
}

inline nlohmann::ordered_json to_json(const SummaryStats& s) {
    return nlohmann::ordered_json{{"count", s.count}, {"min", s.min},       {"max", s.max},
                                  {"mean", s.mean},   {"median", s.median}, {"stddev", s.stddev}};
}

inline nlohmann::ordered_json to_json(const RunsTestResult& r) {
    return nlohmann::ordered_json{{"n1", r.n1}, {"n2", r.n2},         {"runs", r.runs},
                                  {"z", r.z},   {"p_two_sided", r.p}, {"reject_5pct", r.reject}};
}

inline nlohmann::ordered_json to_json(const TraceMetrics& m) {
    return nlohmann::ordered_json{{"scenario", m.scenario},
                                  {"seed", m.seed},
                                  {"measurements", m.n_measurements},
                                  {"blockage_events", m.n_blockage_events},
                                  {"outage_events", m.n_outage_events},
                                  {"avoidance_fraction", m.avoidance},
                                  {"blocked_outage_fraction", m.blocked_outage},
                                  {"rms_vs_oracle_db", m.rms_vs_oracle},
                                  {"within_oracle_3db_fraction", m.within_oracle},
                                  {"max_probes_per_adaptation", m.max_probes},
                                  {"search_dwells", to_json(m.search_dwells)},
                                  {"switch_runs_test", to_json(m.runs)}};
}

/// Aggregate report over a batch of runs of one scenario.
inline nlohmann::ordered_json report_json(const std::vector<TraceMetrics>& per_run) {
    nlohmann::ordered_json rep;
    rep["schema"] = "report_v1";
    rep["runs"] = per_run.size();
    if (!per_run.empty()) rep["scenario"] = per_run.front().scenario;
    std::vector<double> avoid, rms, probes, blocked;
    std::vector<int> all_dwells;
    int blockages = 0, outages = 0, measurements = 0;
    for (const TraceMetrics& m : per_run) {
        avoid.push_back(m.avoidance);
        rms.push_back(m.rms_vs_oracle);
        probes.push_back(m.max_probes);
        blocked.push_back(m.blocked_outage);
        blockages += m.n_blockage_events;
        outages += m.n_outage_events;
        measurements += m.n_measurements;
    }
    rep["totals"] = {{"measurements", measurements},
                     {"blockage_events", blockages},
                     {"outage_events", outages}};
    rep["avoidance_fraction"] = to_json(summarize(avoid));
    rep["rms_vs_oracle_db"] = to_json(summarize(rms));
    rep["blocked_outage_fraction"] = to_json(summarize(blocked));
    rep["max_probes_per_adaptation"] = to_json(summarize(probes));
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const TraceMetrics& m : per_run) runs.push_back(to_json(m));
    rep["per_run"] = runs;
    return rep;
}

} // namespace terra
