// Runs the stock blockage scenario once and prints the protocol's event
// timeline: state changes, beam switches, and outage bookkeeping, with the
// periodic measurements folded into a coarse signal strip.

#include <cstdio>
#include <string>

#include "terra/terra.hpp"

int main(int argc, char** argv) {
    using namespace terra;

    Scenario sc = make_preset("blockage_concrete");
    sc.seed = argc > 1 ? std::stoull(argv[1]) : 7;
    sc.sim.horizon_s = 10.0;
    validate(sc);

    Trace tr = run_scenario(sc);
    std::printf("scenario %s, seed %llu, %zu events\n\n", tr.scenario_name.c_str(),
                static_cast<unsigned long long>(tr.seed), tr.events.size());

    for (const TraceEvent& e : tr.events) {
        switch (e.kind) {
            case EventKind::Measurement:
                continue; // the strip below summarizes these
            case EventKind::StateTransition:
                std::printf("%8.4f  %-16s %s -> %s (%s)\n", e.t, "state", e.from_state.c_str(),
                            e.to_state.c_str(), e.reason.c_str());
                break;
            case EventKind::BeamSwitch:
                std::printf("%8.4f  %-16s beam %d -> %d (%s)\n", e.t, "switch", e.from_beam,
                            e.to_beam, e.reason.c_str());
                break;
            case EventKind::BlockageStart:
                std::printf("%8.4f  %-16s direct path cut\n", e.t, "blockage");
                break;
            case EventKind::BlockageEnd:
                std::printf("%8.4f  %-16s direct path clear\n", e.t, "blockage");
                break;
            case EventKind::OutageStart:
                std::printf("%8.4f  %-16s link down\n", e.t, "outage");
                break;
            case EventKind::OutageEnd:
                std::printf("%8.4f  %-16s link up\n", e.t, "outage");
                break;
            case EventKind::Reconnect:
                std::printf("%8.4f  %-16s %d dwells searched, %.2f s penalty\n", e.t, "reconnect",
                            e.dwells, e.penalty);
                break;
        }
    }

    // One character per 0.2 s of operating samples: '#' strong, '+' usable,
    // '.' weak, ' ' none.
    std::printf("\nsignal strip (0.2 s buckets, # > -62, + > -68, . otherwise):\n");
    double bucket = 0.2;
    int n = static_cast<int>(sc.sim.horizon_s / bucket);
    std::string strip(static_cast<std::size_t>(n), ' ');
    auto grade = [](char c) { return c == '#' ? 3 : c == '+' ? 2 : c == '.' ? 1 : 0; };
    for (const TraceEvent* s : operating_samples(tr)) {
        int i = static_cast<int>(s->t / bucket);
        if (i < 0 || i >= n) continue;
        char c = s->rss > -62 ? '#' : (s->rss > -68 ? '+' : '.');
        char& cur = strip[static_cast<std::size_t>(i)];
        if (grade(c) > grade(cur)) cur = c;
    }
    std::printf("[%s]\n", strip.c_str());
    return 0;
}
