// terra-sim: scenario runner, density analyzer, codebook export, trace analysis.
//
// Outputs are deterministic: identical invocations produce byte-identical
// traces and reports, independent of --jobs.

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "terra/terra.hpp"

namespace fs = std::filesystem;
using terra::Scenario;
using terra::Trace;

namespace {

Scenario resolve_scenario(const std::string& spec) {
    constexpr const char* kPrefix = "preset:";
    if (spec.rfind(kPrefix, 0) == 0) return terra::make_preset(spec.substr(std::strlen(kPrefix)));
    return terra::load_scenario_file(spec);
}

int default_jobs() {
    if (const char* env = std::getenv("TERRA_SIM_JOBS")) {
        int j = std::atoi(env);
        if (j >= 1) return j;
    }
    return 1;
}

std::string run_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "trace_%04d.jsonl", index);
    return buf;
}

int cmd_simulate(const std::string& scenario_spec, const std::string& out_dir, int runs,
                 std::uint64_t seed_base, int jobs, bool quiet) {
    Scenario base = resolve_scenario(scenario_spec);
    fs::create_directories(out_dir);

    std::vector<std::string> serialized(static_cast<std::size_t>(runs));
    std::vector<terra::TraceMetrics> metrics(static_cast<std::size_t>(runs));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mu;

    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= runs || failed.load()) return;
            try {
                Scenario sc = base;
                sc.seed = seed_base + static_cast<std::uint64_t>(i);
                Trace tr = terra::run_scenario(sc);
                std::ostringstream os;
                terra::write_trace(tr, os);
                serialized[static_cast<std::size_t>(i)] = os.str();
                metrics[static_cast<std::size_t>(i)] = terra::compute_metrics(tr);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };

    int n_threads = std::max(1, std::min(jobs, runs));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) {
        std::cerr << "error: " << first_error << "\n";
        return 1;
    }

    for (int i = 0; i < runs; ++i) {
        fs::path p = fs::path(out_dir) / run_name(i);
        std::ofstream out(p, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << p.string() << "\n";
            return 1;
        }
        out << serialized[static_cast<std::size_t>(i)];
    }

    nlohmann::ordered_json rep = terra::report_json(metrics);
    rep["seed_base"] = seed_base;
    {
        std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
        out << rep.dump(2) << "\n";
    }
    if (!quiet) {
        std::cout << "scenario " << base.name << ": " << runs << " run(s) -> " << out_dir << "\n";
        std::cout << "  measurements " << rep["totals"]["measurements"] << ", blockage events "
                  << rep["totals"]["blockage_events"] << ", outage events "
                  << rep["totals"]["outage_events"] << "\n";
        std::cout << "  avoidance mean " << rep["avoidance_fraction"]["mean"] << ", rms vs oracle mean "
                  << rep["rms_vs_oracle_db"]["mean"] << "\n";
    }
    return 0;
}

int cmd_density(double radius_m, int k, double target, const std::string& grid_spec,
                long long mc_trials, std::uint64_t mc_seed, const std::string& out_csv) {
    double lambda = terra::min_density(radius_m, k, target);
    double mu = terra::mean_in_range(lambda, radius_m);
    std::cout.precision(10);
    std::cout << "radius_m " << radius_m << " k " << k << " target " << target << "\n";
    std::cout << "min_density_per_km2 " << lambda << "\n";
    std::cout << "mean_stations_in_range " << mu << "\n";
    if (mc_trials > 0) {
        double est = terra::mc_coverage(lambda, radius_m, k, static_cast<int>(mc_trials), mc_seed);
        std::cout << "mc_coverage " << est << " (trials " << mc_trials << ", seed " << mc_seed
                  << ")\n";
    }
    if (!grid_spec.empty()) {
        double lo = 0, hi = 0;
        int n = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(grid_spec);
        if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2) {
            std::cerr << "error: --grid expects lo:hi:points\n";
            return 1;
        }
        auto rows = terra::density_grid(radius_m, k, lo, hi, n);
        std::string csv = terra::density_csv(rows);
        if (out_csv.empty()) {
            std::cout << csv;
        } else {
            std::ofstream out(out_csv, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write " << out_csv << "\n";
                return 1;
            }
            out << csv;
        }
    }
    std::cout << terra::kReportedDensityNote << "\n";
    return 0;
}

int cmd_codebook(const std::string& kind, int ex, int ey, double spacing, double gain,
                 double carrier, const std::string& az, const std::string& zen,
                 const std::string& out_csv, int pattern_beam, const std::string& pattern_csv_path) {
    terra::ArrayGeometry g;
    g.kind = kind == "planar" ? terra::ArrayKind::Planar : terra::ArrayKind::Linear;
    g.elements_x = ex;
    g.elements_y = ey;
    g.spacing_wl = spacing;
    g.boresight_gain_db = gain;
    g.carrier_hz = carrier;
    auto parse_span = [](const std::string& s, double& lo, double& hi, int& n) {
        char c1 = 0, c2 = 0;
        std::istringstream is(s);
        return static_cast<bool>(is >> lo >> c1 >> hi >> c2 >> n) && c1 == ':' && c2 == ':';
    };
    double az_lo = -50, az_hi = 60, zen_lo = 0, zen_hi = 0;
    int n_az = 25, n_zen = 1;
    if (!az.empty() && !parse_span(az, az_lo, az_hi, n_az)) {
        std::cerr << "error: --az expects lo:hi:count\n";
        return 1;
    }
    if (!zen.empty() && !parse_span(zen, zen_lo, zen_hi, n_zen)) {
        std::cerr << "error: --zen expects lo:hi:count\n";
        return 1;
    }
    terra::Codebook cb = terra::make_codebook(g, az_lo, az_hi, n_az, zen_lo, zen_hi, n_zen);
    std::ostringstream csv_os;
    terra::codebook_csv(cb, csv_os);
    std::string csv = csv_os.str();
    if (out_csv.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_csv, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << out_csv << "\n";
            return 1;
        }
        out << csv;
    }
    if (pattern_beam >= 0) {
        std::ostringstream pat_os;
        terra::pattern_csv(cb, pat_os, pattern_beam);
        std::string pat = pat_os.str();
        if (pattern_csv_path.empty()) {
            std::cout << pat;
        } else {
            std::ofstream out(pattern_csv_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write " << pattern_csv_path << "\n";
                return 1;
            }
            out << pat;
        }
    }
    return 0;
}

int cmd_analyze(const std::vector<std::string>& inputs, const std::string& report_path) {
    std::vector<std::string> files;
    for (const std::string& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(in))
                if (e.path().extension() == ".jsonl") found.push_back(e.path().string());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(in);
        }
    }
    if (files.empty()) {
        std::cerr << "error: no trace files\n";
        return 1;
    }
    std::vector<terra::TraceMetrics> metrics;
    for (const std::string& f : files) {
        std::ifstream in(f);
        if (!in) {
            std::cerr << "error: cannot open " << f << "\n";
            return 1;
        }
        try {
            metrics.push_back(terra::compute_metrics(terra::read_trace(in)));
        } catch (const std::exception& e) {
            std::cerr << "error: " << f << ": " << e.what() << "\n";
            return 1;
        }
    }
    nlohmann::ordered_json rep = terra::report_json(metrics);
    if (report_path.empty()) {
        std::cout << rep.dump(2) << "\n";
    } else {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << report_path << "\n";
            return 1;
        }
        out << rep.dump(2) << "\n";
        std::cout << "report -> " << report_path << " (" << metrics.size() << " trace(s))\n";
    }
    return 0;
}

int cmd_scenario(const std::string& preset, const std::string& out_path, bool list, bool emit_all,
                 const std::string& dir) {
    if (list) {
        for (const std::string& n : terra::preset_names()) std::cout << n << "\n";
        return 0;
    }
    if (emit_all) {
        fs::create_directories(dir.empty() ? "." : dir);
        for (const std::string& n : terra::preset_names()) {
            fs::path p = fs::path(dir.empty() ? "." : dir) / (n + ".json");
            std::ofstream out(p, std::ios::binary);
            out << terra::save_scenario(terra::make_preset(n)).dump(2) << "\n";
        }
        std::cout << terra::preset_names().size() << " scenario file(s) -> " << (dir.empty() ? "." : dir)
                  << "\n";
        return 0;
    }
    if (preset.empty()) {
        std::cerr << "error: give --preset, --list or --emit-all\n";
        return 1;
    }
    nlohmann::ordered_json j = terra::save_scenario(terra::make_preset(preset));
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 1;
        }
        out << j.dump(2) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"beam management simulator"};
    app.set_version_flag("--version", terra::kVersion);
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a scenario and write traces");
    std::string scenario_spec, out_dir = "out";
    int runs = 1, jobs = default_jobs();
    std::uint64_t seed_base = 1;
    bool quiet = false;
    sim->add_option("--scenario", scenario_spec, "scenario file or preset:<name>")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--runs", runs, "number of seeded runs")->check(CLI::PositiveNumber);
    sim->add_option("--seed-base", seed_base, "seed for run 0; run i uses seed_base + i");
    sim->add_option("--jobs", jobs, "worker threads (default: TERRA_SIM_JOBS or 1)")
        ->check(CLI::PositiveNumber);
    sim->add_flag("--quiet", quiet, "suppress the summary line");

    // density
    auto* den = app.add_subcommand("density", "station density for multi-connectivity coverage");
    double radius_m = 300, target = 0.9;
    int k = 2;
    std::string grid_spec, den_out;
    long long mc_trials = 0;
    std::uint64_t mc_seed = 1;
    den->add_option("--radius", radius_m, "range radius in meters")->check(CLI::PositiveNumber);
    den->add_option("--k", k, "required stations in range")->check(CLI::PositiveNumber);
    den->add_option("--target", target, "coverage probability target");
    den->add_option("--grid", grid_spec, "density grid lo:hi:points (per km^2)");
    den->add_option("--monte-carlo", mc_trials, "cross-check trials");
    den->add_option("--seed", mc_seed, "Monte Carlo seed");
    den->add_option("--out", den_out, "CSV path for --grid output");

    // codebook
    auto* cbc = app.add_subcommand("codebook", "export a codebook and beam patterns");
    std::string kind = "linear", az_span, zen_span, cb_out, pattern_out;
    int ex = 12, ey = 1, pattern_beam = -1;
    double spacing = 0.5, gain_db = 17.0, carrier = 60e9;
    cbc->add_option("--kind", kind, "linear or planar")
        ->check(CLI::IsMember({"linear", "planar"}));
    cbc->add_option("--elements-x", ex, "elements along az");
    cbc->add_option("--elements-y", ey, "elements along zen (planar)");
    cbc->add_option("--spacing", spacing, "element spacing in wavelengths");
    cbc->add_option("--gain", gain_db, "boresight gain dB");
    cbc->add_option("--carrier", carrier, "carrier Hz");
    cbc->add_option("--az", az_span, "azimuth steering lo:hi:count (default -50:60:25)");
    cbc->add_option("--zen", zen_span, "zenith steering lo:hi:count (default 0:0:1)");
    cbc->add_option("--out", cb_out, "codebook CSV path (default stdout)");
    cbc->add_option("--pattern-beam", pattern_beam, "also export this beam's gain pattern");
    cbc->add_option("--pattern-out", pattern_out, "pattern CSV path (default stdout)");

    // analyze
    auto* ana = app.add_subcommand("analyze", "compute metrics over recorded traces");
    std::vector<std::string> trace_inputs;
    std::string report_path;
    ana->add_option("traces", trace_inputs, "trace files or directories")->required();
    ana->add_option("--report", report_path, "write report JSON here (default stdout)");

    // scenario
    auto* scn = app.add_subcommand("scenario", "emit preset scenario files");
    std::string preset, scn_out, scn_dir;
    bool list = false, emit_all = false;
    scn->add_option("--preset", preset, "preset name");
    scn->add_option("--out", scn_out, "output path (default stdout)");
    scn->add_flag("--list", list, "list preset names");
    scn->add_flag("--emit-all", emit_all, "write every preset");
    scn->add_option("--dir", scn_dir, "directory for --emit-all");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(scenario_spec, out_dir, runs, seed_base, jobs, quiet);
        if (den->parsed())
            return cmd_density(radius_m, k, target, grid_spec, mc_trials, mc_seed, den_out);
        if (cbc->parsed())
            return cmd_codebook(kind, ex, ey, spacing, gain_db, carrier, az_span, zen_span, cb_out,
                                pattern_beam, pattern_out);
        if (ana->parsed()) return cmd_analyze(trace_inputs, report_path);
        if (scn->parsed()) return cmd_scenario(preset, scn_out, list, emit_all, scn_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
