#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "echoform/csv.hpp"
#include "echoform/presets.hpp"
#include "echoform/theory.hpp"

// File-producing front end shared by the CLI subcommands: runs experiments,
// writes the CSV artifacts plus a manifest, and builds the human summary.

namespace echoform::harness {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct RunManifest {
    std::string command_line;
    std::string spec_digest;
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;
    int workers = 1;
};

inline std::string render_manifest(const RunManifest& m) {
    std::string out;
    out += "command: " + m.command_line + "\n";
    out += "spec_digest: " + m.spec_digest + "\n";
    out += "workers: " + std::to_string(m.workers) + "\n";
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", m.wall_seconds);
    out += std::string("wall_seconds: ") + wall + "\n";
    for (const auto& f : m.outputs) out += "output: " + f + "\n";
    return out;
}

namespace detail {

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw csv::io_error("cannot create output directory '" + dir + "'");
}

inline std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

class Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

inline std::string fmt(double v) { return csv::g9(v); }

// Disagreements between the sign of simulated E2 and the emissive windows,
// ignoring rows within 0.05 pi of a window boundary or with negligible
// amplitude.
inline int window_disagreements(const std::vector<csv::SweepRow>& rows) {
    static const double boundaries[] = {0.0, 0.625, 1.375, 2.0};
    int bad = 0;
    for (const auto& r : rows) {
        bool near = false;
        for (double b : boundaries)
            if (std::abs(r.phi_r_over_pi - b) < 0.05) near = true;
        if (near || std::abs(r.E2_sim) < 1e-4) continue;
        const bool sim_emissive = r.E2_sim > 0.0;
        if (sim_emissive != theory::emissive_window(r.phi_r_over_pi * std::numbers::pi)) ++bad;
    }
    return bad;
}

}  // namespace detail

struct RunArtifacts {
    RunManifest manifest;
    std::string summary;
};

// Writes the artifact set shared by all runs; sweep.csv only when rows are
// supplied. The manifest lists every data file written.
inline RunManifest write_artifacts(const presets::RunOutput& run,
                                   const std::vector<csv::SweepRow>* sweep_rows,
                                   const std::string& out_dir, const std::string& command_line,
                                   int workers, double wall_seconds) {
    detail::ensure_dir(out_dir);
    RunManifest m;
    m.command_line = command_line;
    m.spec_digest = hex64(fnv1a64(config::serialize_spec(run.spec)));
    m.workers = workers;
    m.wall_seconds = wall_seconds;
    const std::string ts = detail::join(out_dir, "timeseries.csv");
    csv::write_file(ts, csv::render_timeseries(run.result));
    m.outputs.push_back(ts);
    if (run.has_echoes) {
        const std::string pr = detail::join(out_dir, "profile.csv");
        csv::write_file(pr, csv::render_profile(run.spatial, run.report));
        m.outputs.push_back(pr);
    }
    if (sweep_rows) {
        const std::string sw = detail::join(out_dir, "sweep.csv");
        csv::write_file(sw, csv::render_sweep(*sweep_rows));
        m.outputs.push_back(sw);
    }
    csv::write_file(detail::join(out_dir, "manifest.txt"), render_manifest(m));
    return m;
}

inline RunArtifacts run_fig1(const std::string& which, const std::string& out_dir, int workers,
                             const std::string& command_line) {
    detail::Stopwatch clock;
    const auto spec = presets::fig1_spec(which);
    const auto run = presets::run_experiment(spec, workers);
    const auto fit = theory::fit_sin_power(run.spatial.amplitudes, run.report.per_group_echo.back());
    RunArtifacts art;
    art.manifest =
        write_artifacts(run, nullptr, out_dir, command_line, workers, clock.seconds());
    art.summary = "fig1 case " + which + ": eta = " + detail::fmt(run.report.efficiency) +
                  ", fitted exponent = " + detail::fmt(fit.exponent) +
                  " (rms residual " + detail::fmt(fit.rms_residual) + ")\n" +
                  "echo at " + detail::fmt(run.report.echo_times.back() * 1e6) +
                  " us, amplitude " + detail::fmt(run.report.amplitudes.back()) + "\n";
    return art;
}

inline RunArtifacts run_fig2(const std::string& out_dir, int workers,
                             const std::string& command_line) {
    detail::Stopwatch clock;
    const auto row_spec = presets::fig2_row_spec();
    const auto rows = presets::sweep_rephasing_area(row_spec, row_spec.sweep->parameter,
                                                    row_spec.sweep->from_pi, row_spec.sweep->to_pi,
                                                    row_spec.sweep->step_pi, workers);
    const auto run = presets::run_experiment(presets::fig2_profile_spec(), workers);

    double e1_acc = 0.0;
    for (const auto& r : rows) {
        const double d = r.E1_sim - r.E1_eq3;
        e1_acc += d * d;
    }
    const double e1_rms = std::sqrt(e1_acc / rows.size());
    const int disagreements = detail::window_disagreements(rows);

    RunArtifacts art;
    art.manifest = write_artifacts(run, &rows, out_dir, command_line, workers, clock.seconds());
    art.summary = "fig2: " + std::to_string(rows.size()) + " sweep rows, E1 rms vs law = " +
                  detail::fmt(e1_rms) + "\n" + "window consistency: " +
                  (disagreements == 0 ? "OK" : "FAILED") + " (" +
                  std::to_string(disagreements) + " disagreements outside boundary zones)\n";
    return art;
}

inline RunArtifacts run_fig3(double peak_area_pi, const std::string& out_dir, int workers,
                             const std::string& command_line) {
    detail::Stopwatch clock;
    const auto spec = presets::fig3_spec(peak_area_pi);
    const auto run = presets::run_experiment(spec, workers);
    const auto rows = presets::sweep_rephasing_area(spec, spec.sweep->parameter,
                                                    spec.sweep->from_pi, spec.sweep->to_pi,
                                                    spec.sweep->step_pi, workers);
    double best = 0.0, best_area = 0.0;
    for (const auto& r : rows)
        if (r.eta > best) {
            best = r.eta;
            best_area = r.phi_r_over_pi;
        }
    bool damped = true;
    std::vector<double> maxima;
    for (size_t i = 1; i + 1 < rows.size(); ++i)
        if (rows[i].eta > rows[i - 1].eta && rows[i].eta > rows[i + 1].eta)
            maxima.push_back(rows[i].eta);
    for (size_t i = 1; i < maxima.size(); ++i)
        if (!(maxima[i] < maxima[i - 1])) damped = false;

    RunArtifacts art;
    art.manifest = write_artifacts(run, &rows, out_dir, command_line, workers, clock.seconds());
    art.summary = "fig3: eta(peak area " + detail::fmt(peak_area_pi) + " pi) = " +
                  detail::fmt(run.report.efficiency) + "\n" + "sweep max eta = " +
                  detail::fmt(best) + " at peak area " + detail::fmt(best_area) + " pi\n" +
                  std::string("damped oscillation: ") + (damped ? "yes" : "no") + "\n";
    return art;
}

// Standalone sweep over an explicit area range; writes sweep.csv only.
inline RunArtifacts run_sweep_command(const config::ExperimentSpec& spec, double from_pi,
                                      double to_pi, double step_pi, const std::string& out_dir,
                                      int workers, const std::string& command_line) {
    detail::Stopwatch clock;
    const std::string param = spec.sweep ? spec.sweep->parameter : std::string("R.area");
    const auto rows =
        presets::sweep_rephasing_area(spec, param, from_pi, to_pi, step_pi, workers);
    detail::ensure_dir(out_dir);
    RunArtifacts art;
    art.manifest.command_line = command_line;
    art.manifest.spec_digest = hex64(fnv1a64(config::serialize_spec(spec)));
    art.manifest.workers = workers;
    const std::string sw = detail::join(out_dir, "sweep.csv");
    csv::write_file(sw, csv::render_sweep(rows));
    art.manifest.outputs.push_back(sw);
    art.manifest.wall_seconds = clock.seconds();
    csv::write_file(detail::join(out_dir, "manifest.txt"), render_manifest(art.manifest));
    art.summary = "sweep of '" + param + "': " + std::to_string(rows.size()) + " rows, eta:";
    for (const auto& r : rows) art.summary += " " + detail::fmt(r.eta);
    art.summary += "\n";
    return art;
}

inline RunArtifacts run_config_spec(const config::ExperimentSpec& spec, const std::string& out_dir,
                                    int workers, const std::string& command_line) {
    detail::Stopwatch clock;
    const auto run = presets::run_experiment(spec, workers);
    std::vector<csv::SweepRow> rows;
    const bool swept = spec.sweep.has_value();
    if (swept)
        rows = presets::sweep_rephasing_area(spec, spec.sweep->parameter, spec.sweep->from_pi,
                                             spec.sweep->to_pi, spec.sweep->step_pi, workers);
    RunArtifacts art;
    art.manifest = write_artifacts(run, swept ? &rows : nullptr, out_dir, command_line, workers,
                                   clock.seconds());
    art.summary = "run: " + std::to_string(run.timeline.events.size()) + " pulses, " +
                  std::to_string(run.result.times.size()) + " samples\n";
    if (run.has_echoes) {
        for (size_t i = 0; i < run.report.echo_times.size(); ++i)
            art.summary += "echo " + std::to_string(i + 1) + " at " +
                           detail::fmt(run.report.echo_times[i] * 1e6) + " us, amplitude " +
                           detail::fmt(run.report.amplitudes[i]) + "\n";
        art.summary += std::string("eta = ") + (run.report.efficiency_defined
                                                    ? detail::fmt(run.report.efficiency)
                                                    : "undefined") +
                       "\n";
    }
    if (swept) art.summary += std::to_string(rows.size()) + " sweep rows\n";
    return art;
}

}  // namespace echoform::harness
