#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "echoform/config.hpp"
#include "echoform/csv.hpp"
#include "echoform/grids.hpp"
#include "echoform/sequence.hpp"
#include "echoform/theory.hpp"

// Canned experiment descriptions for the three reference figures, the
// generic runner that turns a validated spec into simulation results, and
// the rephasing-area sweep.

namespace echoform::presets {

inline config::PulseSpec pulse(std::string name, double t_us, double area_pi,
                               config::PulseProfile profile) {
    config::PulseSpec p;
    p.name = std::move(name);
    p.t_us = t_us;
    p.area_pi = area_pi;
    p.profile = profile;
    return p;
}

// Two-pulse echo, D at 0.1 us / R at 2.1 us. The case letter says which
// pulses follow the transverse beam profile: d, r, or both.
inline config::ExperimentSpec fig1_spec(const std::string& which) {
    using config::PulseProfile;
    if (which != "d" && which != "r" && which != "dr")
        throw std::invalid_argument("fig1: case must be d, r or dr");
    const bool gauss_d = which == "d" || which == "dr";
    const bool gauss_r = which == "r" || which == "dr";
    config::ExperimentSpec s;
    s.pulses.push_back(pulse("D", 0.1, 0.5,
                             gauss_d ? PulseProfile::gaussian : PulseProfile::uniform));
    s.pulses.push_back(pulse("R", 2.1, 1.0,
                             gauss_r ? PulseProfile::gaussian : PulseProfile::uniform));
    return s;
}

// One row of the rephasing-area sweep: uniform pulses on a single spatial
// group, so summed coherences compare directly with the closed-form laws.
inline config::ExperimentSpec fig2_row_spec() {
    config::ExperimentSpec s;
    s.spatial.mode = grids::SpatialMode::uniform;
    s.spatial.n_groups = 1;
    s.pulses.push_back(pulse("D", 0.1, 0.5, config::PulseProfile::uniform));
    s.pulses.push_back(pulse("R1", 3.1, 1.0, config::PulseProfile::gaussian));
    s.pulses.push_back(pulse("R2", 9.1, 1.0, config::PulseProfile::gaussian));
    s.sweep.emplace();
    s.sweep->parameter = "R.area";
    s.sweep->from_pi = 0.0;
    s.sweep->to_pi = 2.0;
    s.sweep->step_pi = 1.0 / 64.0;
    return s;
}

// The spatially rendered version of the same ramp: rephasing areas rise
// linearly to 2 pi across 41 groups.
inline config::ExperimentSpec fig2_profile_spec() {
    config::ExperimentSpec s;
    s.spatial.mode = grids::SpatialMode::linear;
    s.spatial.n_groups = 41;
    s.pulses.push_back(pulse("D", 0.1, 0.5, config::PulseProfile::uniform));
    s.pulses.push_back(pulse("R1", 3.1, 2.0, config::PulseProfile::gaussian));
    s.pulses.push_back(pulse("R2", 9.1, 2.0, config::PulseProfile::gaussian));
    return s;
}

// Gaussian double rephasing: D = pi/5 peak, both rephasing pulses share the
// requested peak area.
inline config::ExperimentSpec fig3_spec(double peak_area_pi = 1.0) {
    config::ExperimentSpec s;
    s.pulses.push_back(pulse("D", 0.1, 0.2, config::PulseProfile::gaussian));
    s.pulses.push_back(pulse("R1", 3.1, peak_area_pi, config::PulseProfile::gaussian));
    s.pulses.push_back(pulse("R2", 9.1, peak_area_pi, config::PulseProfile::gaussian));
    s.sweep.emplace();
    s.sweep->parameter = "R.area";
    s.sweep->from_pi = 0.25;
    s.sweep->to_pi = 2.0;
    s.sweep->step_pi = 0.25;
    return s;
}

struct RunOutput {
    config::ExperimentSpec spec;
    grids::SpatialProfile spatial;
    grids::SpectralGrid spectral;
    sequence::PulseTimeline timeline;
    sequence::EnsembleResult result;
    sequence::EchoReport report;
    bool has_echoes = false;
};

inline RunOutput run_experiment(const config::ExperimentSpec& spec, int workers = 1) {
    RunOutput out;
    out.spec = spec;
    out.spectral = grids::build_spectral_grid(spec.spectral.n_groups,
                                              spec.spectral.spacing_khz * 1e3,
                                              spec.spectral.fwhm_mhz * 1e6);
    out.spatial = grids::build_spatial_profile(spec.spatial.mode, spec.spatial.n_groups,
                                               spec.spatial.coverage);
    out.timeline = sequence::build_timeline(spec);
    out.result = sequence::simulate_ensemble(out.timeline, out.spatial, out.spectral, workers);
    const size_t np = out.timeline.events.size();
    out.has_echoes = np == 2 || np == 3;
    if (out.has_echoes) out.report = sequence::make_echo_report(out.result, out.timeline);
    return out;
}

// Applies `area_pi` to every pulse the sweep parameter matches and runs the
// modified spec; rows come out in ascending area order.
inline csv::SweepRow sweep_row(const config::ExperimentSpec& base, const std::string& parameter,
                               double area_pi, int workers) {
    config::ExperimentSpec s = base;
    s.sweep.reset();
    bool any = false;
    for (auto& p : s.pulses)
        if (config::sweep_matches_pulse(parameter, p.name)) {
            p.area_pi = area_pi;
            p.rabi_mhz.reset();
            any = true;
        }
    if (!any)
        throw std::invalid_argument("sweep parameter '" + parameter + "' matches no pulse");
    const RunOutput run = run_experiment(s, workers);
    csv::SweepRow row;
    row.phi_r_over_pi = area_pi;
    const auto& rep = run.report;
    row.E1_sim = rep.amplitudes.front();
    if (rep.echo_times.size() > 1) {
        row.E2_sim = rep.amplitudes.back();
        row.E2_eff = rep.e2_eff;
    }
    row.eta = rep.efficiency;
    const double phi = area_pi * std::numbers::pi;
    row.E1_eq3 = theory::predict_E1(phi);
    row.E2_eq4 = theory::predict_E2(phi);
    return row;
}

inline std::vector<csv::SweepRow> sweep_rephasing_area(const config::ExperimentSpec& base,
                                                       const std::string& parameter,
                                                       double from_pi, double to_pi,
                                                       double step_pi, int workers = 1) {
    if (!(step_pi > 0.0) || to_pi < from_pi)
        throw std::invalid_argument("sweep: need from <= to and a positive step");
    int count = 1;
    if (from_pi + step_pi <= to_pi + 1e-12)
        count = static_cast<int>(std::floor((to_pi - from_pi) / step_pi + 1e-9)) + 1;
    std::vector<csv::SweepRow> rows;
    rows.reserve(count);
    for (int i = 0; i < count; ++i)
        rows.push_back(sweep_row(base, parameter, from_pi + i * step_pi, workers));
    return rows;
}

}  // namespace echoform::presets
