#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "echoform/presets.hpp"
#include "echoform/sequence.hpp"
#include "echoform/theory.hpp"

using namespace echoform;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

config::PulseSpec pulse(const char* name, double t_us, double area_pi,
                        config::PulseProfile prof = config::PulseProfile::gaussian) {
    config::PulseSpec p;
    p.name = name;
    p.t_us = t_us;
    p.area_pi = area_pi;
    p.profile = prof;
    return p;
}

config::ExperimentSpec single_atom_spec(double data_area_pi) {
    config::ExperimentSpec s;
    s.spatial.mode = grids::SpatialMode::uniform;
    s.spatial.n_groups = 1;
    s.pulses = {pulse("D", 0.1, data_area_pi, config::PulseProfile::uniform)};
    return s;
}

int peak_sample(const std::vector<double>& y, int from) {
    int best = from;
    for (int k = from; k < static_cast<int>(y.size()); ++k)
        if (std::abs(y[k]) > std::abs(y[best])) best = k;
    return best;
}

}  // namespace

TEST_CASE("a resonant group holds maximal coherence after a half-pi pulse") {
    config::ExperimentSpec s = single_atom_spec(0.5);
    const auto tl = sequence::build_timeline(s);
    const auto tr = sequence::simulate_group(tl, 1.0, {0.0, 0.0});
    for (int k = 2; k < tl.n_samples(); ++k) {
        CHECK(std::abs(tr.im[k]) == Approx(0.5).margin(1e-9));
        CHECK(tr.rho22[k] == Approx(0.5).margin(1e-9));
    }
}

TEST_CASE("free induction collapses over the inhomogeneous linewidth") {
    const auto run = presets::run_experiment(single_atom_spec(0.5), 1);
    CHECK_FALSE(run.has_echoes);
    const double data = sequence::extract_amplitude(run.result, 0.2e-6);
    CHECK(std::abs(data) > 0.44);
    CHECK(std::abs(data) < 0.51);
    const double late = sequence::extract_amplitude(run.result, 1.0e-6);
    CHECK(std::abs(late) < 0.05 * std::abs(data));
}

TEST_CASE("a rephasing pulse revives the collapsed coherence as an echo") {
    const auto run = presets::run_experiment(presets::fig1_spec("d"), 2);
    REQUIRE(run.has_echoes);
    const auto& rep = run.report;
    REQUIRE(rep.echo_times.size() == 1);
    CHECK(rep.echo_times[0] == Approx(4.1e-6).margin(1e-15));
    CHECK(rep.data_time == Approx(0.2e-6).margin(1e-15));

    // echo nearly matches the data amplitude and flips its sign
    REQUIRE(rep.efficiency_defined);
    CHECK(rep.efficiency > 0.95);
    CHECK(rep.efficiency < 1.01);
    CHECK(rep.amplitudes[0] * rep.data_amplitude < 0.0);

    // coherence is collapsed between data and echo (a few percent of tail
    // from the rephasing pulse's own transient is still draining away)
    const double mid = sequence::extract_amplitude(run.result, 3.0e-6);
    CHECK(std::abs(mid) < 0.03 * std::abs(rep.data_amplitude));

    // the echo is the extremum of the revival
    const int expect = static_cast<int>(4100000 / run.result.sample_dt);
    const int from = static_cast<int>(2400000 / run.result.sample_dt);
    CHECK(std::abs(peak_sample(run.result.total_im, from) - expect) <= 1);
}

TEST_CASE("second echo of equal rephasing pulses is absorptive") {
    const auto row = presets::sweep_row(presets::fig2_row_spec(), "R.area", 1.0, 1);
    CHECK(row.E1_sim == Approx(0.5).margin(0.03));
    CHECK(row.E2_sim < -0.40);
    CHECK(row.E2_sim > -0.55);
    CHECK(row.E2_eff == 0.0);  // nothing emissive to keep
    CHECK(row.eta == 0.0);
    CHECK(row.E1_eq3 == Approx(0.5).margin(1e-12));
    CHECK(row.E2_eq4 == Approx(-std::sqrt(2.0) * 0.3).margin(1e-12));
}

TEST_CASE("second echo turns emissive below the window boundary") {
    const auto row = presets::sweep_row(presets::fig2_row_spec(), "R.area", 0.5, 1);
    CHECK(row.E2_sim > 0.0);
    CHECK(row.E2_eff == Approx(row.E2_sim).margin(1e-15));
    CHECK(row.eta > 0.0);
}

TEST_CASE("amplitude extraction snaps to the nearest sample and checks bounds") {
    const auto run = presets::run_experiment(presets::fig1_spec("d"), 2);
    const auto& res = run.result;
    CHECK(sequence::extract_amplitude(res, 4.07e-6) ==
          sequence::extract_amplitude(res, 4.1e-6));
    CHECK(sequence::extract_amplitude(res, 4.04e-6) ==
          sequence::extract_amplitude(res, 4.0e-6));
    CHECK_NOTHROW(sequence::extract_amplitude(res, 0.0));
    CHECK_NOTHROW(sequence::extract_amplitude(res, 5.0e-6));
    CHECK_THROWS_AS(sequence::extract_amplitude(res, -0.1e-6), std::out_of_range);
    CHECK_THROWS_AS(sequence::extract_amplitude(res, 5.001e-6), std::out_of_range);
}

TEST_CASE("the emissive filter keeps strictly positive groups") {
    const auto out = sequence::emissive_filter({0.2, -0.1, 0.0});
    REQUIRE(out.mask.size() == 3);
    CHECK(out.mask[0] == 1);
    CHECK(out.mask[1] == 0);
    CHECK(out.mask[2] == 0);
    CHECK(out.e2_eff == Approx(0.2).margin(1e-15));
}

TEST_CASE("per-group echo signs follow the local pulse area window") {
    const auto run = presets::run_experiment(presets::fig3_spec(1.0), 2);
    const auto& rep = run.report;
    REQUIRE(rep.echo_times.size() == 2);
    REQUIRE(rep.emissive_mask.size() == 41);

    const auto& e2 = rep.per_group_echo.back();
    int emissive = 0, absorptive = 0, checked = 0;
    for (size_t j = 0; j < e2.size(); ++j) {
        if (rep.emissive_mask[j]) ++emissive;
        else ++absorptive;
        if (std::abs(e2[j]) < 1e-4) continue;  // below the sign-resolution floor
        ++checked;
        const double local_area = pi * run.spatial.amplitudes[j];
        CHECK(static_cast<bool>(rep.emissive_mask[j]) == theory::emissive_window(local_area));
    }
    CHECK(checked >= 28);
    CHECK(emissive > 0);
    CHECK(absorptive > 0);

    // masked extraction reproduces the filtered echo amplitude
    CHECK(sequence::extract_amplitude(run.result, rep.echo_times.back(), sequence::Scope::mask,
                                      rep.emissive_mask) == rep.e2_eff);
}

TEST_CASE("uniform pi rephasing pulses leave no emissive groups") {
    config::ExperimentSpec s;
    s.pulses = {pulse("D", 0.1, 0.2),
                pulse("R1", 3.1, 1.0, config::PulseProfile::uniform),
                pulse("R2", 9.1, 1.0, config::PulseProfile::uniform)};
    const auto run = presets::run_experiment(s, 2);
    const auto& rep = run.report;
    CHECK(std::none_of(rep.emissive_mask.begin(), rep.emissive_mask.end(),
                       [](char m) { return m != 0; }));
    CHECK(rep.e2_eff == 0.0);
    CHECK(rep.efficiency == 0.0);
    CHECK(rep.amplitudes.back() < 0.0);
}

TEST_CASE("uniform sub-window rephasing pulses keep every group emissive") {
    config::ExperimentSpec s;
    s.pulses = {pulse("D", 0.1, 0.5),
                pulse("R1", 3.1, 0.5, config::PulseProfile::uniform),
                pulse("R2", 9.1, 0.5, config::PulseProfile::uniform)};
    const auto run = presets::run_experiment(s, 2);
    const auto& rep = run.report;
    CHECK(std::all_of(rep.emissive_mask.begin(), rep.emissive_mask.end(),
                      [](char m) { return m != 0; }));
    CHECK(rep.e2_eff == Approx(rep.amplitudes.back()).margin(1e-15));
    CHECK(rep.amplitudes.back() > 0.0);
}

TEST_CASE("efficiency is the echo to data amplitude ratio") {
    CHECK(sequence::efficiency(-0.3, 0.6) == Approx(0.5).margin(1e-15));
    CHECK(sequence::efficiency(0.3, -0.6) == Approx(0.5).margin(1e-15));
    CHECK_THROWS_AS(sequence::efficiency(0.1, 0.0), sequence::undefined_efficiency_error);
}

TEST_CASE("weak data pulses echo linearly in their area") {
    auto weak = [](double data_area) {
        config::ExperimentSpec s = single_atom_spec(data_area);
        s.pulses.push_back(pulse("R", 2.1, 1.0, config::PulseProfile::uniform));
        const auto run = presets::run_experiment(s, 1);
        return std::abs(run.report.amplitudes[0]);
    };
    const double ratio = weak(0.10) / weak(0.05);
    const double expected = std::sin(0.10 * pi) / std::sin(0.05 * pi);
    CHECK(ratio == Approx(expected).epsilon(0.01));
}

TEST_CASE("worker count never changes the totals") {
    const auto spec = presets::fig1_spec("dr");
    const auto a = presets::run_experiment(spec, 1);
    const auto b = presets::run_experiment(spec, 3);
    REQUIRE(a.result.total_im.size() == b.result.total_im.size());
    for (size_t k = 0; k < a.result.total_im.size(); ++k) {
        CHECK(a.result.total_im[k] == b.result.total_im[k]);
        CHECK(a.result.total_re[k] == b.result.total_re[k]);
    }
}

TEST_CASE("the late echo peaks at its analytic time") {
    const auto run = presets::run_experiment(presets::fig3_spec(1.0), 2);
    const int expect = static_cast<int>(12100000 / run.result.sample_dt);
    const int from = static_cast<int>(9300000 / run.result.sample_dt);
    CHECK(std::abs(peak_sample(run.result.total_im, from) - expect) <= 1);
}

TEST_CASE("group simulation validates the amplitude scale") {
    const auto tl = sequence::build_timeline(presets::fig1_spec("d"));
    CHECK_THROWS_AS(sequence::simulate_group(tl, 0.0, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(sequence::simulate_group(tl, -0.5, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(sequence::simulate_group(tl, 1.5, {0.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(sequence::simulate_group(tl, 1.0, {0.0, 0.0}));
}

TEST_CASE("opposite detunings cancel the real part of the total") {
    const auto run = presets::run_experiment(presets::fig1_spec("d"), 2);
    double max_im = 0.0, max_re = 0.0;
    for (size_t k = 0; k < run.result.total_im.size(); ++k) {
        max_im = std::max(max_im, std::abs(run.result.total_im[k]));
        max_re = std::max(max_re, std::abs(run.result.total_re[k]));
    }
    CHECK(max_re < 1e-9 * max_im);
}
