#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "echoform/csv.hpp"
#include "echoform/presets.hpp"
#include "echoform/theory.hpp"

// Acceptance suite: every release criterion as one named pass/fail check
// with its tolerance pinned here. The CLI `selftest` subcommand and the
// acceptance test binary both run this list.

namespace echoform::selftest {

struct Criterion {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline bool band(double v, double lo, double hi) { return v >= lo && v <= hi; }

inline std::string band_txt(double v, double lo, double hi) {
    return num(v) + " (want " + num(lo) + " .. " + num(hi) + ")";
}

// Linear-interpolated sign changes of E2 across sweep rows; rows where
// either side is below the amplitude floor are ignored as noise.
inline std::vector<double> e2_crossings(const std::vector<csv::SweepRow>& rows,
                                        double floor = 1e-4) {
    std::vector<double> out;
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
        const double a = rows[i].E2_sim, b = rows[i + 1].E2_sim;
        if (std::abs(a) < floor || std::abs(b) < floor) continue;
        if ((a > 0) == (b > 0)) continue;
        const double x = rows[i].phi_r_over_pi +
                         (rows[i + 1].phi_r_over_pi - rows[i].phi_r_over_pi) * a / (a - b);
        out.push_back(x);
    }
    return out;
}

inline dynamics::TwoLevelState bloch_state(double u, double v, double w) {
    dynamics::TwoLevelState s;
    s.rho22 = (1.0 + w) / 2.0;
    s.rho11 = (1.0 - w) / 2.0;
    s.re_rho12 = u / 2.0;
    s.im_rho12 = -v / 2.0;
    return s;
}

inline double state_dist(const dynamics::TwoLevelState& a, const dynamics::TwoLevelState& b) {
    double m = std::abs(a.rho11 - b.rho11);
    m = std::max(m, std::abs(a.rho22 - b.rho22));
    m = std::max(m, std::abs(a.re_rho12 - b.re_rho12));
    m = std::max(m, std::abs(a.im_rho12 - b.im_rho12));
    return m;
}

}  // namespace detail

inline std::vector<Criterion> run_acceptance(int workers) {
    namespace dyn = dynamics;
    using detail::band;
    using detail::band_txt;
    using detail::num;
    std::vector<Criterion> out;
    auto add = [&](std::string name, bool pass, std::string detail_txt) {
        out.push_back({std::move(name), pass, std::move(detail_txt)});
    };

    // Two-pulse echo presets: efficiency plus the shape of the echo across
    // the beam profile for each profile assignment.
    {
        const auto run = presets::run_experiment(presets::fig1_spec("d"), workers);
        const auto fit =
            theory::fit_sin_power(run.spatial.amplitudes, run.report.per_group_echo.back());
        add("fig1-case1-efficiency", band(run.report.efficiency, 0.98, 1.02),
            "eta = " + band_txt(run.report.efficiency, 0.98, 1.02));
        add("fig1-case1-profile-rms", fit.rms_residual < 0.02,
            "rms residual = " + num(fit.rms_residual) + " (want < 0.02)");
        add("fig1-case1-exponent", band(fit.exponent, 0.9, 1.1),
            "exponent = " + band_txt(fit.exponent, 0.9, 1.1));
    }
    {
        const auto run = presets::run_experiment(presets::fig1_spec("r"), workers);
        const auto fit =
            theory::fit_sin_power(run.spatial.amplitudes, run.report.per_group_echo.back());
        add("fig1-case2-exponent", band(fit.exponent, 1.9, 2.1),
            "exponent = " + band_txt(fit.exponent, 1.9, 2.1));
        add("fig1-case2-efficiency", band(run.report.efficiency, 0.40, 0.55),
            "eta = " + band_txt(run.report.efficiency, 0.40, 0.55));
    }
    {
        const auto run = presets::run_experiment(presets::fig1_spec("dr"), workers);
        const auto fit =
            theory::fit_sin_power(run.spatial.amplitudes, run.report.per_group_echo.back());
        add("fig1-case3-exponent", band(fit.exponent, 2.9, 3.1),
            "exponent = " + band_txt(fit.exponent, 2.9, 3.1));
        add("fig1-case3-efficiency", band(run.report.efficiency, 0.65, 0.75),
            "eta = " + band_txt(run.report.efficiency, 0.65, 0.75));
    }

    // Rephasing-area sweep against the closed-form echo laws.
    {
        const auto spec = presets::fig2_row_spec();
        const auto rows = presets::sweep_rephasing_area(spec, spec.sweep->parameter,
                                                        spec.sweep->from_pi, spec.sweep->to_pi,
                                                        spec.sweep->step_pi, workers);
        double acc1 = 0.0;
        for (const auto& r : rows) {
            const double d = r.E1_sim - r.E1_eq3;
            acc1 += d * d;
        }
        const double e1_rms = std::sqrt(acc1 / rows.size());
        add("fig2-e1-rms", e1_rms < 0.02, "rms = " + num(e1_rms) + " (want < 0.02)");

        const csv::SweepRow* at_pi = nullptr;
        for (const auto& r : rows)
            if (std::abs(r.phi_r_over_pi - 1.0) < 1e-12) at_pi = &r;
        double e2_rms = std::numeric_limits<double>::infinity();
        if (at_pi && at_pi->E2_sim != 0.0) {
            const double scale = at_pi->E2_eq4 / at_pi->E2_sim;
            double acc2 = 0.0;
            for (const auto& r : rows) {
                const double d = scale * r.E2_sim - r.E2_eq4;
                acc2 += d * d;
            }
            e2_rms = std::sqrt(acc2 / rows.size());
        }
        add("fig2-e2-normalized-rms", e2_rms < 0.05,
            "rms = " + num(e2_rms) + " (want < 0.05, scaled at peak area pi)");

        const auto cross = detail::e2_crossings(rows);
        const bool two = cross.size() == 2;
        const bool placed = two && band(cross[0], 0.58, 0.68) && band(cross[1], 1.32, 1.42);
        std::string txt = std::to_string(cross.size()) + " sign changes at";
        for (double c : cross) txt += " " + num(c) + " pi";
        add("fig2-e2-sign-changes", placed,
            txt + " (want two, in 0.63 +/- 0.05 and 1.37 +/- 0.05)");
    }

    // Gaussian double-rephasing efficiency curve.
    {
        const auto focus = presets::run_experiment(presets::fig3_spec(1.0), workers);
        add("fig3-eta-at-pi", band(focus.report.efficiency, 0.049, 0.089),
            "eta = " + band_txt(focus.report.efficiency, 0.049, 0.089));

        const auto spec = presets::fig3_spec(1.0);
        const auto rows = presets::sweep_rephasing_area(spec, spec.sweep->parameter,
                                                        spec.sweep->from_pi, spec.sweep->to_pi,
                                                        spec.sweep->step_pi, workers);
        double best = 0.0, best_area = 0.0;
        for (const auto& r : rows)
            if (r.eta > best) {
                best = r.eta;
                best_area = r.phi_r_over_pi;
            }
        add("fig3-max-eta",
            band(best, 0.22, 0.30) && std::abs(best_area - 0.5) < 1e-12,
            "max eta = " + band_txt(best, 0.22, 0.30) + " at peak area " + num(best_area) +
                " pi (want 0.5 pi)");

        std::vector<double> maxima;
        for (size_t i = 1; i + 1 < rows.size(); ++i)
            if (rows[i].eta > rows[i - 1].eta && rows[i].eta > rows[i + 1].eta)
                maxima.push_back(rows[i].eta);
        bool damped = !maxima.empty();
        for (size_t i = 1; i < maxima.size(); ++i)
            if (!(maxima[i] < maxima[i - 1])) damped = false;
        std::string mx = "local maxima:";
        for (double m : maxima) mx += " " + num(m);
        add("fig3-damped-maxima", damped, mx + " (want strictly decreasing)");

        const auto tail = presets::sweep_rephasing_area(spec, spec.sweep->parameter, 4.0, 8.0,
                                                        0.25, workers);
        double mean = 0.0, lo = 1e9, hi = -1e9;
        for (const auto& r : tail) {
            mean += r.eta;
            lo = std::min(lo, r.eta);
            hi = std::max(hi, r.eta);
        }
        mean /= tail.size();
        add("fig3-tail-efficiency", band(mean, 0.07, 0.13),
            "mean eta over peak areas 4 pi .. 8 pi = " + band_txt(mean, 0.07, 0.13) +
                ", pointwise " + num(lo) + " .. " + num(hi));
    }

    // Purity conservation along undamped trajectories.
    {
        const auto tl = sequence::build_timeline(presets::fig3_spec(1.0));
        double worst = 0.0;
        for (double g : {0.0177, 0.5, 1.0})
            for (double dmhz : {0.0, 0.3, -0.3, 1.4, -1.4}) {
                const dyn::AtomParams atom{2.0 * std::numbers::pi * dmhz * 1e6, 0.0};
                const auto tr = sequence::simulate_group(tl, g, atom);
                for (size_t k = 0; k < tr.re.size(); ++k) {
                    dyn::TwoLevelState s;
                    s.rho11 = tr.rho11[k];
                    s.rho22 = tr.rho22[k];
                    s.re_rho12 = tr.re[k];
                    s.im_rho12 = tr.im[k];
                    worst = std::max(worst, std::abs(dyn::purity(s) - 1.0));
                }
            }
        add("property-purity-conservation", worst <= 1e-9,
            "max |tr(rho^2) - 1| = " + num(worst) + " (want <= 1e-9)");
    }

    // Closed-form propagator against the RK4 oracle on randomized segments.
    {
        std::mt19937_64 rng(20260816ULL);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double u, v, w;
            do {
                u = 2.0 * unit(rng) - 1.0;
                v = 2.0 * unit(rng) - 1.0;
                w = 2.0 * unit(rng) - 1.0;
            } while (u * u + v * v + w * w > 1.0);
            const auto s0 = detail::bloch_state(u, v, w);
            dyn::DriveSegment seg;
            seg.duration = 1e-9 + unit(rng) * (2e-7 - 1e-9);
            seg.rabi_frequency = unit(rng) * 2.0 * std::numbers::pi * 1e7;
            seg.phase = unit(rng) * 2.0 * std::numbers::pi;
            const dyn::AtomParams atom{(2.0 * unit(rng) - 1.0) * 2.0 * std::numbers::pi * 1.4e6,
                                       0.0};
            const auto exact = dyn::propagate_segment(s0, seg, atom);
            const auto rk = dyn::rk4_oracle(s0, seg, atom, 1e-9);
            worst = std::max(worst, detail::state_dist(exact, rk));
        }
        add("property-oracle-agreement", worst < 1e-6,
            "max deviation over 1000 segments = " + num(worst) + " (want < 1e-6)");
    }

    // Splitting a segment must compose to the whole segment.
    {
        std::mt19937_64 rng(73ULL);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            double u, v, w;
            do {
                u = 2.0 * unit(rng) - 1.0;
                v = 2.0 * unit(rng) - 1.0;
                w = 2.0 * unit(rng) - 1.0;
            } while (u * u + v * v + w * w > 1.0);
            const auto s0 = detail::bloch_state(u, v, w);
            const double total = 1e-9 + unit(rng) * 2e-7;
            const double cut = unit(rng) * total;
            const double rabi = unit(rng) * 2.0 * std::numbers::pi * 1e7;
            const double phase = unit(rng) * 2.0 * std::numbers::pi;
            const dyn::AtomParams atom{(2.0 * unit(rng) - 1.0) * 2.0 * std::numbers::pi * 1.4e6,
                                       0.0};
            const auto whole = dyn::propagate_segment(s0, {total, rabi, phase}, atom);
            const auto split = dyn::propagate_segment(
                dyn::propagate_segment(s0, {cut, rabi, phase}, atom), {total - cut, rabi, phase},
                atom);
            worst = std::max(worst, detail::state_dist(whole, split));
        }
        add("property-composition", worst <= 1e-9,
            "max split vs whole deviation = " + num(worst) + " (want <= 1e-9)");
    }

    // Spectral weight normalization.
    {
        const auto grid = grids::build_spectral_grid(281, 1e4, 1.2e6);
        double sum = 0.0;
        for (double w : grid.weights) sum += w;
        add("property-weight-normalization", std::abs(sum - 1.0) <= 1e-12,
            "|sum - 1| = " + num(std::abs(sum - 1.0)) + " (want <= 1e-12)");
    }

    // Symmetric detunings leave the summed coherence purely imaginary at
    // the echoes.
    {
        const auto run = presets::run_experiment(presets::fig3_spec(1.0), workers);
        double worst = 0.0;
        for (double t : run.report.echo_times) {
            const int idx = sequence::nearest_sample(run.result, t);
            const double re = std::abs(run.result.total_re[idx]);
            const double im = std::abs(run.result.total_im[idx]);
            worst = std::max(worst, re / (im + 1e-6));
        }
        add("property-detuning-conjugacy", worst <= 1e-9,
            "max |sum Re| / |sum Im| at echoes = " + num(worst) + " (want <= 1e-9)");
    }

    // Single resonant atom, four-step phase cycling: the echo branch of the
    // two-pulse sequence must follow sin(phi_d) sin^2(phi_r / 2) / 2.
    {
        using cplx = std::complex<double>;
        const dyn::AtomParams atom{0.0, 0.0};
        double worst = 0.0;
        for (double fd : {0.05, 0.1, 0.25, 0.5, 0.75})
            for (double fr : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75}) {
                const double phi_d = fd * std::numbers::pi;
                const double phi_r = fr * std::numbers::pi;
                cplx branch = 0.0;
                for (int q = 0; q < 4; ++q) {
                    const double ph = q * std::numbers::pi / 2.0;
                    auto s = dyn::propagate_segment(dyn::ground_state(),
                                                    {1e-7, phi_d / 1e-7, 0.0}, atom);
                    s = dyn::propagate_segment(s, {1e-6, 0.0, 0.0}, atom);
                    s = dyn::propagate_segment(s, {1e-7, phi_r / 1e-7, ph}, atom);
                    branch += std::exp(cplx(0.0, -2.0 * ph)) *
                              cplx(s.re_rho12, s.im_rho12);
                }
                branch /= 4.0;
                const double law = std::sin(phi_d) * std::pow(std::sin(phi_r / 2.0), 2) / 2.0;
                const double rel = std::abs(branch - cplx(0.0, law)) / law;
                worst = std::max(worst, rel);
            }
        add("property-two-pulse-law", worst < 1e-6,
            "max relative deviation = " + num(worst) + " (want < 1e-6)");
    }

    // Worker count must not change a single output byte.
    {
        const auto spec = presets::fig1_spec("dr");
        const auto base = csv::render_timeseries(presets::run_experiment(spec, 1).result);
        const bool same2 = csv::render_timeseries(presets::run_experiment(spec, 2).result) == base;
        const bool same8 = csv::render_timeseries(presets::run_experiment(spec, 8).result) == base;
        add("property-worker-determinism", same2 && same8,
            std::string("1 vs 2 workers: ") + (same2 ? "identical" : "DIFFER") +
                ", 1 vs 8 workers: " + (same8 ? "identical" : "DIFFER"));
    }

    // Serialize -> parse -> serialize must be the identity on a generated
    // corpus of valid configurations.
    {
        std::vector<config::ExperimentSpec> corpus;
        for (int i = 0; i < 20; ++i) {
            config::ExperimentSpec s;
            s.simulation.sample_dt_us = (i % 3 == 0) ? 0.05 : 0.1;
            s.simulation.pulse_duration_us = (i % 4 == 0) ? 0.05 : 0.1;
            s.simulation.gamma2_per_us = (i % 5 == 0) ? 0.125 : 0.0;
            s.spectral.n_groups = (i % 2 == 0) ? 281 : 81 + 2 * i;
            s.spectral.spacing_khz = 10.0 + 0.5 * i;
            s.spectral.fwhm_mhz = 1.2;
            s.spatial.mode = (i % 3 == 0)   ? grids::SpatialMode::uniform
                             : (i % 3 == 1) ? grids::SpatialMode::gaussian
                                            : grids::SpatialMode::linear;
            s.spatial.n_groups = (i % 3 == 0) ? 1 : 41;
            s.spatial.coverage = (i % 2 == 0) ? 0.9955 : 0.875;
            config::PulseSpec d;
            d.name = "D";
            d.t_us = 0.1;
            if (i % 2 == 0) d.area_pi = 0.5 + 0.03125 * i;
            else d.rabi_mhz = 1.25 + 0.25 * i;
            d.profile = (i % 2 == 0) ? config::PulseProfile::gaussian
                                     : config::PulseProfile::uniform;
            s.pulses.push_back(d);
            if (i % 4 != 3) {
                config::PulseSpec r;
                r.name = "R";
                r.t_us = 2.1 + 0.25 * i;
                r.area_pi = 1.0;
                r.profile = config::PulseProfile::gaussian;
                s.pulses.push_back(r);
            }
            if (i % 5 == 2 && i % 4 != 3) {  // sweeps only make sense with the R pulse
                s.sweep.emplace();
                s.sweep->parameter = "R.area";
                s.sweep->from_pi = 0.25;
                s.sweep->to_pi = 2.0;
                s.sweep->step_pi = 0.25;
            }
            corpus.push_back(std::move(s));
        }
        int bad = -1;
        for (int i = 0; i < static_cast<int>(corpus.size()); ++i) {
            const std::string text = config::serialize_spec(corpus[i]);
            const auto parsed = config::parse_config(text);
            if (!parsed.ok() || !(parsed.spec == corpus[i]) ||
                config::serialize_spec(parsed.spec) != text) {
                bad = i;
                break;
            }
        }
        add("property-config-round-trip", bad < 0,
            bad < 0 ? "20 specs identical through serialize/parse/serialize"
                    : "spec #" + std::to_string(bad) + " failed round trip");
    }

    return out;
}

inline bool print_report(std::ostream& os, const std::vector<Criterion>& criteria) {
    bool all = true;
    for (const auto& c : criteria) {
        os << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << "\n";
        all = all && c.pass;
    }
    os << (all ? "all criteria passed" : "ACCEPTANCE FAILURE") << " (" << criteria.size()
       << " criteria)\n";
    return all;
}

}  // namespace echoform::selftest
