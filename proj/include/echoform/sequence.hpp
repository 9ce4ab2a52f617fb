#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "echoform/config.hpp"
#include "echoform/dynamics.hpp"
#include "echoform/grids.hpp"
#include "echoform/parallel.hpp"

// Pulse timelines and ensemble propagation. Time is kept in integer
// picosecond ticks so segment boundaries, sample instants and echo times
// stay exact; a sample landing on a boundary belongs to the earlier segment.

namespace echoform::sequence {

struct not_applicable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct undefined_efficiency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ticks = std::int64_t;  // picoseconds

inline ticks us_to_ticks(double us) { return static_cast<ticks>(std::llround(us * 1e6)); }
inline ticks seconds_to_ticks(double s) { return static_cast<ticks>(std::llround(s * 1e12)); }
inline double ticks_to_seconds(ticks t) { return static_cast<double>(t) * 1e-12; }
inline double ticks_to_us(ticks t) { return static_cast<double>(t) / 1e6; }

struct PulseEvent {
    std::string name;
    ticks start = 0;
    ticks duration = 0;
    double rabi_frequency = 0.0;  // rad/s at full field amplitude
    double phase = 0.0;
    bool follows_profile = true;  // scaled by G_j when true
};

struct PulseTimeline {
    std::vector<PulseEvent> events;  // sorted, non-overlapping
    ticks total_duration = 0;
    ticks sample_dt = 0;
    double gamma2 = 0.0;  // 1/s

    int n_samples() const { return static_cast<int>(total_duration / sample_dt) + 1; }
};

// Echo arrival times from pulse arrival times: one rephasing pulse gives
// 2 t_R - t_D; two give E1 = 2 t_R1 - t_D and E2 = 2 t_R2 - t_E1.
inline std::vector<ticks> echo_ticks(const PulseTimeline& tl) {
    const auto& ev = tl.events;
    if (ev.size() == 2) return {2 * ev[1].start - ev[0].start};
    if (ev.size() == 3) {
        const ticks e1 = 2 * ev[1].start - ev[0].start;
        return {e1, 2 * ev[2].start - e1};
    }
    throw not_applicable_error("echo_times: need 2 or 3 pulses, got " +
                               std::to_string(ev.size()));
}

inline std::vector<double> echo_times(const PulseTimeline& tl) {
    std::vector<double> out;
    for (ticks t : echo_ticks(tl)) out.push_back(ticks_to_seconds(t));
    return out;
}

// Validated spec -> timeline. The run window extends one whole microsecond
// past the last echo (or past the last pulse when no echo is defined).
inline PulseTimeline build_timeline(const config::ExperimentSpec& spec) {
    if (const auto errs = config::validate_spec(spec); !errs.empty())
        throw std::invalid_argument("build_timeline: " + errs.front().message);
    PulseTimeline tl;
    tl.sample_dt = us_to_ticks(spec.simulation.sample_dt_us);
    tl.gamma2 = spec.simulation.gamma2_per_us * 1e6;
    const ticks dur = us_to_ticks(spec.simulation.pulse_duration_us);
    const double dur_s = ticks_to_seconds(dur);
    for (const auto& p : spec.pulses) {
        PulseEvent ev;
        ev.name = p.name;
        ev.start = us_to_ticks(*p.t_us);
        ev.duration = dur;
        const double area = p.area_pi ? *p.area_pi * std::numbers::pi
                                      : 2.0 * std::numbers::pi * *p.rabi_mhz *
                                            spec.simulation.pulse_duration_us;
        ev.rabi_frequency = area / dur_s;
        ev.follows_profile = p.profile == config::PulseProfile::gaussian;
        tl.events.push_back(std::move(ev));
    }
    ticks last = tl.events.back().start + dur;
    if (tl.events.size() == 2 || tl.events.size() == 3) {
        for (ticks e : echo_ticks(tl)) last = std::max(last, e);
    }
    constexpr ticks us = 1'000'000;
    tl.total_duration = (last / us + 1) * us;
    return tl;
}

struct GroupSeries {
    std::vector<double> re, im, rho22, rho11;
};

namespace detail {

struct Segment {
    ticks begin, end;
    double rabi, phase;
};

inline std::vector<Segment> segments_of(const PulseTimeline& tl, double amplitude_scale) {
    std::vector<Segment> segs;
    ticks cursor = 0;
    for (const auto& ev : tl.events) {
        if (ev.start > cursor) segs.push_back({cursor, ev.start, 0.0, 0.0});
        const double scale = ev.follows_profile ? amplitude_scale : 1.0;
        segs.push_back({ev.start, ev.start + ev.duration, ev.rabi_frequency * scale, ev.phase});
        cursor = ev.start + ev.duration;
    }
    if (cursor < tl.total_duration) segs.push_back({cursor, tl.total_duration, 0.0, 0.0});
    return segs;
}

}  // namespace detail

// One atom through the whole timeline, sampled every sample_dt from t = 0.
// amplitude_scale is the group's relative field amplitude G_j.
inline GroupSeries simulate_group(const PulseTimeline& tl, double amplitude_scale,
                                  const dynamics::AtomParams& atom) {
    if (!(amplitude_scale > 0.0 && amplitude_scale <= 1.0))
        throw std::invalid_argument("simulate_group: amplitude scale must lie in (0, 1]");
    const auto segs = detail::segments_of(tl, amplitude_scale);
    const int n = tl.n_samples();
    GroupSeries out;
    out.re.resize(n);
    out.im.resize(n);
    out.rho22.resize(n);
    out.rho11.resize(n);
    dynamics::TwoLevelState s;
    int k = 0;
    ticks cursor = 0;
    auto record = [&](int idx) {
        out.re[idx] = s.re_rho12;
        out.im[idx] = s.im_rho12;
        out.rho22[idx] = s.rho22;
        out.rho11[idx] = s.rho11;
    };
    for (const auto& seg : segs) {
        while (k < n && tl.sample_dt * k <= seg.end) {
            const ticks t = tl.sample_dt * k;
            if (t > cursor) {
                s = dynamics::propagate_segment(
                    s, {ticks_to_seconds(t - cursor), seg.rabi, seg.phase}, atom);
                cursor = t;
            }
            record(k);
            ++k;
        }
        if (seg.end > cursor) {
            s = dynamics::propagate_segment(
                s, {ticks_to_seconds(seg.end - cursor), seg.rabi, seg.phase}, atom);
            cursor = seg.end;
        }
    }
    return out;
}

struct EnsembleResult {
    std::vector<double> times;  // seconds
    ticks sample_dt = 0;
    ticks total_duration = 0;
    std::vector<std::vector<double>> per_group_im;  // [spatial j][sample]
    std::vector<std::vector<double>> per_group_re;
    std::vector<double> total_im, total_re;
};

// Every (spatial x spectral) trajectory, spectral-weighted per group, then
// summed over groups. Spatial groups run in parallel; each group's spectral
// loop and the final group reduction keep fixed index order, so the output
// is bit-identical for any worker count.
inline EnsembleResult simulate_ensemble(const PulseTimeline& tl,
                                        const grids::SpatialProfile& spatial,
                                        const grids::SpectralGrid& spectral,
                                        int workers = 1) {
    const int n = tl.n_samples();
    const int nj = static_cast<int>(spatial.amplitudes.size());
    const int nk = static_cast<int>(spectral.detunings.size());
    EnsembleResult res;
    res.sample_dt = tl.sample_dt;
    res.total_duration = tl.total_duration;
    res.times.resize(n);
    for (int k = 0; k < n; ++k) res.times[k] = ticks_to_seconds(tl.sample_dt * k);
    res.per_group_im.assign(nj, {});
    res.per_group_re.assign(nj, {});

    parallel::parallel_for(nj, workers, [&](int j) {
        std::vector<double> im(n, 0.0), re(n, 0.0);
        for (int k = 0; k < nk; ++k) {
            const dynamics::AtomParams atom{spectral.detunings[k], tl.gamma2};
            const GroupSeries tr = simulate_group(tl, spatial.amplitudes[j], atom);
            const double w = spectral.weights[k];
            for (int t = 0; t < n; ++t) {
                im[t] += w * tr.im[t];
                re[t] += w * tr.re[t];
            }
        }
        res.per_group_im[j] = std::move(im);
        res.per_group_re[j] = std::move(re);
    });

    res.total_im.assign(n, 0.0);
    res.total_re.assign(n, 0.0);
    for (int j = 0; j < nj; ++j)
        for (int t = 0; t < n; ++t) {
            res.total_im[t] += res.per_group_im[j][t];
            res.total_re[t] += res.per_group_re[j][t];
        }
    return res;
}

enum class Scope { all_groups, mask };

inline int nearest_sample(const EnsembleResult& res, double t_seconds) {
    const ticks t = seconds_to_ticks(t_seconds);
    if (t < 0 || t > res.total_duration)
        throw std::out_of_range("extract_amplitude: time outside simulated range");
    const ticks idx = (t + res.sample_dt / 2) / res.sample_dt;
    const int n = static_cast<int>(res.total_duration / res.sample_dt);
    return static_cast<int>(std::min(idx, static_cast<ticks>(n)));
}

// Total Im rho12 at the sample nearest t, over all groups or a subset.
inline double extract_amplitude(const EnsembleResult& res, double t_seconds,
                                Scope scope = Scope::all_groups,
                                const std::vector<char>& mask = {}) {
    const int idx = nearest_sample(res, t_seconds);
    if (scope == Scope::all_groups) return res.total_im[idx];
    double sum = 0.0;
    for (size_t j = 0; j < res.per_group_im.size(); ++j)
        if (j < mask.size() && mask[j]) sum += res.per_group_im[j][idx];
    return sum;
}

struct EmissiveFilterResult {
    std::vector<char> mask;  // strictly positive groups
    double e2_eff = 0.0;     // sum over masked groups
};

inline EmissiveFilterResult emissive_filter(const std::vector<double>& per_group_im) {
    EmissiveFilterResult out;
    out.mask.resize(per_group_im.size());
    for (size_t j = 0; j < per_group_im.size(); ++j) {
        out.mask[j] = per_group_im[j] > 0.0 ? 1 : 0;
        if (out.mask[j]) out.e2_eff += per_group_im[j];
    }
    return out;
}

inline double efficiency(double echo_amplitude, double data_amplitude) {
    if (data_amplitude == 0.0)
        throw undefined_efficiency_error("efficiency: zero data amplitude");
    return std::abs(echo_amplitude) / std::abs(data_amplitude);
}

struct EchoReport {
    std::vector<double> echo_times;                  // seconds
    std::vector<double> amplitudes;                  // total Im rho12 per echo
    std::vector<std::vector<double>> per_group_echo; // [echo][spatial j]
    std::vector<char> emissive_mask;                 // at the final echo
    double e2_eff = 0.0;
    double data_time = 0.0;      // end of the first pulse, seconds
    double data_amplitude = 0.0; // all groups
    double efficiency = 0.0;
    bool efficiency_defined = false;
};

// Reads every echo at its analytic time (nearest sample). The efficiency
// numerator is the emissive-filtered E2 for three-pulse runs and the plain
// all-group echo amplitude for two-pulse runs; the denominator is always
// the all-group amplitude at the data time.
inline EchoReport make_echo_report(const EnsembleResult& res, const PulseTimeline& tl) {
    EchoReport rep;
    const auto echoes = echo_ticks(tl);
    rep.data_time = ticks_to_seconds(tl.events.front().start + tl.events.front().duration);
    rep.data_amplitude = extract_amplitude(res, rep.data_time);
    for (ticks e : echoes) {
        const double t = ticks_to_seconds(e);
        rep.echo_times.push_back(t);
        rep.amplitudes.push_back(extract_amplitude(res, t));
        const int idx = nearest_sample(res, t);
        std::vector<double> per_group(res.per_group_im.size());
        for (size_t j = 0; j < per_group.size(); ++j) per_group[j] = res.per_group_im[j][idx];
        rep.per_group_echo.push_back(std::move(per_group));
    }
    const auto filt = emissive_filter(rep.per_group_echo.back());
    rep.emissive_mask = filt.mask;
    rep.e2_eff = filt.e2_eff;
    const double echo_amp = echoes.size() == 1 ? rep.amplitudes.back() : rep.e2_eff;
    if (rep.data_amplitude != 0.0) {
        rep.efficiency = efficiency(echo_amp, rep.data_amplitude);
        rep.efficiency_defined = true;
    }
    return rep;
}

}  // namespace echoform::sequence
