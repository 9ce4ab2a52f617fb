#pragma once

#include <cmath>
#include <stdexcept>

// Exact single-atom dynamics: density matrix of a driven two-level system,
// evolved segment by segment. A segment is a square drive of fixed Rabi
// frequency, phase and detuning; gaps are segments with zero Rabi frequency.

namespace echoform::dynamics {

struct TwoLevelState {
    double rho11 = 1.0;   // ground population
    double rho22 = 0.0;   // excited population
    double re_rho12 = 0.0;
    double im_rho12 = 0.0;
};

inline TwoLevelState ground_state() { return {}; }

// rho11^2 + rho22^2 + 2|rho12|^2; conserved under decay-free evolution.
inline double purity(const TwoLevelState& s) {
    return s.rho11 * s.rho11 + s.rho22 * s.rho22 +
           2.0 * (s.re_rho12 * s.re_rho12 + s.im_rho12 * s.im_rho12);
}

struct DriveSegment {
    double duration = 0.0;        // seconds
    double rabi_frequency = 0.0;  // rad/s, >= 0
    double phase = 0.0;           // radians
};

struct AtomParams {
    double detuning = 0.0;  // rad/s, signed
    double gamma2 = 0.0;    // upper-state decay rate, 1/s
};

namespace detail {

inline void check_finite(const TwoLevelState& s, const DriveSegment& seg,
                         const AtomParams& atom) {
    if (!(std::isfinite(s.rho11) && std::isfinite(s.rho22) &&
          std::isfinite(s.re_rho12) && std::isfinite(s.im_rho12)))
        throw std::invalid_argument("propagate: non-finite state field");
    if (!(std::isfinite(seg.duration) && std::isfinite(seg.rabi_frequency) &&
          std::isfinite(seg.phase)))
        throw std::invalid_argument("propagate: non-finite segment field");
    if (!(std::isfinite(atom.detuning) && std::isfinite(atom.gamma2)))
        throw std::invalid_argument("propagate: non-finite atom field");
    if (seg.duration < 0.0)
        throw std::invalid_argument("propagate: negative duration");
    if (seg.rabi_frequency < 0.0)
        throw std::invalid_argument("propagate: negative Rabi frequency");
    if (atom.gamma2 < 0.0)
        throw std::invalid_argument("propagate: negative decay rate");
}

// Bloch components (u, v, w) = (2 Re rho12, -2 Im rho12, rho22 - rho11).
// A segment precesses the Bloch vector about (W cos phi, W sin phi, Delta)
// at the generalized Rabi rate sqrt(W^2 + Delta^2); free evolution is the
// special case W = 0, where rho12 picks up exp(-i Delta T).
inline TwoLevelState rotate_exact(const TwoLevelState& s, const DriveSegment& seg,
                                  const AtomParams& atom) {
    const double ax = seg.rabi_frequency * std::cos(seg.phase);
    const double ay = seg.rabi_frequency * std::sin(seg.phase);
    const double az = atom.detuning;
    const double mag = std::sqrt(ax * ax + ay * ay + az * az);
    if (mag == 0.0 || seg.duration == 0.0) return s;

    const double u = 2.0 * s.re_rho12;
    const double v = -2.0 * s.im_rho12;
    const double w = s.rho22 - s.rho11;

    const double nx = ax / mag, ny = ay / mag, nz = az / mag;
    const double th = mag * seg.duration;
    const double c = std::cos(th), sn = std::sin(th);
    const double dot = nx * u + ny * v + nz * w;
    const double cx = ny * w - nz * v;
    const double cy = nz * u - nx * w;
    const double cz = nx * v - ny * u;
    const double u2 = u * c + cx * sn + nx * dot * (1.0 - c);
    const double v2 = v * c + cy * sn + ny * dot * (1.0 - c);
    const double w2 = w * c + cz * sn + nz * dot * (1.0 - c);

    const double pop_sum = s.rho11 + s.rho22;
    TwoLevelState out;
    out.re_rho12 = u2 / 2.0;
    out.im_rho12 = -v2 / 2.0;
    out.rho22 = (pop_sum + w2) / 2.0;
    out.rho11 = (pop_sum - w2) / 2.0;
    return out;
}

struct Deriv {
    double d11, d22, dre, dim;
};

inline Deriv equations_of_motion(const TwoLevelState& s, double om_cos, double om_sin,
                                 double delta, double gamma) {
    const double w = s.rho22 - s.rho11;
    Deriv d;
    d.dre = delta * s.im_rho12 + 0.5 * om_sin * w - 0.5 * gamma * s.re_rho12;
    d.dim = -delta * s.re_rho12 + 0.5 * om_cos * w - 0.5 * gamma * s.im_rho12;
    const double pump = -om_cos * s.im_rho12 - om_sin * s.re_rho12;
    d.d22 = pump - gamma * s.rho22;
    d.d11 = -pump + gamma * s.rho22;
    return d;
}

inline TwoLevelState rk4_span(TwoLevelState s, const DriveSegment& seg,
                              const AtomParams& atom, double substep) {
    const long n = std::max(1L, static_cast<long>(std::ceil(seg.duration / substep - 1e-9)));
    const double h = seg.duration / static_cast<double>(n);
    const double oc = seg.rabi_frequency * std::cos(seg.phase);
    const double os = seg.rabi_frequency * std::sin(seg.phase);
    auto step = [&](const TwoLevelState& x, const Deriv& k, double f) {
        TwoLevelState y = x;
        y.rho11 += f * k.d11;
        y.rho22 += f * k.d22;
        y.re_rho12 += f * k.dre;
        y.im_rho12 += f * k.dim;
        return y;
    };
    for (long i = 0; i < n; ++i) {
        const Deriv k1 = equations_of_motion(s, oc, os, atom.detuning, atom.gamma2);
        const Deriv k2 = equations_of_motion(step(s, k1, h / 2), oc, os, atom.detuning, atom.gamma2);
        const Deriv k3 = equations_of_motion(step(s, k2, h / 2), oc, os, atom.detuning, atom.gamma2);
        const Deriv k4 = equations_of_motion(step(s, k3, h), oc, os, atom.detuning, atom.gamma2);
        s.rho11 += h / 6.0 * (k1.d11 + 2 * k2.d11 + 2 * k3.d11 + k4.d11);
        s.rho22 += h / 6.0 * (k1.d22 + 2 * k2.d22 + 2 * k3.d22 + k4.d22);
        s.re_rho12 += h / 6.0 * (k1.dre + 2 * k2.dre + 2 * k3.dre + k4.dre);
        s.im_rho12 += h / 6.0 * (k1.dim + 2 * k2.dim + 2 * k3.dim + k4.dim);
    }
    return s;
}

}  // namespace detail

// Closed-form propagation for gamma2 = 0; sub-stepped integration (<= 1 ns
// steps) when decay is on, since decay breaks the pure rotation.
inline TwoLevelState propagate_segment(const TwoLevelState& state, const DriveSegment& seg,
                                       const AtomParams& atom) {
    detail::check_finite(state, seg, atom);
    if (seg.duration == 0.0) return state;
    if (atom.gamma2 == 0.0) return detail::rotate_exact(state, seg, atom);
    return detail::rk4_span(state, seg, atom, 1e-9);
}

// Independent verification path: classic explicit RK4 on the same equations.
inline TwoLevelState rk4_oracle(const TwoLevelState& state, const DriveSegment& seg,
                                const AtomParams& atom, double substep) {
    detail::check_finite(state, seg, atom);
    if (!(substep > 0.0) || !std::isfinite(substep))
        throw std::invalid_argument("rk4_oracle: substep must be positive");
    if (seg.duration == 0.0) return state;
    if (substep > seg.duration)
        throw std::invalid_argument("rk4_oracle: substep exceeds duration");
    return detail::rk4_span(state, seg, atom, substep);
}

}  // namespace echoform::dynamics
