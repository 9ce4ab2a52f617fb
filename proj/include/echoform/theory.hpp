#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

// Closed-form reference laws for the echo amplitudes and the emissive-area
// windows, plus the fitting / root-finding utilities used to compare
// simulation output against them.

namespace echoform::theory {

struct EmissiveWindowParams {
    double alpha = 5.0 / 8.0;  // window width in units of pi
    int n_max = 4;
};

// True iff the rephasing area lies strictly inside an emissive window:
// (2n, 2n + alpha) or (2(n+1) - alpha, 2(n+1)) in units of pi.
inline bool emissive_window(double phi_r, const EmissiveWindowParams& params = {}) {
    if (!(params.alpha > 0.0 && params.alpha < 1.0))
        throw std::invalid_argument("emissive_window: alpha must lie in (0, 1)");
    const double r = phi_r / std::numbers::pi;
    for (int n = 0; n <= params.n_max; ++n) {
        const double lo = 2.0 * n;
        const double hi = 2.0 * (n + 1);
        if (r > lo && r < lo + params.alpha) return true;
        if (r > hi - params.alpha && r < hi) return true;
    }
    return false;
}

// First-echo amplitude law for a uniform rephasing pulse of area phi_r.
inline double predict_E1(double phi_r) {
    const double s = std::sin(phi_r / 2.0);
    return s * s / 2.0;
}

// Second-echo amplitude law; positive values are emissive.
inline double predict_E2(double phi_r) {
    const double s = std::sin(phi_r / 2.0);
    const double c = std::cos(phi_r / 2.0);
    return -std::numbers::sqrt2 * (s * s * (0.3 - c * c));
}

struct FitResult {
    double exponent = 0.0;
    double scale = 0.0;
    double rms_residual = 0.0;
};

struct fit_undefined_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Least-squares fit of scale * sin^k((pi/2) G_j) to a profile of echo
// amplitudes; the profile is normalized to its maximum first. k is scanned
// over [0.5, 4] at 0.01 steps (fixed for reproducibility), scale solved in
// closed form per k.
inline FitResult fit_sin_power(const std::vector<double>& amplitudes,
                               const std::vector<double>& profile) {
    if (amplitudes.size() != profile.size() || amplitudes.size() < 5)
        throw std::invalid_argument("fit_sin_power: need matching lists of length >= 5");
    double peak = 0.0;
    for (double v : profile)
        if (std::abs(v) > std::abs(peak)) peak = v;
    if (peak == 0.0) throw fit_undefined_error("fit_sin_power: all-zero profile, fit undefined");

    const size_t n = profile.size();
    std::vector<double> norm(n), base(n);
    for (size_t i = 0; i < n; ++i) {
        norm[i] = profile[i] / peak;
        base[i] = std::sin(std::numbers::pi / 2.0 * amplitudes[i]);
    }
    FitResult best;
    best.rms_residual = std::numeric_limits<double>::infinity();
    for (int step = 0; step <= 350; ++step) {
        const double k = 0.5 + 0.01 * step;
        double sp = 0.0, ss = 0.0;
        std::vector<double> model(n);
        for (size_t i = 0; i < n; ++i) {
            model[i] = std::pow(base[i], k);
            sp += norm[i] * model[i];
            ss += model[i] * model[i];
        }
        if (ss == 0.0) continue;
        const double scale = sp / ss;
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double d = norm[i] - scale * model[i];
            acc += d * d;
        }
        const double rms = std::sqrt(acc / static_cast<double>(n));
        if (rms < best.rms_residual) {
            best.exponent = k;
            best.scale = scale;
            best.rms_residual = rms;
        }
    }
    return best;
}

// Sign changes of f on [0, 2pi], each bisected down to `tol`. The initial
// scan uses pi/256 cells; exact zeros at scan points are reported directly.
inline std::vector<double> find_zero_crossings(const std::function<double(double)>& f,
                                               double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_zero_crossings: tol must be positive");
    const int cells = 512;
    const double width = 2.0 * std::numbers::pi / cells;
    std::vector<double> out;
    double a = 0.0, fa = f(0.0);
    for (int i = 1; i <= cells; ++i) {
        const double b = width * i;
        const double fb = f(b);
        if (fa == 0.0) {
            if (out.empty() || std::abs(out.back() - a) > tol) out.push_back(a);
        } else if (fb != 0.0 && std::signbit(fa) != std::signbit(fb)) {
            double lo = a, hi = b, flo = fa;
            while (hi - lo > tol) {
                const double mid = (lo + hi) / 2.0;
                const double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(fm) == std::signbit(flo)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push_back((lo + hi) / 2.0);
        }
        a = b;
        fa = fb;
    }
    return out;
}

}  // namespace echoform::theory
