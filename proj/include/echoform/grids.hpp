#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

// Discretization axes for the ensemble: a symmetric grid of detunings with
// inhomogeneous (normal-shaped) weights, and a transverse beam profile giving
// each spatial group its relative field amplitude G_j.

namespace echoform::grids {

struct SpectralGrid {
    std::vector<double> detunings;  // rad/s, strictly increasing, symmetric about 0
    std::vector<double> weights;    // non-negative, sums to 1
};

enum class SpatialMode { gaussian, uniform, linear };

inline const char* to_string(SpatialMode m) {
    switch (m) {
        case SpatialMode::gaussian: return "gaussian";
        case SpatialMode::uniform: return "uniform";
        case SpatialMode::linear: return "linear";
    }
    return "?";
}

struct SpatialProfile {
    std::vector<double> positions;   // units of the beam sigma (gaussian mode)
    std::vector<double> amplitudes;  // relative Rabi scale G_j in (0, 1]
    SpatialMode mode = SpatialMode::gaussian;
};

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Acklam's rational approximation to the standard normal quantile, sharpened
// by one Halley step against erfc. Good to ~1e-15 over (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u =
        e * std::numbers::sqrt2 / std::numbers::inv_sqrtpi * std::exp(x * x / 2.0);
    x -= u / (1.0 + x * u / 2.0);
    return x;
}

// n_points detunings centered on zero at the given spacing; weights follow a
// normal density of the given FWHM, renormalized over the truncated grid.
inline SpectralGrid build_spectral_grid(int n_points, double spacing_hz, double fwhm_hz) {
    if (n_points < 1 || n_points % 2 == 0)
        throw std::invalid_argument("build_spectral_grid: n_points must be odd (centered grid)");
    if (!(spacing_hz > 0.0))
        throw std::invalid_argument("build_spectral_grid: spacing must be positive");
    if (!(fwhm_hz > 0.0))
        throw std::invalid_argument("build_spectral_grid: fwhm must be positive");
    SpectralGrid g;
    g.detunings.resize(n_points);
    g.weights.resize(n_points);
    const double ln2x4 = 4.0 * std::numbers::ln2;
    const int half = (n_points - 1) / 2;
    double sum = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double f = spacing_hz * (k - half);
        g.detunings[k] = 2.0 * std::numbers::pi * f;
        const double r = f / fwhm_hz;
        g.weights[k] = std::exp(-ln2x4 * r * r);
        sum += g.weights[k];
    }
    for (double& w : g.weights) w /= sum;
    return g;
}

// gaussian: equally spaced positions on [-z, z] where z encloses `coverage`
// of the normal mass; each group carries equal atom weight and a field
// amplitude exp(-x^2/2). uniform: all amplitudes 1. linear: j/n ramp.
inline SpatialProfile build_spatial_profile(SpatialMode mode, int n_groups,
                                            double coverage = 0.9955) {
    if (n_groups < 1)
        throw std::invalid_argument("build_spatial_profile: n_groups must be >= 1");
    SpatialProfile p;
    p.mode = mode;
    p.positions.resize(n_groups);
    p.amplitudes.resize(n_groups);
    switch (mode) {
        case SpatialMode::gaussian: {
            if (!(coverage > 0.0 && coverage < 1.0))
                throw std::invalid_argument("build_spatial_profile: coverage must lie in (0, 1)");
            const double z = normal_quantile(0.5 + coverage / 2.0);
            for (int j = 0; j < n_groups; ++j) {
                // exact mirror symmetry: numerator negates under j -> n-1-j
                const double x = n_groups == 1
                                     ? 0.0
                                     : z * (2.0 * j - (n_groups - 1)) / (n_groups - 1);
                p.positions[j] = x;
                p.amplitudes[j] = std::exp(-x * x / 2.0);
            }
            break;
        }
        case SpatialMode::uniform:
            for (int j = 0; j < n_groups; ++j) {
                p.positions[j] = 0.0;
                p.amplitudes[j] = 1.0;
            }
            break;
        case SpatialMode::linear:
            for (int j = 0; j < n_groups; ++j) {
                const double a = (j + 1) / static_cast<double>(n_groups);
                p.positions[j] = a;
                p.amplitudes[j] = a;
            }
            break;
    }
    return p;
}

// Normal mass enclosed between the extreme positions of a gaussian profile.
inline double enclosed_coverage(const SpatialProfile& p) {
    if (p.positions.empty()) return 0.0;
    return normal_cdf(p.positions.back()) - normal_cdf(p.positions.front());
}

}  // namespace echoform::grids
