#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "echoform/grids.hpp"
#include "echoform/theory.hpp"

using namespace echoform;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("emissive windows around the first period") {
    CHECK(theory::emissive_window(pi / 4));
    CHECK_FALSE(theory::emissive_window(pi));
    CHECK(theory::emissive_window(3 * pi / 2));
    CHECK_FALSE(theory::emissive_window(5 * pi / 8));  // boundary is excluded
    CHECK_FALSE(theory::emissive_window(0.0));
    CHECK_FALSE(theory::emissive_window(2 * pi));
    CHECK(theory::emissive_window(2 * pi + pi / 4));
    CHECK(theory::emissive_window(2 * pi - pi / 4));
}

TEST_CASE("emissive window rejects bad alpha") {
    CHECK_THROWS_AS(theory::emissive_window(pi / 4, {0.0, 4}), std::invalid_argument);
    CHECK_THROWS_AS(theory::emissive_window(pi / 4, {1.0, 4}), std::invalid_argument);
    CHECK(theory::emissive_window(pi / 4, {0.5, 4}));
    CHECK_FALSE(theory::emissive_window(0.6 * pi, {0.5, 4}));
}

TEST_CASE("first-echo law values") {
    CHECK(theory::predict_E1(pi) == Approx(0.5).margin(1e-15));
    CHECK(theory::predict_E1(0.0) == 0.0);
    CHECK(theory::predict_E1(pi / 2) == Approx(0.25).margin(1e-15));
}

TEST_CASE("second-echo law values and root") {
    CHECK(theory::predict_E2(pi) == Approx(-std::numbers::sqrt2 * 0.3).margin(1e-12));
    CHECK(theory::predict_E2(0.0) == 0.0);
    const double root = 2 * std::acos(std::sqrt(0.3));
    CHECK(root / pi == Approx(0.631).margin(0.001));
    CHECK(std::abs(theory::predict_E2(root)) < 1e-12);
    CHECK(theory::predict_E2(root - 0.05) > 0.0);
    CHECK(theory::predict_E2(root + 0.05) < 0.0);
}

TEST_CASE("laws are periodic and mirror-symmetric") {
    for (double f = 0.05; f < 2.0; f += 0.13) {
        const double phi = f * pi;
        CHECK(theory::predict_E1(phi + 2 * pi) == Approx(theory::predict_E1(phi)).margin(1e-12));
        CHECK(theory::predict_E2(phi + 2 * pi) == Approx(theory::predict_E2(phi)).margin(1e-12));
        CHECK(theory::predict_E2(2 * pi - phi) == Approx(theory::predict_E2(phi)).margin(1e-12));
        CHECK(theory::emissive_window(phi + 2 * pi) == theory::emissive_window(phi));
        CHECK(theory::emissive_window(2 * pi - phi) == theory::emissive_window(phi));
    }
}

TEST_CASE("window sign matches the second-echo law away from crossings") {
    const double root = 2 * std::acos(std::sqrt(0.3));
    const double crossings[] = {0.0, root, 2 * pi - root, 2 * pi};
    for (int i = 0; i <= 400; ++i) {
        const double phi = 2 * pi * i / 400.0;
        bool near = false;
        for (double c : crossings)
            if (std::abs(phi - c) < 0.01 * pi) near = true;
        if (near) continue;
        CHECK(theory::emissive_window(phi) == (theory::predict_E2(phi) > 0.0));
    }
}

TEST_CASE("sin-power fit recovers exponents from synthetic profiles") {
    const auto prof = grids::build_spatial_profile(grids::SpatialMode::gaussian, 41, 0.9955);
    for (int k = 1; k <= 3; ++k) {
        std::vector<double> echo(prof.amplitudes.size());
        for (size_t j = 0; j < echo.size(); ++j)
            echo[j] = 0.37 * std::pow(std::sin(pi / 2 * prof.amplitudes[j]), k);
        const auto fit = theory::fit_sin_power(prof.amplitudes, echo);
        CHECK(fit.exponent == Approx(static_cast<double>(k)).margin(0.02));
        CHECK(fit.rms_residual < 1e-6);
        CHECK(fit.scale == Approx(1.0).margin(1e-6));  // normalized profile peaks at 1
    }
}

TEST_CASE("sin-power fit rejects degenerate inputs") {
    const std::vector<double> g{0.1, 0.3, 0.5, 0.7, 0.9};
    CHECK_THROWS_AS(theory::fit_sin_power(g, {0, 0, 0, 0, 0}), theory::fit_undefined_error);
    CHECK_THROWS_AS(theory::fit_sin_power(g, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(theory::fit_sin_power({0.5, 1.0}, {1, 2}), std::invalid_argument);
}

TEST_CASE("zero crossings of the second-echo law") {
    const auto found = theory::find_zero_crossings([](double x) { return theory::predict_E2(x); },
                                                   1e-10);
    const double root = 2 * std::acos(std::sqrt(0.3));
    // the law touches zero at the period ends and crosses twice in between
    std::vector<double> interior;
    for (double c : found)
        if (c > 0.1 && c < 2 * pi - 0.1) interior.push_back(c);
    REQUIRE(interior.size() == 2);
    CHECK(interior[0] == Approx(root).margin(1e-8));
    CHECK(interior[1] == Approx(2 * pi - root).margin(1e-8));
    CHECK(std::abs(interior[0] - 0.625 * pi) < 0.01 * pi);
}

TEST_CASE("zero crossing utility handles flat and empty cases") {
    CHECK(theory::find_zero_crossings([](double) { return 1.0; }, 1e-9).empty());
    CHECK_THROWS_AS(theory::find_zero_crossings([](double) { return 1.0; }, 0.0),
                    std::invalid_argument);
    const auto linear = theory::find_zero_crossings([](double x) { return x - 1.0; }, 1e-10);
    REQUIRE(linear.size() == 1);
    CHECK(linear[0] == Approx(1.0).margin(1e-9));
}
