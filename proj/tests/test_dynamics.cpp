#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "echoform/dynamics.hpp"

using namespace echoform;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

dynamics::TwoLevelState drive(const dynamics::TwoLevelState& s, double rabi, double delta,
                              double duration, double phase = 0.0, double gamma = 0.0) {
    return dynamics::propagate_segment(s, {duration, rabi, phase}, {delta, gamma});
}

double max_component_diff(const dynamics::TwoLevelState& a, const dynamics::TwoLevelState& b) {
    return std::max({std::abs(a.rho11 - b.rho11), std::abs(a.rho22 - b.rho22),
                     std::abs(a.re_rho12 - b.re_rho12), std::abs(a.im_rho12 - b.im_rho12)});
}

}  // namespace

TEST_CASE("pi pulse inverts the ground state") {
    const auto s = drive(dynamics::ground_state(), 2 * pi * 5e6, 0.0, 1e-7);
    CHECK(s.rho22 == Approx(1.0).margin(1e-12));
    CHECK(s.rho11 == Approx(0.0).margin(1e-12));
    CHECK(std::abs(s.re_rho12) < 1e-12);
    CHECK(std::abs(s.im_rho12) < 1e-12);
}

TEST_CASE("half-pi pulse creates maximal coherence") {
    const auto s = drive(dynamics::ground_state(), 2 * pi * 2.5e6, 0.0, 1e-7);
    CHECK(s.rho22 == Approx(0.5).margin(1e-12));
    CHECK(std::abs(s.im_rho12) == Approx(0.5).margin(1e-12));
    CHECK(std::abs(s.re_rho12) < 1e-12);
}

TEST_CASE("detuned drive follows the generalized Rabi formula") {
    const double om = 2 * pi * 5e6, delta = 2 * pi * 1.4e6, T = 1e-7;
    const auto s = drive(dynamics::ground_state(), om, delta, T);
    const double og = std::sqrt(om * om + delta * delta);
    const double expected = (om * om / (og * og)) * std::pow(std::sin(og * T / 2), 2);
    CHECK(s.rho22 == Approx(expected).margin(1e-12));
    CHECK(expected == Approx(0.92).margin(0.005));
}

TEST_CASE("free evolution advances the coherence phase by delta T") {
    const auto start = drive(dynamics::ground_state(), 2 * pi * 2.5e6, 0.0, 1e-7);
    const auto s = drive(start, 0.0, 2 * pi * 0.1e6, 5e-6);
    // delta*T = pi flips the coherence sign exactly, whichever way it winds
    CHECK(s.re_rho12 == Approx(-start.re_rho12).margin(1e-9));
    CHECK(s.im_rho12 == Approx(-start.im_rho12).margin(1e-9));
    CHECK(s.rho22 == Approx(start.rho22).margin(1e-12));
}

TEST_CASE("free evolution leaves populations alone and coherence magnitude fixed") {
    const auto start = drive(dynamics::ground_state(), 2 * pi * 2.5e6, 0.0, 1e-7);
    const auto s = drive(start, 0.0, 2 * pi * 0.7e6, 3.3e-6);
    const double m0 = std::hypot(start.re_rho12, start.im_rho12);
    CHECK(std::hypot(s.re_rho12, s.im_rho12) == Approx(m0).margin(1e-12));
    CHECK(s.rho22 == Approx(start.rho22).margin(1e-12));
}

TEST_CASE("propagate_segment rejects bad inputs") {
    const auto g = dynamics::ground_state();
    CHECK_THROWS_AS(drive(g, 1e6, 0.0, -1e-9), std::invalid_argument);
    CHECK_THROWS_AS(drive(g, -1e6, 0.0, 1e-7), std::invalid_argument);
    CHECK_THROWS_AS(drive(g, std::nan(""), 0.0, 1e-7), std::invalid_argument);
    CHECK_THROWS_AS(drive(g, 1e6, std::numeric_limits<double>::infinity(), 1e-7),
                    std::invalid_argument);
    dynamics::TwoLevelState bad = g;
    bad.re_rho12 = std::nan("");
    CHECK_THROWS_AS(drive(bad, 1e6, 0.0, 1e-7), std::invalid_argument);
    CHECK_THROWS_AS(drive(g, 1e6, 0.0, 1e-7, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("rk4 oracle agrees with the exact propagator on a pi pulse") {
    const dynamics::DriveSegment seg{1e-7, 2 * pi * 5e6, 0.0};
    const dynamics::AtomParams atom{0.0, 0.0};
    const auto exact = dynamics::propagate_segment(dynamics::ground_state(), seg, atom);
    const auto rk = dynamics::rk4_oracle(dynamics::ground_state(), seg, atom, 1e-9);
    CHECK(max_component_diff(exact, rk) < 2e-8);
}

TEST_CASE("rk4 oracle with zero duration is the identity") {
    auto s = drive(dynamics::ground_state(), 2 * pi * 1e6, 2 * pi * 3e5, 7e-8);
    const auto r = dynamics::rk4_oracle(s, {0.0, 1e6, 0.0}, {0.0, 0.0}, 1e-9);
    CHECK(max_component_diff(s, r) == 0.0);
}

TEST_CASE("rk4 oracle validates its substep") {
    const auto g = dynamics::ground_state();
    CHECK_THROWS_AS(dynamics::rk4_oracle(g, {1e-7, 1e6, 0.0}, {0.0, 0.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(dynamics::rk4_oracle(g, {1e-7, 1e6, 0.0}, {0.0, 0.0}, -1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(dynamics::rk4_oracle(g, {1e-7, 1e6, 0.0}, {0.0, 0.0}, 2e-7),
                    std::invalid_argument);
}

TEST_CASE("population decay reaches 1/e after one lifetime") {
    dynamics::TwoLevelState s;
    s.rho11 = 0.0;
    s.rho22 = 1.0;
    const auto decayed = drive(s, 0.0, 0.0, 1e-6, 0.0, 1e6);
    CHECK(decayed.rho22 == Approx(std::exp(-1.0)).margin(1e-6));
    CHECK(decayed.rho11 + decayed.rho22 == Approx(1.0).margin(1e-9));
}

TEST_CASE("coherence decays at half the population rate") {
    const auto start = drive(dynamics::ground_state(), 2 * pi * 2.5e6, 0.0, 1e-7);
    const auto s = drive(start, 0.0, 0.0, 1e-6, 0.0, 1e6);
    const double mag = std::hypot(s.re_rho12, s.im_rho12);
    CHECK(mag == Approx(0.5 * std::exp(-0.5)).margin(1e-6));
}

TEST_CASE("a 2 pi area returns any pure state to itself") {
    std::vector<dynamics::TwoLevelState> starts{dynamics::ground_state()};
    starts.push_back(drive(dynamics::ground_state(), 2 * pi * 5e6 / 3.0, 0.0, 1e-7));
    starts.push_back(drive(dynamics::ground_state(), 2 * pi * 4e6, 2 * pi * 1e6, 1.3e-7));
    for (const auto& s0 : starts) {
        const auto s1 = drive(s0, 2 * pi * 5e6, 0.0, 2e-7);
        CHECK(max_component_diff(s0, s1) < 1e-9);
    }
}

TEST_CASE("splitting a segment composes to the whole segment") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto s0 = drive(dynamics::ground_state(), 2 * pi * 5e6 * unit(rng),
                              2 * pi * 1e6 * (2 * unit(rng) - 1), 1.5e-7 * unit(rng));
        const double T = 1e-9 + 2e-7 * unit(rng), cut = T * unit(rng);
        const double om = 2 * pi * 1e7 * unit(rng), ph = 2 * pi * unit(rng);
        const double dl = 2 * pi * 1.4e6 * (2 * unit(rng) - 1);
        const auto whole = drive(s0, om, dl, T, ph);
        const auto split = drive(drive(s0, om, dl, cut, ph), om, dl, T - cut, ph);
        worst = std::max(worst, max_component_diff(whole, split));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("opposite detunings mirror the coherence under phase-0 drive") {
    for (double delta : {2 * pi * 0.3e6, 2 * pi * 1.1e6}) {
        auto plus = dynamics::ground_state();
        auto minus = dynamics::ground_state();
        const double seq[][2] = {{2 * pi * 2.5e6, 1e-7}, {0.0, 2e-6}, {2 * pi * 5e6, 1e-7},
                                 {0.0, 1.7e-6}};
        for (const auto& step : seq) {
            plus = drive(plus, step[0], delta, step[1]);
            minus = drive(minus, step[0], -delta, step[1]);
        }
        CHECK(std::abs(plus.re_rho12 + minus.re_rho12) < 1e-15);
        CHECK(std::abs(plus.im_rho12 - minus.im_rho12) < 1e-15);
        CHECK(std::abs(plus.rho22 - minus.rho22) < 1e-15);
    }
}

TEST_CASE("state invariants hold along a driven trajectory") {
    auto s = dynamics::ground_state();
    const double om = 2 * pi * 3.7e6, delta = 2 * pi * 0.9e6;
    for (int i = 0; i < 200; ++i) {
        s = drive(s, om, delta, 5e-9);
        CHECK(s.rho11 + s.rho22 == Approx(1.0).margin(1e-9));
        CHECK(s.rho11 >= -1e-12);
        CHECK(s.rho22 <= 1.0 + 1e-12);
        const double coh2 = s.re_rho12 * s.re_rho12 + s.im_rho12 * s.im_rho12;
        CHECK(coh2 <= s.rho11 * s.rho22 + 1e-9);
        CHECK(dynamics::purity(s) == Approx(1.0).margin(1e-9));
    }
}
