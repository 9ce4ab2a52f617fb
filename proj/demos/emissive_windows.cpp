// Tabulates the closed-form echo laws against the emissive windows and
// locates the areas where the second echo changes sign.

#include <cstdio>
#include <numbers>

#include "echoform/theory.hpp"

int main() {
    using namespace echoform;
    constexpr double pi = std::numbers::pi;

    std::printf("%10s %10s %10s %10s\n", "phi_R/pi", "E1", "E2", "emissive");
    for (int i = 0; i <= 16; ++i) {
        const double phi = i / 8.0 * pi;
        std::printf("%10.3f %10.4f %10.4f %10s\n", phi / pi, theory::predict_E1(phi),
                    theory::predict_E2(phi), theory::emissive_window(phi) ? "yes" : "no");
    }

    const auto roots = theory::find_zero_crossings(
        [](double phi) { return theory::predict_E2(phi); }, 1e-12);
    std::printf("\nsecond-echo sign changes:");
    for (double r : roots) std::printf(" %.4f pi", r / pi);
    std::printf("\n");
    return 0;
}
