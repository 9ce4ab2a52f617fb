#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "echoform/grids.hpp"
#include "echoform/sequence.hpp"

// CSV artifacts. All numbers go through one %.9g formatter so identical
// inputs always produce identical bytes.

namespace echoform::csv {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string render_timeseries(const sequence::EnsembleResult& res) {
    std::string out = "t_us,sum_im_rho12,sum_re_rho12\n";
    const int n = static_cast<int>(res.times.size());
    for (int k = 0; k < n; ++k) {
        out += g9(sequence::ticks_to_us(res.sample_dt * k));
        out += ',';
        out += g9(res.total_im[k]);
        out += ',';
        out += g9(res.total_re[k]);
        out += '\n';
    }
    return out;
}

// Per-group echo snapshot at the final echo time; j is 1-based.
inline std::string render_profile(const grids::SpatialProfile& spatial,
                                  const sequence::EchoReport& report) {
    std::string out = "j,x_sigma,G_j,im_rho12_echo,emissive\n";
    const auto& echo = report.per_group_echo.back();
    for (size_t j = 0; j < echo.size(); ++j) {
        out += std::to_string(j + 1);
        out += ',';
        out += g9(spatial.positions[j]);
        out += ',';
        out += g9(spatial.amplitudes[j]);
        out += ',';
        out += g9(echo[j]);
        out += ',';
        out += report.emissive_mask[j] ? '1' : '0';
        out += '\n';
    }
    return out;
}

struct SweepRow {
    double phi_r_over_pi = 0.0;
    double E1_sim = 0.0;
    double E2_sim = 0.0;
    double E2_eff = 0.0;
    double eta = 0.0;
    double E1_eq3 = 0.0;
    double E2_eq4 = 0.0;
};

inline std::string render_sweep(const std::vector<SweepRow>& rows) {
    std::string out = "phi_r_over_pi,E1_sim,E2_sim,E2_eff,eta,E1_eq3,E2_eq4\n";
    for (const auto& r : rows) {
        out += g9(r.phi_r_over_pi);
        out += ',';
        out += g9(r.E1_sim);
        out += ',';
        out += g9(r.E2_sim);
        out += ',';
        out += g9(r.E2_eff);
        out += ',';
        out += g9(r.eta);
        out += ',';
        out += g9(r.E1_eq3);
        out += ',';
        out += g9(r.E2_eq4);
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw io_error("write failed for '" + path + "'");
}

}  // namespace echoform::csv
