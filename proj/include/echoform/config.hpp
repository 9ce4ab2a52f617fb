#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echoform/grids.hpp"

// Sectioned key=value experiment description. Parsing never aborts: every
// malformed construct becomes one line-numbered ConfigError and the rest of
// the document is still consumed.

namespace echoform::config {

enum class PulseProfile { gaussian, uniform };

inline const char* to_string(PulseProfile p) {
    return p == PulseProfile::gaussian ? "gaussian" : "uniform";
}

struct SimulationParams {
    double sample_dt_us = 0.1;
    double pulse_duration_us = 0.1;
    double gamma2_per_us = 0.0;
    bool operator==(const SimulationParams&) const = default;
};

struct SpectralParams {
    int n_groups = 281;
    double spacing_khz = 10.0;
    double fwhm_mhz = 1.2;
    bool operator==(const SpectralParams&) const = default;
};

struct SpatialParams {
    grids::SpatialMode mode = grids::SpatialMode::gaussian;
    int n_groups = 41;
    double coverage = 0.9955;
    bool operator==(const SpatialParams&) const = default;
};

struct PulseSpec {
    std::string name;
    std::optional<double> t_us;
    std::optional<double> area_pi;
    std::optional<double> rabi_mhz;
    PulseProfile profile = PulseProfile::gaussian;
    int src_line = 0;  // bookkeeping only

    bool operator==(const PulseSpec& o) const {
        return name == o.name && t_us == o.t_us && area_pi == o.area_pi &&
               rabi_mhz == o.rabi_mhz && profile == o.profile;
    }
};

struct SweepSpec {
    std::string parameter = "R.area";
    double from_pi = 0.25;
    double to_pi = 2.0;
    double step_pi = 0.25;
    int src_line = 0;

    bool operator==(const SweepSpec& o) const {
        return parameter == o.parameter && from_pi == o.from_pi && to_pi == o.to_pi &&
               step_pi == o.step_pi;
    }
};

struct ExperimentSpec {
    SimulationParams simulation;
    SpectralParams spectral;
    SpatialParams spatial;
    std::vector<PulseSpec> pulses;
    std::optional<SweepSpec> sweep;

    bool operator==(const ExperimentSpec& o) const {
        return simulation == o.simulation && spectral == o.spectral && spatial == o.spatial &&
               pulses == o.pulses && sweep == o.sweep;
    }
};

enum class ErrorKind { unknown_section, unknown_key, duplicate_key, bad_number, constraint_violation };

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::unknown_section: return "unknown-section";
        case ErrorKind::unknown_key: return "unknown-key";
        case ErrorKind::duplicate_key: return "duplicate-key";
        case ErrorKind::bad_number: return "bad-number";
        case ErrorKind::constraint_violation: return "constraint-violation";
    }
    return "?";
}

struct ConfigError {
    int line = 1;
    ErrorKind kind = ErrorKind::constraint_violation;
    std::string message;
};

struct ParseResult {
    ExperimentSpec spec;
    std::vector<ConfigError> errors;
    bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline bool parse_number(std::string_view token, double& out) {
    if (token.empty()) return false;
    for (char ch : token) {
        const bool ok = (ch >= '0' && ch <= '9') || ch == '+' || ch == '-' || ch == '.' ||
                        ch == 'e' || ch == 'E';
        if (!ok) return false;
    }
    const std::string buf(token);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

inline bool parse_count(std::string_view token, int& out) {
    double v;
    if (!parse_number(token, v)) return false;
    if (std::abs(v) > 1e9 || v != std::trunc(v)) return false;
    out = static_cast<int>(v);
    return true;
}

inline std::string format_number(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace detail

// Cross-field validation; `spec` may come from parse_config or be built in
// code (src_line 0 entries report as line 1).
inline std::vector<ConfigError> validate_spec(const ExperimentSpec& spec) {
    std::vector<ConfigError> errs;
    auto add = [&](int line, ErrorKind kind, std::string msg) {
        errs.push_back({line > 0 ? line : 1, kind, std::move(msg)});
    };
    const auto& sim = spec.simulation;
    if (!(sim.sample_dt_us > 0.0))
        add(1, ErrorKind::constraint_violation, "sample_dt_us must be positive");
    if (!(sim.pulse_duration_us > 0.0))
        add(1, ErrorKind::constraint_violation, "pulse_duration_us must be positive");
    if (sim.gamma2_per_us < 0.0)
        add(1, ErrorKind::constraint_violation, "gamma2_per_us must be non-negative");
    if (spec.spectral.n_groups < 1 || spec.spectral.n_groups % 2 == 0)
        add(1, ErrorKind::constraint_violation,
            "spectral n_groups must be odd (got " + std::to_string(spec.spectral.n_groups) + ")");
    if (!(spec.spectral.spacing_khz > 0.0))
        add(1, ErrorKind::constraint_violation, "spacing_khz must be positive");
    if (!(spec.spectral.fwhm_mhz > 0.0))
        add(1, ErrorKind::constraint_violation, "fwhm_mhz must be positive");
    if (spec.spatial.n_groups < 1)
        add(1, ErrorKind::constraint_violation, "spatial n_groups must be >= 1");
    if (spec.spatial.mode == grids::SpatialMode::gaussian &&
        !(spec.spatial.coverage > 0.0 && spec.spatial.coverage < 1.0))
        add(1, ErrorKind::constraint_violation, "coverage must lie in (0, 1)");

    if (spec.pulses.empty())
        add(1, ErrorKind::constraint_violation, "at least one pulse required");
    for (const auto& p : spec.pulses) {
        if (!p.t_us)
            add(p.src_line, ErrorKind::constraint_violation,
                "pulse '" + p.name + "' missing t_us");
        else if (*p.t_us < 0.0)
            add(p.src_line, ErrorKind::constraint_violation,
                "pulse '" + p.name + "' t_us must be non-negative");
        if (p.area_pi && p.rabi_mhz)
            add(p.src_line, ErrorKind::constraint_violation,
                "pulse '" + p.name + "': area_pi and rabi_mhz are mutually exclusive");
        if (!p.area_pi && !p.rabi_mhz)
            add(p.src_line, ErrorKind::constraint_violation,
                "pulse '" + p.name + "': one of area_pi or rabi_mhz required");
    }
    for (size_t i = 1; i < spec.pulses.size(); ++i) {
        const auto& a = spec.pulses[i - 1];
        const auto& b = spec.pulses[i];
        if (!a.t_us || !b.t_us) continue;
        if (!(*b.t_us > *a.t_us))
            add(b.src_line, ErrorKind::constraint_violation,
                "pulse times not strictly increasing: '" + a.name + "' then '" + b.name + "'");
        else if (*b.t_us < *a.t_us + sim.pulse_duration_us)
            add(b.src_line, ErrorKind::constraint_violation,
                "pulses '" + a.name + "' and '" + b.name + "' overlap");
    }

    if (spec.sweep) {
        const auto& sw = *spec.sweep;
        if (!(sw.step_pi > 0.0))
            add(sw.src_line, ErrorKind::constraint_violation, "sweep step_pi must be positive");
        if (sw.to_pi < sw.from_pi)
            add(sw.src_line, ErrorKind::constraint_violation,
                "sweep range is empty (to_pi < from_pi)");
        const std::string& param = sw.parameter;
        const std::string suffix = ".area";
        if (param.size() <= suffix.size() ||
            param.compare(param.size() - suffix.size(), suffix.size(), suffix) != 0) {
            add(sw.src_line, ErrorKind::constraint_violation,
                "sweep parameter '" + param + "' must have the form NAME.area");
        } else {
            const std::string base = param.substr(0, param.size() - suffix.size());
            bool matched = false;
            for (const auto& p : spec.pulses) {
                if (p.name == base) matched = true;
                if (p.name.size() > base.size() && p.name.compare(0, base.size(), base) == 0) {
                    bool digits = true;
                    for (size_t i = base.size(); i < p.name.size(); ++i)
                        if (!isdigit(static_cast<unsigned char>(p.name[i]))) digits = false;
                    if (digits) matched = true;
                }
            }
            if (!matched)
                add(sw.src_line, ErrorKind::constraint_violation,
                    "sweep parameter '" + param + "' matches no pulse");
        }
    }
    return errs;
}

// Pulses whose area the sweep parameter selects: exact name match, or the
// base name followed by digits only ("R.area" covers R1 and R2).
inline bool sweep_matches_pulse(const std::string& parameter, const std::string& pulse_name) {
    const std::string suffix = ".area";
    if (parameter.size() <= suffix.size()) return false;
    if (parameter.compare(parameter.size() - suffix.size(), suffix.size(), suffix) != 0)
        return false;
    const std::string base = parameter.substr(0, parameter.size() - suffix.size());
    if (pulse_name == base) return true;
    if (pulse_name.size() <= base.size()) return false;
    if (pulse_name.compare(0, base.size(), base) != 0) return false;
    for (size_t i = base.size(); i < pulse_name.size(); ++i)
        if (!isdigit(static_cast<unsigned char>(pulse_name[i]))) return false;
    return true;
}

inline ParseResult parse_config(std::string_view text) {
    ParseResult res;
    auto& spec = res.spec;
    auto& errs = res.errors;

    enum class Section { none, skip, simulation, spectral, spatial, pulse, sweep };
    Section section = Section::none;
    PulseSpec* pulse = nullptr;
    std::vector<std::string> seen;  // "section\x1fkey" pairs already assigned

    auto add = [&](int line, ErrorKind kind, std::string msg) {
        errs.push_back({line, kind, std::move(msg)});
    };
    auto claim = [&](int line, const std::string& scope, const std::string& key) {
        const std::string tag = scope + '\x1f' + key;
        for (const auto& s : seen)
            if (s == tag) {
                add(line, ErrorKind::duplicate_key, "duplicate key '" + key + "' in [" + scope + "]");
                return false;
            }
        seen.push_back(tag);
        return true;
    };

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line(text.data() + pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (const size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) {
            if (pos > text.size()) break;
            continue;
        }

        if (line.front() == '[') {
            if (line.back() != ']') {
                add(line_no, ErrorKind::unknown_section,
                    "unterminated section header '" + std::string(line) + "'");
                section = Section::skip;
                continue;
            }
            const std::string name(detail::trim(line.substr(1, line.size() - 2)));
            pulse = nullptr;
            if (name == "simulation") {
                section = Section::simulation;
            } else if (name == "spectral") {
                section = Section::spectral;
            } else if (name == "spatial") {
                section = Section::spatial;
            } else if (name == "sweep") {
                section = Section::sweep;
                if (!spec.sweep) {
                    spec.sweep.emplace();
                    spec.sweep->src_line = line_no;
                }
            } else if (name.rfind("pulse.", 0) == 0 && name.size() > 6) {
                section = Section::pulse;
                const std::string pname = name.substr(6);
                for (auto& p : spec.pulses)
                    if (p.name == pname) pulse = &p;
                if (!pulse) {
                    spec.pulses.push_back({});
                    pulse = &spec.pulses.back();
                    pulse->name = pname;
                    pulse->src_line = line_no;
                }
            } else {
                add(line_no, ErrorKind::unknown_section, "unknown section [" + name + "]");
                section = Section::skip;
            }
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            if (section != Section::skip)
                add(line_no, ErrorKind::constraint_violation,
                    "malformed line (expected key=value): '" + std::string(line) + "'");
            continue;
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (section == Section::skip) continue;
        if (section == Section::none) {
            add(line_no, ErrorKind::unknown_key, "key '" + key + "' outside any section");
            continue;
        }

        auto number_key = [&](const std::string& scope, double& slot) {
            if (!claim(line_no, scope, key)) return;
            double v;
            if (!detail::parse_number(value, v)) {
                add(line_no, ErrorKind::bad_number, "bad number '" + value + "' for " + key);
                return;
            }
            slot = v;
        };
        auto count_key = [&](const std::string& scope, int& slot) {
            if (!claim(line_no, scope, key)) return;
            int v;
            if (!detail::parse_count(value, v)) {
                add(line_no, ErrorKind::bad_number, "bad count '" + value + "' for " + key);
                return;
            }
            slot = v;
        };
        auto optional_number_key = [&](const std::string& scope, std::optional<double>& slot) {
            if (!claim(line_no, scope, key)) return;
            double v;
            if (!detail::parse_number(value, v)) {
                add(line_no, ErrorKind::bad_number, "bad number '" + value + "' for " + key);
                return;
            }
            slot = v;
        };

        switch (section) {
            case Section::simulation:
                if (key == "sample_dt_us") number_key("simulation", spec.simulation.sample_dt_us);
                else if (key == "pulse_duration_us")
                    number_key("simulation", spec.simulation.pulse_duration_us);
                else if (key == "gamma2_per_us")
                    number_key("simulation", spec.simulation.gamma2_per_us);
                else add(line_no, ErrorKind::unknown_key, "unknown key '" + key + "' in [simulation]");
                break;
            case Section::spectral:
                if (key == "n_groups") count_key("spectral", spec.spectral.n_groups);
                else if (key == "spacing_khz") number_key("spectral", spec.spectral.spacing_khz);
                else if (key == "fwhm_mhz") number_key("spectral", spec.spectral.fwhm_mhz);
                else add(line_no, ErrorKind::unknown_key, "unknown key '" + key + "' in [spectral]");
                break;
            case Section::spatial:
                if (key == "mode") {
                    if (!claim(line_no, "spatial", key)) break;
                    if (value == "gaussian") spec.spatial.mode = grids::SpatialMode::gaussian;
                    else if (value == "uniform") spec.spatial.mode = grids::SpatialMode::uniform;
                    else if (value == "linear") spec.spatial.mode = grids::SpatialMode::linear;
                    else
                        add(line_no, ErrorKind::constraint_violation,
                            "mode must be gaussian, uniform or linear (got '" + value + "')");
                } else if (key == "n_groups") {
                    count_key("spatial", spec.spatial.n_groups);
                } else if (key == "coverage") {
                    number_key("spatial", spec.spatial.coverage);
                } else {
                    add(line_no, ErrorKind::unknown_key, "unknown key '" + key + "' in [spatial]");
                }
                break;
            case Section::pulse: {
                const std::string scope = "pulse." + pulse->name;
                if (key == "t_us") optional_number_key(scope, pulse->t_us);
                else if (key == "area_pi") optional_number_key(scope, pulse->area_pi);
                else if (key == "rabi_mhz") optional_number_key(scope, pulse->rabi_mhz);
                else if (key == "profile") {
                    if (!claim(line_no, scope, key)) break;
                    if (value == "gaussian") pulse->profile = PulseProfile::gaussian;
                    else if (value == "uniform") pulse->profile = PulseProfile::uniform;
                    else
                        add(line_no, ErrorKind::constraint_violation,
                            "profile must be gaussian or uniform (got '" + value + "')");
                } else {
                    add(line_no, ErrorKind::unknown_key,
                        "unknown key '" + key + "' in [" + scope + "]");
                }
                break;
            }
            case Section::sweep:
                if (key == "parameter") {
                    if (!claim(line_no, "sweep", key)) break;
                    if (value.empty())
                        add(line_no, ErrorKind::constraint_violation, "sweep parameter is empty");
                    else spec.sweep->parameter = value;
                } else if (key == "from_pi") {
                    number_key("sweep", spec.sweep->from_pi);
                } else if (key == "to_pi") {
                    number_key("sweep", spec.sweep->to_pi);
                } else if (key == "step_pi") {
                    number_key("sweep", spec.sweep->step_pi);
                } else {
                    add(line_no, ErrorKind::unknown_key, "unknown key '" + key + "' in [sweep]");
                }
                break;
            default:
                break;
        }
    }

    const auto cross = validate_spec(spec);
    errs.insert(errs.end(), cross.begin(), cross.end());
    return res;
}

// Canonical text form; parse_config(serialize_spec(s)) reproduces s exactly
// (shortest-round-trip number formatting).
inline std::string serialize_spec(const ExperimentSpec& spec) {
    using detail::format_number;
    std::string out;
    out += "[simulation]\n";
    out += "sample_dt_us=" + format_number(spec.simulation.sample_dt_us) + "\n";
    out += "pulse_duration_us=" + format_number(spec.simulation.pulse_duration_us) + "\n";
    out += "gamma2_per_us=" + format_number(spec.simulation.gamma2_per_us) + "\n";
    out += "\n[spectral]\n";
    out += "n_groups=" + std::to_string(spec.spectral.n_groups) + "\n";
    out += "spacing_khz=" + format_number(spec.spectral.spacing_khz) + "\n";
    out += "fwhm_mhz=" + format_number(spec.spectral.fwhm_mhz) + "\n";
    out += "\n[spatial]\n";
    out += std::string("mode=") + grids::to_string(spec.spatial.mode) + "\n";
    out += "n_groups=" + std::to_string(spec.spatial.n_groups) + "\n";
    out += "coverage=" + format_number(spec.spatial.coverage) + "\n";
    for (const auto& p : spec.pulses) {
        out += "\n[pulse." + p.name + "]\n";
        if (p.t_us) out += "t_us=" + format_number(*p.t_us) + "\n";
        if (p.area_pi) out += "area_pi=" + format_number(*p.area_pi) + "\n";
        if (p.rabi_mhz) out += "rabi_mhz=" + format_number(*p.rabi_mhz) + "\n";
        out += std::string("profile=") + to_string(p.profile) + "\n";
    }
    if (spec.sweep) {
        out += "\n[sweep]\n";
        out += "parameter=" + spec.sweep->parameter + "\n";
        out += "from_pi=" + format_number(spec.sweep->from_pi) + "\n";
        out += "to_pi=" + format_number(spec.sweep->to_pi) + "\n";
        out += "step_pi=" + format_number(spec.sweep->step_pi) + "\n";
    }
    return out;
}

}  // namespace echoform::config
