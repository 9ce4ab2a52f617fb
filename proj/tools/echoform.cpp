#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "echoform/harness.hpp"
#include "echoform/parallel.hpp"
#include "echoform/selftest.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_io = 3;
constexpr int exit_selftest = 4;

const char* usage_text =
    "usage:\n"
    "  echoform run <config> [--out DIR] [--threads N]\n"
    "  echoform fig1 --case d|r|dr [--out DIR] [--threads N]\n"
    "  echoform fig2 [--out DIR] [--threads N]\n"
    "  echoform fig3 [--peak-area X] [--out DIR] [--threads N]\n"
    "  echoform sweep --from X --to Y --step Z <config> [--out DIR] [--threads N]\n"
    "  echoform selftest [--threads N]\n"
    "\n"
    "Worker count defaults to ECHOFORM_THREADS, then to the hardware thread count.\n";

struct Options {
    std::string out_dir = ".";
    int threads = 0;
    std::string case_name;
    double peak_area = 1.0;
    std::optional<double> from, to, step;
    std::vector<std::string> positional;
};

bool parse_double_arg(const std::string& text, double& out) {
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && !text.empty() && std::isfinite(out);
}

// Returns false (after printing) on malformed flags.
bool parse_options(int argc, char** argv, int first, Options& opt) {
    auto need_value = [&](int i, const std::string& flag) -> const char* {
        if (i + 1 >= argc) {
            std::cerr << "missing value for " << flag << "\n";
            return nullptr;
        }
        return argv[i + 1];
    };
    for (int i = first; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--out") {
            const char* v = need_value(i, a);
            if (!v) return false;
            opt.out_dir = v;
            ++i;
        } else if (a == "--threads") {
            const char* v = need_value(i, a);
            if (!v) return false;
            double n;
            if (!parse_double_arg(v, n) || n < 1 || n != static_cast<int>(n)) {
                std::cerr << "--threads expects a positive integer, got '" << v << "'\n";
                return false;
            }
            opt.threads = static_cast<int>(n);
            ++i;
        } else if (a == "--case") {
            const char* v = need_value(i, a);
            if (!v) return false;
            opt.case_name = v;
            ++i;
        } else if (a == "--peak-area" || a == "--from" || a == "--to" || a == "--step") {
            const char* v = need_value(i, a);
            if (!v) return false;
            double x;
            if (!parse_double_arg(v, x)) {
                std::cerr << a << " expects a number, got '" << v << "'\n";
                return false;
            }
            if (a == "--peak-area") opt.peak_area = x;
            else if (a == "--from") opt.from = x;
            else if (a == "--to") opt.to = x;
            else opt.step = x;
            ++i;
        } else if (!a.empty() && a[0] == '-') {
            std::cerr << "unknown option '" << a << "'\n";
            return false;
        } else {
            opt.positional.push_back(a);
        }
    }
    return true;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw echoform::csv::io_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw echoform::csv::io_error("read failed for '" + path + "'");
    return ss.str();
}

std::string joined_command(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

// Loads and parses a config file; prints collected errors and returns
// nullopt when it does not parse clean.
std::optional<echoform::config::ExperimentSpec> load_config(const std::string& path, int& rc) {
    const std::string text = read_file(path);
    const auto parsed = echoform::config::parse_config(text);
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors)
            std::cerr << path << ": line " << e.line << ": "
                      << echoform::config::to_string(e.kind) << ": " << e.message << "\n";
        rc = exit_usage;
        return std::nullopt;
    }
    return parsed.spec;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace echoform;
    if (argc < 2) {
        std::cerr << usage_text;
        return exit_usage;
    }
    const std::string cmd = argv[1];
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
        std::cout << usage_text;
        return exit_ok;
    }

    Options opt;
    if (!parse_options(argc, argv, 2, opt)) {
        std::cerr << usage_text;
        return exit_usage;
    }
    const int workers = parallel::resolve_workers(opt.threads);
    const std::string cmdline = joined_command(argc, argv);

    try {
        if (cmd == "selftest") {
            const auto criteria = selftest::run_acceptance(workers);
            return selftest::print_report(std::cout, criteria) ? exit_ok : exit_selftest;
        }
        if (cmd == "fig1") {
            if (opt.case_name != "d" && opt.case_name != "r" && opt.case_name != "dr") {
                std::cerr << "fig1 requires --case d|r|dr\n";
                return exit_usage;
            }
            const auto art = harness::run_fig1(opt.case_name, opt.out_dir, workers, cmdline);
            std::cout << art.summary;
            return exit_ok;
        }
        if (cmd == "fig2") {
            const auto art = harness::run_fig2(opt.out_dir, workers, cmdline);
            std::cout << art.summary;
            return exit_ok;
        }
        if (cmd == "fig3") {
            const auto art = harness::run_fig3(opt.peak_area, opt.out_dir, workers, cmdline);
            std::cout << art.summary;
            return exit_ok;
        }
        if (cmd == "run" || cmd == "sweep") {
            if (opt.positional.size() != 1) {
                std::cerr << cmd << " requires exactly one config file\n" << usage_text;
                return exit_usage;
            }
            if (cmd == "sweep" && (!opt.from || !opt.to || !opt.step)) {
                std::cerr << "sweep requires --from, --to and --step\n";
                return exit_usage;
            }
            int rc = exit_ok;
            const auto spec = load_config(opt.positional[0], rc);
            if (!spec) return rc;
            if (cmd == "run") {
                const auto art = harness::run_config_spec(*spec, opt.out_dir, workers, cmdline);
                std::cout << art.summary;
                return exit_ok;
            }
            const auto art = harness::run_sweep_command(*spec, *opt.from, *opt.to, *opt.step,
                                                        opt.out_dir, workers, cmdline);
            std::cout << art.summary;
            return exit_ok;
        }
        std::cerr << "unknown command '" << cmd << "'\n" << usage_text;
        return exit_usage;
    } catch (const csv::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
