#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "cli/emit.hpp"
#include "cli/experiments.hpp"

namespace {

using namespace abkit::cli;

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_output = 4;

struct Options {
    std::string config;
    std::string out;
    std::string format;
    std::string svg;
    std::string scenario;
};

// Default quadrature tolerance from ABKIT_TOL, when set.
std::optional<double> env_tolerance() {
    const char* raw = std::getenv("ABKIT_TOL");
    if (!raw || !*raw) return std::nullopt;
    const std::string s(raw);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !(v > 0.0))
        throw ConfigError("ABKIT_TOL must be a positive number, got '" + s + "'");
    return v;
}

int run_command(Experiment experiment, const Options& opts) {
    const auto tol = env_tolerance();
    const RunConfig config = opts.config.empty() ? RunConfig::parse("", experiment, tol)
                                                 : RunConfig::load(opts.config, experiment, tol);
    const std::string format = !opts.format.empty() ? opts.format : config.choice("output", "format", "csv");
    const std::string out_path = !opts.out.empty() ? opts.out : config.text("output", "path", "-");
    const std::string svg_path = !opts.svg.empty() ? opts.svg : config.text("output", "svg", "");
    if (!svg_path.empty() && experiment != Experiment::Sweep)
        throw ConfigError("--svg charts sweep output; use it with the sweep subcommand");

    RunOverrides overrides;
    if (!opts.scenario.empty()) overrides.scenario = opts.scenario;
    const auto result = run(config, experiment, overrides);

    for (const auto& w : result.warnings) std::cerr << "abkit: warning: " << w << '\n';
    for (const auto& c : result.checks)
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_number(c.value)
                  << " tolerance=" << format_number(c.tolerance) << (c.message.empty() ? "" : " (" + c.message + ")")
                  << '\n';

    write_output(out_path, format == "json" ? to_json(result.report) : to_csv(result.report));
    if (!svg_path.empty()) write_output(svg_path, to_svg(result.report, config.choice("sweep", "scale", "linear") == "log"));

    if (!result.all_passed()) {
        for (const auto& c : result.checks)
            if (!c.passed) std::cerr << "abkit: check failed: " << c.name << '\n';
        return exit_numeric;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-shift experiments: magnetic and electric set-ups, visibility budgets, sweeps and checks"};
    app.require_subcommand(1);
    Options opts;

    struct Sub {
        const char* name;
        const char* help;
        Experiment experiment;
    };
    const Sub subs[] = {
        {"magnetic", "Moving-charge solenoid: phase shift, quarter contributions and visibility", Experiment::Magnetic},
        {"electric", "Capacitor plates: fixed, free or split attribution scenarios", Experiment::Electric},
        {"visibility", "Visibility budget of the solenoid pieces", Experiment::Visibility},
        {"verify", "Identity suite; exits 3 if any check fails", Experiment::Verify},
        {"sweep", "Scan one parameter of an experiment", Experiment::Sweep},
    };
    std::optional<Experiment> chosen;
    for (const auto& s : subs) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        cmd->add_option("--config", opts.config, "INI configuration file");
        cmd->add_option("--out", opts.out, "Output path ('-' for standard output)");
        cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--svg", opts.svg, "SVG chart of the sweep");
        if (s.experiment == Experiment::Electric)
            cmd->add_option("--scenario", opts.scenario, "Plate scenario")
                ->check(CLI::IsMember({"fixed", "free", "split"}));
        const Experiment e = s.experiment;
        cmd->callback([&chosen, e] { chosen = e; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        return run_command(*chosen, opts);
    } catch (const ConfigError& e) {
        std::cerr << "abkit: ";
        if (e.line() > 0) std::cerr << (opts.config.empty() ? "config" : opts.config) << ':' << e.line() << ':' << e.column() << ": ";
        std::cerr << e.what() << '\n';
        return exit_config;
    } catch (const NumericFailure& e) {
        std::cerr << "abkit: numeric failure in " << e.check() << ": " << e.what() << '\n';
        return exit_numeric;
    } catch (const OutputError& e) {
        std::cerr << "abkit: " << e.what() << '\n';
        return exit_output;
    } catch (const std::exception& e) {
        std::cerr << "abkit: numeric failure in run: " << e.what() << '\n';
        return exit_numeric;
    }
}
