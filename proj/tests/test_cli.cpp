#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "abkit/solenoid.hpp"
#include "cli/config.hpp"
#include "cli/emit.hpp"
#include "cli/experiments.hpp"
#include "doctest.h"

using namespace abkit;
using namespace abkit::cli;

namespace {

const Row& find_row(const Report& r, const std::string& q) {
    for (const auto& row : r.rows)
        if (row.quantity == q) return row;
    throw std::runtime_error("missing row " + q);
}

template <class F>
ConfigError config_error(F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a configuration error");
    return ConfigError("");
}

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "abkit_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& stderr_path) {
    const std::string cmd = std::string(ABKIT_CLI_PATH) + " " + args + " > /dev/null 2> " + stderr_path.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* sweep_config = R"([solenoid]
a = 1 cm
R = 10 cm
v0 = 1 cm/s
u = 100 cm/s

[magnetic]
budget = false
extrapolate = false

[sweep]
experiment = magnetic
parameter = solenoid.L_over_R
from = 10
to = 1000
count = 7
scale = log
)";

}  // namespace

TEST_CASE("config: sections, comments and unit suffixes") {
    const auto c = RunConfig::parse(R"(
# full-line comment
; another
[solenoid]
a = 0.02 m        # inline comment
R = 10 cm
v0 = 0.03 m/s
u = 100 cm/s
Q = 2e14 e
M = 1 kg
n_a = 12
)",
                                    Experiment::Magnetic);
    CHECK(c.number("solenoid", "a", 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(c.number("solenoid", "R", 0) == 10.0);
    CHECK(c.number("solenoid", "v0", 0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(c.number("solenoid", "M", 0) == doctest::Approx(1000.0).epsilon(1e-15));
    CHECK(c.number("solenoid", "Q", 0) == doctest::Approx(2e14 * units::UnitSystem::cgs().e_charge).epsilon(1e-15));
    CHECK(c.count("solenoid", "n_a", 0) == 12);
    CHECK(c.system() == InputSystem::Cgs);
    CHECK(c.quad().rel_tol == 1e-10);
}

TEST_CASE("config: mm/s is not a velocity token and is rejected") {
    const auto e = config_error([] { RunConfig::parse("[solenoid]\nv0 = 3 mm/s\n", Experiment::Magnetic); });
    CHECK(e.line() == 2);
    CHECK(e.column() == 8);
}

TEST_CASE("config: strict keys and sections with positions") {
    auto e = config_error([] { RunConfig::parse("[solenoid]\na = 1 cm\n  colour = 3\n", Experiment::Magnetic); });
    CHECK(e.line() == 3);
    CHECK(e.column() == 3);
    e = config_error([] { RunConfig::parse("[solenid]\n", Experiment::Magnetic); });
    CHECK(e.line() == 1);
    CHECK(e.column() == 2);
    e = config_error([] { RunConfig::parse("a = 1 cm\n", Experiment::Magnetic); });
    CHECK(e.line() == 1);
    e = config_error([] { RunConfig::parse("[solenoid]\na 1 cm\n", Experiment::Magnetic); });
    CHECK(e.line() == 2);
    e = config_error([] { RunConfig::parse("[solenoid]\na = 1 cm\na = 2 cm\n", Experiment::Magnetic); });
    CHECK(e.line() == 3);
    e = config_error([] { RunConfig::parse("[solenoid]\na = one cm\n", Experiment::Magnetic); });
    CHECK(e.column() == 5);
    e = config_error([] { RunConfig::parse("[magnetic]\ngauge = axial\n", Experiment::Magnetic); });
    CHECK(e.column() == 9);
    e = config_error([] { RunConfig::parse("[solenoid]\nL = 100 cm\nL_over_R = 10\n", Experiment::Magnetic); });
    CHECK(e.line() == 2);
}

TEST_CASE("config: natural units need the nat suffix and the electric run needs natural units") {
    const auto c = RunConfig::parse("[units]\nsystem = natural\nc = 1000\n[solenoid]\na = 1 nat\n", Experiment::Magnetic);
    CHECK(c.gaussian_units().c == 1000.0);
    CHECK(c.gaussian_units().hbar == 1.0);
    auto e = config_error([] { RunConfig::parse("[units]\nsystem = natural\n[solenoid]\na = 1 cm\n", Experiment::Magnetic); });
    CHECK(e.line() == 4);
    e = config_error([] { RunConfig::parse("[units]\nsystem = cgs\n", Experiment::Electric); });
    CHECK(e.line() == 2);
    e = config_error([] { RunConfig::parse("[units]\nc = 3\n", Experiment::Magnetic); });
    CHECK(e.line() == 2);
}

TEST_CASE("config: environment tolerance is the default and the file overrides it") {
    CHECK(RunConfig::parse("", Experiment::Magnetic, 1e-8).quad().rel_tol == 1e-8);
    CHECK(RunConfig::parse("[tolerance]\nquad_rel = 1e-9\n", Experiment::Magnetic, 1e-8).quad().rel_tol == 1e-9);
}

TEST_CASE("config: empty or reversed sweep ranges are rejected") {
    for (const char* range : {"from = 10\nto = 10\n", "from = 10\nto = 5\n", "from = 1\nto = 5\ncount = 1\n"}) {
        const std::string text = std::string("[sweep]\nparameter = solenoid.L_over_R\n") + range;
        config_error([&] { RunConfig::parse(text, Experiment::Sweep); });
    }
    config_error([] { RunConfig::parse("[sweep]\nparameter = solenoid.n_a\nfrom = 1\nto = 2\n", Experiment::Sweep); });
    config_error([] { RunConfig::parse("[sweep]\nparameter = solenoid.L\nfrom = 10\nto = 20\n", Experiment::Sweep); });
    const auto c = RunConfig::parse("[sweep]\nparameter = solenoid.L\nfrom = 1 m\nto = 2 m\ncount = 3\n", Experiment::Sweep);
    const auto pts = sweep_points(c);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0] == doctest::Approx(100.0));
    CHECK(pts[1] == doctest::Approx(150.0));
    CHECK(pts[2] == doctest::Approx(200.0));
}

TEST_CASE("number formatting is the shortest round trip") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-300) == "1e-300");
    CHECK(format_number(-2.5) == "-2.5");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::pow(10.0, u(rng)) * (i % 2 ? -1.0 : 1.0);
        CHECK(std::stod(format_number(v)) == v);
    }
}

TEST_CASE("CSV quotes fields and keeps the fixed header") {
    Report r;
    r.experiment = "x";
    r.rows.push_back({"a,b", 1.5, "say \"hi\"", 0.25, {}});
    r.rows.push_back({"plain", 2.0, "", {}, {}});
    CHECK(to_csv(r) == "quantity,value,units,error_estimate\r\n\"a,b\",1.5,\"say \"\"hi\"\"\",0.25\r\nplain,2,,\r\n");
}

TEST_CASE("JSON round trip reproduces the report") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1e3);
    Report r;
    r.experiment = "sweep";
    r.parameter = "solenoid.L_over_R";
    for (int i = 0; i < 50; ++i)
        r.rows.push_back({"q" + std::to_string(i), g(rng) * std::pow(10.0, i % 7 - 3), i % 3 ? "rad" : "",
                          i % 2 ? std::optional(std::abs(g(rng))) : std::nullopt, static_cast<double>(i) / 3.0});
    CHECK(report_from_json(to_json(r)) == r);
}

TEST_CASE("magnetic defaults give the reference phase and a near-perfect visibility") {
    const auto res = run(RunConfig::parse("", Experiment::Magnetic), Experiment::Magnetic);
    CHECK(find_row(res.report, "ab_phase_reference").value == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    CHECK(find_row(res.report, "visibility").value >= 1.0 - 1e-8);
    CHECK(find_row(res.report, "phase_shift_extrapolated").value == doctest::Approx(std::numbers::pi).epsilon(1e-3));
    const auto csv = to_csv(res.report);
    CHECK(csv.rfind("quantity,value,units,error_estimate\r\n", 0) == 0);
}

TEST_CASE("electric fixed scenario gives -e sigma D T and four equal quarters") {
    const auto res = run(RunConfig::parse("[capacitor]\nsigma_s = 0.8 nat\narea = 2 nat\nD = 1.5 nat\ne = 0.3 nat\nT = 2 nat\n",
                                          Experiment::Electric),
                         Experiment::Electric);
    const double shift = -0.3 * 0.8 * 1.5 * 2.0;
    CHECK(find_row(res.report, "phase_shift").value == doctest::Approx(shift).epsilon(1e-12));
    for (const char* q : {"plate_upper_above", "plate_lower_above", "plate_upper_below", "plate_lower_below"})
        CHECK(find_row(res.report, q).value == doctest::Approx(0.25 * shift).epsilon(1e-12));
}

TEST_CASE("electric split scenario keeps the total fixed") {
    RunOverrides o;
    o.scenario = "split";
    const auto res = run(RunConfig::parse("[electric]\nfractions = 1, 0, 0.37\n", Experiment::Electric), Experiment::Electric, o);
    int totals = 0;
    double last = -1.0;
    for (const auto& r : res.report.rows)
        if (r.quantity == "total") {
            CHECK(r.value == doctest::Approx(-1e-3).epsilon(1e-12));
            CHECK(*r.parameter_value > last);
            last = *r.parameter_value;
            ++totals;
        }
    CHECK(totals == 3);
}

TEST_CASE("sweep of L/R converges monotonically toward the extrapolated limit") {
    const auto cfg = RunConfig::parse(sweep_config, Experiment::Sweep);
    const auto res = run(cfg, Experiment::Sweep);
    REQUIRE(res.report.rows.size() == 7);
    // Oracle: Richardson-extrapolated infinite-length shift.
    solenoid::SolenoidSpec s;
    s.L = 1000.0 * s.R;
    s.Q = 1.0;
    s.Q = std::numbers::pi / solenoid::ab_phase_reference(s);
    const double limit = solenoid::solenoid_phase(s, solenoid::Traverse::A, solenoid::Gauge::Lorenz).extrapolated -
                         solenoid::solenoid_phase(s, solenoid::Traverse::B, solenoid::Gauge::Lorenz).extrapolated;
    CHECK(limit == doctest::Approx(std::numbers::pi).epsilon(1e-6));
    double prev_gap = INFINITY, prev_x = 0.0;
    for (const auto& r : res.report.rows) {
        CHECK(*r.parameter_value > prev_x);
        const double gap = std::abs(r.value - limit);
        CHECK(gap < prev_gap);
        prev_gap = gap;
        prev_x = *r.parameter_value;
    }
    const auto svg = to_svg(res.report, true);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
}

TEST_CASE("identical configuration gives byte-identical CSV regardless of thread count") {
    const std::string base = sweep_config;
    const auto one = run(RunConfig::parse(base + "threads = 1\n", Experiment::Sweep), Experiment::Sweep);
    const auto many = run(RunConfig::parse(base + "threads = 4\n", Experiment::Sweep), Experiment::Sweep);
    CHECK(to_csv(one.report) == to_csv(many.report));
    const auto m1 = run(RunConfig::parse("[magnetic]\nthreads = 1\nmode = discrete\n[solenoid]\nn_L = 8\nn_a = 8\n",
                                         Experiment::Magnetic),
                        Experiment::Magnetic);
    const auto m4 = run(RunConfig::parse("[magnetic]\nthreads = 3\nmode = discrete\n[solenoid]\nn_L = 8\nn_a = 8\n",
                                         Experiment::Magnetic),
                        Experiment::Magnetic);
    CHECK(to_csv(m1.report) == to_csv(m4.report));
}

TEST_CASE("unknown sweep quantity is a configuration error") {
    const std::string text = std::string(sweep_config) + "quantity = nonsense\n";
    config_error([&] { run(RunConfig::parse(text, Experiment::Sweep), Experiment::Sweep); });
}

TEST_CASE("verify suite passes with a reduced sample count") {
    const auto res = run(RunConfig::parse("[verify]\nsamples = 10\npacket_samples = 1\n", Experiment::Verify),
                         Experiment::Verify);
    CHECK(res.checks.size() == 9);
    for (const auto& c : res.checks) {
        INFO(c.name << " " << c.value << " " << c.message);
        CHECK(c.passed);
    }
    CHECK(res.all_passed());
}

TEST_CASE("command line exit codes") {
    const auto err = scratch("stderr.txt");
    const auto cfg = scratch("bad.ini");
    const auto out = scratch("out.csv");
    fs::remove(out);

    write_file(cfg, "[solenoid]\na = 1 cm\n  bogus = 2\n");
    CHECK(run_cli("magnetic --config " + cfg.string() + " --out " + out.string(), err) == 2);
    CHECK(read_file(err).find(":3:3:") != std::string::npos);
    CHECK(!fs::exists(out));

    write_file(cfg, "[sweep]\nparameter = solenoid.L_over_R\nfrom = 5\nto = 5\n");
    CHECK(run_cli("sweep --config " + cfg.string() + " --out " + out.string(), err) == 2);
    CHECK(!fs::exists(out));

    write_file(cfg, "[units]\nsystem = natural\n[capacitor]\nM = 1 nat\n");
    CHECK(run_cli("electric --config " + cfg.string(), err) == 3);
    CHECK(read_file(err).find("plate_attributed_phase") != std::string::npos);

    CHECK(run_cli("magnetic --out /nonexistent_dir_abkit/x.csv", err) == 4);

    CHECK(run_cli("magnetic --format json --out " + out.string(), err) == 0);
    const auto json = report_from_json(read_file(out));
    CHECK(json.experiment == "magnetic");
    CHECK(run_cli("magnetic --format xml", err) == 2);
    CHECK(run_cli("magnetic --svg " + scratch("x.svg").string(), err) == 2);
    CHECK(run_cli("", err) == 2);
}
