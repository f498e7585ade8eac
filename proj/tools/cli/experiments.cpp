#include "cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <utility>

#include "abkit/capacitor.hpp"
#include "abkit/errors.hpp"
#include "abkit/interference.hpp"
#include "abkit/packet.hpp"
#include "abkit/parallel.hpp"
#include "abkit/propagator.hpp"
#include "abkit/samples.hpp"
#include "abkit/solenoid.hpp"

namespace abkit::cli {

namespace {

constexpr double pi = std::numbers::pi;

// Runs one named step, mapping library errors onto the CLI's categories.
template <class F>
auto step(const std::string& name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InvalidInput& e) {
        throw ConfigError(name + ": " + e.what());
    } catch (const UnsupportedConfiguration& e) {
        throw ConfigError(name + ": " + e.what());
    } catch (const Error& e) {
        throw NumericFailure(name, e.what());
    }
}

class Rows {
public:
    explicit Rows(Report& r) : report_(r) {}
    void add(std::string quantity, double value, std::string units = "", std::optional<double> err = {},
             std::optional<double> parameter = {}) {
        report_.rows.push_back({std::move(quantity), value, std::move(units), err, parameter});
    }

private:
    Report& report_;
};

unsigned model_threads(const RunConfig& c, const RunOverrides& o) {
    return o.threads != 0 ? o.threads : static_cast<unsigned>(c.count("magnetic", "threads", 0));
}

solenoid::SolenoidSpec solenoid_spec(const RunConfig& c) {
    solenoid::SolenoidSpec s;
    s.units = c.gaussian_units();
    s.a = c.number("solenoid", "a", 1.0);
    s.R = c.number("solenoid", "R", 10.0);
    s.L = c.has("solenoid", "L_over_R") ? c.number("solenoid", "L_over_R", 10.0) * s.R
                                          : c.number("solenoid", "L", 100.0);
    s.v0 = c.number("solenoid", "v0", 1.0);
    s.u = c.number("solenoid", "u", 100.0);
    s.M = c.number("solenoid", "M", 1.0);
    s.n_a = c.count("solenoid", "n_a", 64);
    s.n_L = c.count("solenoid", "n_L", 64);
    s.e = c.number("solenoid", "e", 0.0);
    if (c.has("solenoid", "Q")) {
        s.Q = c.number("solenoid", "Q", 0.0);
    } else {
        // Shell charge that produces the target phase; the phase is linear in Q.
        const double target = c.number("solenoid", "target_phase", pi);
        s.Q = 1.0;
        const double per_charge = step("solenoid", [&] { return solenoid::ab_phase_reference(s); });
        if (target != 0.0 && !(per_charge > 0.0))
            throw ConfigError("solenoid: a target phase needs a positive piece speed v0");
        s.Q = target == 0.0 ? 0.0 : target / per_charge;
    }
    step("solenoid", [&] { s.validate(); });
    return s;
}

interference::Gauge gauge_of(const RunConfig& c) {
    return c.choice("magnetic", "gauge", "lorenz") == "coulomb" ? interference::Gauge::Coulomb
                                                                : interference::Gauge::Lorenz;
}

RunResult run_magnetic(const RunConfig& c, const RunOverrides& o) {
    using namespace solenoid;
    RunResult out;
    out.report.experiment = "magnetic";
    Rows rows(out.report);
    const auto spec = solenoid_spec(c);
    const auto gauge = gauge_of(c);
    PhaseOptions opts;
    opts.mode = c.choice("magnetic", "mode", "continuum") == "discrete" ? Mode::Discrete : Mode::Continuum;
    const auto signs = c.choice("magnetic", "signs", "both");
    opts.signs = signs == "positive"   ? SignSelection::Positive
                 : signs == "negative" ? SignSelection::Negative
                                       : SignSelection::Both;
    opts.extrapolate = c.flag("magnetic", "extrapolate", true);
    opts.quad = c.quad();
    opts.threads = model_threads(c, o);

    const double reference = step("ab_phase_reference", [&] { return ab_phase_reference(spec); });
    const auto A = step("phase_A", [&] { return solenoid_phase(spec, Traverse::A, gauge, opts); });
    const auto B = step("phase_B", [&] { return solenoid_phase(spec, Traverse::B, gauge, opts); });
    for (const auto* r : {&A, &B})
        for (const auto& w : r->warnings)
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);

    const double shift = A.value - B.value;
    const double err_sum = A.error_estimate + B.error_estimate;
    const std::optional<double> shift_err = err_sum > 0.0 ? std::optional(err_sum) : std::nullopt;
    auto own_err = [](const PhaseResult& r) { return r.error_estimate > 0.0 ? std::optional(r.error_estimate) : std::nullopt; };
    rows.add("electron_count", spec.Q / spec.units.e_charge);
    rows.add("shell_charge", spec.Q, c.unit_label(Dim::Charge));
    rows.add("b_field", b_field(spec), c.system() == InputSystem::Cgs ? "G" : "nat");
    rows.add("ab_phase_reference", reference, "rad");
    rows.add("phase_A", A.value, "rad", own_err(A));
    rows.add("phase_B", B.value, "rad", own_err(B));
    rows.add("phase_shift", shift, "rad", shift_err);
    if (opts.mode == Mode::Continuum && opts.extrapolate)
        rows.add("phase_shift_extrapolated", A.extrapolated - B.extrapolated, "rad");
    if (reference != 0.0)
        rows.add("phase_ratio", shift / reference, "",
                 shift_err ? std::optional(*shift_err / std::abs(reference)) : std::nullopt);

    if (c.flag("magnetic", "budget", true) && reference > 0.0) {
        const Geometry g{spec.a, spec.R, spec.L, spec.v0, spec.u};
        BudgetOptions bo;
        bo.constraint_margin = c.number("visibility", "constraint_margin", bo.constraint_margin);
        bo.units = spec.units;
        try {
            const auto b = visibility_budget(reference, g, bo);
            rows.add("visibility", b.visibility);
            rows.add("position_exponent_sum", b.position_exponent_sum);
            rows.add("momentum_exponent_sum", b.momentum_exponent_sum);
        } catch (const UnsupportedConfiguration& e) {
            out.warnings.push_back(std::string("visibility budget skipped: ") + e.what());
        } catch (const Error& e) {
            throw NumericFailure("visibility_budget", e.what());
        }
    }
    return out;
}

RunResult run_visibility(const RunConfig& c) {
    using namespace solenoid;
    RunResult out;
    out.report.experiment = "visibility";
    Rows rows(out.report);
    const auto spec = solenoid_spec(c);
    const double target = step("ab_phase_reference", [&] { return ab_phase_reference(spec); });
    BudgetOptions bo;
    bo.constraint_margin = c.number("visibility", "constraint_margin", bo.constraint_margin);
    bo.units = spec.units;
    const auto b = step("visibility_budget",
                        [&] { return visibility_budget(target, {spec.a, spec.R, spec.L, spec.v0, spec.u}, bo); });
    const auto len = c.unit_label(Dim::Length);
    rows.add("target_phase", target, "rad");
    rows.add("electron_count", b.electron_count);
    rows.add("constraint_bound", b.constraint_bound);
    rows.add("pieces_per_ring", b.pieces_per_ring);
    rows.add("sigma", b.sigma, len);
    rows.add("rings", b.rings);
    rows.add("pieces", b.pieces);
    rows.add("electrons_per_piece", b.electrons_per_piece);
    rows.add("piece_mass", b.piece_mass, c.unit_label(Dim::Mass));
    rows.add("wavelength", b.wavelength, len);
    rows.add("wavelengths_per_packet", b.wavelengths_per_packet);
    rows.add("traverse_time", b.traverse_time, c.unit_label(Dim::Time));
    rows.add("piece_shift", b.piece_shift, len);
    rows.add("speed_change", b.speed_change, c.unit_label(Dim::Velocity));
    rows.add("position_exponent_sum", b.position_exponent_sum);
    rows.add("momentum_exponent_sum", b.momentum_exponent_sum);
    rows.add("visibility", b.visibility);
    rows.add("direct_position_exponent_sum", b.direct_position_exponent_sum);
    rows.add("direct_momentum_exponent_sum", b.direct_momentum_exponent_sum);
    rows.add("direct_visibility", b.direct_visibility);
    rows.add("axial_inhomogeneity", b.axial_inhomogeneity);
    return out;
}

capacitor::CapacitorSpec capacitor_spec(const RunConfig& c) {
    capacitor::CapacitorSpec s;
    s.units = c.rationalized_units();
    s.sigma_s = c.number("capacitor", "sigma_s", 1.0);
    s.area = c.number("capacitor", "area", 1.0);
    s.D = c.number("capacitor", "D", 1.0);
    s.M = c.number("capacitor", "M", 1e6);
    s.m = c.number("capacitor", "m", 1.0);
    s.e = c.number("capacitor", "e", 1e-3);
    s.u = c.number("capacitor", "u", 1.0);
    s.T = c.number("capacitor", "T", 1.0);
    s.v0 = c.number("capacitor", "v0", 1.0);
    s.ramp_time = c.number("capacitor", "ramp_time", 0.0);
    step("capacitor", [&] { s.validate(); });
    return s;
}

RunResult run_electric(const RunConfig& c, const RunOverrides& o) {
    using namespace capacitor;
    RunResult out;
    out.report.experiment = "electric";
    Rows rows(out.report);
    const auto spec = capacitor_spec(c);
    PlateOptions po;
    po.max_displacement_ratio = c.number("capacitor", "max_displacement_ratio", po.max_displacement_ratio);
    po.quad = c.quad();
    const auto scenario = o.scenario.value_or(c.choice("electric", "scenario", "fixed"));
    const auto len = c.unit_label(Dim::Length);
    const auto time = c.unit_label(Dim::Time);

    if (scenario == "fixed") {
        const double shift = step("fixed_plate_phase_shift", [&] { return fixed_plate_phase_shift(spec); });
        const auto led = step("plate_attributed_phase", [&] { return plate_attributed_phase(spec, po); });
        rows.add("phase_shift", shift, "rad");
        const char* names[2][2] = {{"plate_upper_above", "plate_lower_above"},
                                   {"plate_upper_below", "plate_lower_below"}};
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) rows.add(names[k][j], led.plates[k][j].contribution, "rad");
        rows.add("plate_total", led.total, "rad");
        rows.add("displacement_ratio", led.displacement_ratio);
        if (spec.ramp_time > 0.0) {
            const double ramp = ramp_correction(spec);
            rows.add("ramp_correction", ramp, "rad");
            rows.add("phase_shift_with_ramps", shift + ramp, "rad");
        }
    } else if (scenario == "free") {
        const bool exact = c.flag("electric", "exact", true);
        const auto r = step("free_plate_scenario", [&] { return free_plate_scenario(spec, exact, c.quad()); });
        rows.add("T_plus", r.T_plus, time);
        rows.add("T_minus", r.T_minus, time);
        rows.add("D_plus", r.D_plus, len);
        rows.add("D_minus", r.D_minus, len);
        rows.add("T_bar", r.T_bar, time);
        rows.add("electron_field_term", r.electron_field_term, "rad");
        rows.add("self_field_term", r.self_field_term, "rad");
        rows.add("phase_shift", r.phase_shift, "rad");
        rows.add("approx_electron_field_term", r.approx_electron_field_term, "rad");
        rows.add("approx_self_field_term", r.approx_self_field_term, "rad");
        rows.add("approx_phase_shift", r.approx_phase_shift, "rad");
        rows.add("quadrature_electron_field_term", r.quadrature_electron_field_term, "rad");
        rows.add("quadrature_self_field_term", r.quadrature_self_field_term, "rad");
        rows.add("potential_integral", r.potential_integral, "rad");
        rows.add("work_integral", r.work_integral, "rad");
        rows.add("plate_visibility", r.plate_visibility);
    } else {
        auto fractions = c.list("electric", "fractions", {0.0, 0.25, 0.5, 0.75, 1.0});
        std::sort(fractions.begin(), fractions.end());
        out.report.parameter = "electric.electron_fraction";
        for (const double f : fractions) {
            const auto sp = step("attribution_split", [&] { return attribution_split(spec, f, po); });
            rows.add("electron_share", sp.electron, "rad", {}, f);
            rows.add("upper_plate_share", sp.upper_plate, "rad", {}, f);
            rows.add("lower_plate_share", sp.lower_plate, "rad", {}, f);
            rows.add("total", sp.total, "rad", {}, f);
        }
    }
    return out;
}

// Verification suite.

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

template <class F>
CheckOutcome check(std::string name, double tolerance, F&& measure) {
    CheckOutcome c{std::move(name), 0.0, tolerance, false, {}};
    try {
        c.value = measure();
        c.passed = c.value <= tolerance;
    } catch (const std::exception& e) {
        c.value = std::nan("");
        c.message = e.what();
    }
    return c;
}

solenoid::SolenoidSpec verify_solenoid() {
    solenoid::SolenoidSpec s;
    s.L = 1000.0;
    s.Q = 1e4;
    s.units = units::UnitSystem::natural(units::System::CgsGaussian, 1000.0, 1.0, 1.0);
    return s;
}

RunResult run_verify(const RunConfig& c) {
    RunResult out;
    out.report.experiment = "verify";
    const auto quad = c.quad();
    const auto samples_n = c.count("verify", "samples", 100);
    const auto packet_n = c.count("verify", "packet_samples", 2);
    const auto seed = static_cast<std::uint64_t>(c.count("verify", "seed", 2024));

    out.checks.push_back(check("phase_identity", 1e-9, [&] {
        std::mt19937_64 rng(seed);
        const numerics::QuadOptions tight{std::min(quad.rel_tol, 1e-12), 0.0, std::max<std::size_t>(quad.max_intervals, 2000)};
        double worst = 0.0;
        for (std::size_t i = 0; i < samples_n; ++i) {
            const auto spec = samples::random_smooth_spec(rng);
            worst = std::max(worst, std::abs(packet::check_phase_identity(spec, 1.0, 2.0, tight).relative_residual));
        }
        return worst;
    }));

    const auto sol = verify_solenoid();
    out.checks.push_back(check("gauge_independence", 5e-3, [&] {
        solenoid::PhaseOptions o;
        o.quad = quad;
        o.extrapolate = false;
        auto total = [&](interference::Gauge g) {
            return solenoid::solenoid_phase(sol, solenoid::Traverse::A, g, o).value -
                   solenoid::solenoid_phase(sol, solenoid::Traverse::B, g, o).value;
        };
        return rel_diff(total(interference::Gauge::Lorenz), total(interference::Gauge::Coulomb));
    }));
    out.checks.push_back(check("coulomb_first_term_half", 1e-8, [&] {
        solenoid::PhaseOptions o;
        o.quad = quad;
        o.extrapolate = false;
        o.signs = solenoid::SignSelection::Positive;
        const double lorenz = solenoid::solenoid_phase(sol, solenoid::Traverse::A, interference::Gauge::Lorenz, o).value;
        o.part = solenoid::PotentialPart::CoulombFirst;
        const double first = solenoid::solenoid_phase(sol, solenoid::Traverse::A, interference::Gauge::Coulomb, o).value;
        return rel_diff(first, 0.5 * lorenz);
    }));
    out.checks.push_back(check("reciprocity", 1e-8, [&] {
        const auto rc = samples::rotating_rings_case();
        double worst = 0.0;
        for (auto g : {interference::Gauge::Lorenz, interference::Gauge::Coulomb}) {
            const interference::GaugeDyad dyad{g};
            const double e = interference::interaction_phase(rc.branch, dyad, rc.T, interference::Attribution::Electron, quad);
            const double n = interference::interaction_phase(rc.branch, dyad, rc.T, interference::Attribution::Sources, quad);
            worst = std::max(worst, rel_diff(e, n));
        }
        return worst;
    }));
    auto assembly = [&](auto measure) {
        double worst = 0.0;
        for (const double qn : {0.3, -0.7, 2.0}) {
            const auto s = samples::crossing_case(qn);
            for (auto g : {interference::Gauge::Lorenz, interference::Gauge::Coulomb}) {
                interference::DetectionOptions o;
                o.quad = quad;
                const auto r = interference::detection_probabilities(s.A, s.B, s.packets_A, s.packets_B,
                                                                     interference::GaugeDyad{g}, s.T, o);
                worst = std::max(worst, measure(r));
            }
        }
        return worst;
    };
    out.checks.push_back(check("assembly_order_independence", 1e-9, [&] {
        return assembly([](const interference::InterferenceResult& r) {
            return std::max(rel_diff(r.phase_from_sources, r.phase_from_electron),
                            rel_diff(r.phase_from_sources, r.phase_joint));
        });
    }));
    out.checks.push_back(check("probability_sum", 1e-12, [&] {
        return assembly([](const interference::InterferenceResult& r) { return std::abs(r.P_plus + r.P_minus - 1.0); });
    }));
    out.checks.push_back(check("attribution_invariance", 1e-12, [&] {
        capacitor::CapacitorSpec s;
        s.sigma_s = 0.8;
        s.area = 2.0;
        s.D = 1.5;
        s.M = 1e6;
        s.e = 0.3;
        s.T = 2.0;
        s.u = 5.0;
        const double shift = capacitor::fixed_plate_phase_shift(s);
        double worst = 0.0;
        for (int i = 0; i <= 10; ++i)
            worst = std::max(worst, std::abs(capacitor::attribution_split(s, 0.1 * i).total - shift) / std::abs(shift));
        return worst;
    }));
    // Packet oracle: propagated wavefunction against the closed-form packet.
    std::vector<numerics::OverlapPhase> overlaps;
    std::string oracle_error;
    try {
        std::mt19937_64 rng(seed + 1);
        for (std::size_t i = 0; i < packet_n; ++i) {
            const auto pc = samples::random_packet_case(rng);
            overlaps.push_back(numerics::packet_oracle_check(pc.spec, pc.sigma, pc.T, 400));
        }
    } catch (const std::exception& e) {
        oracle_error = e.what();
    }
    auto oracle = [&](std::string name, auto measure) {
        return check(std::move(name), 1e-3, [&] {
            if (!oracle_error.empty()) throw std::runtime_error(oracle_error);
            double worst = 0.0;
            for (const auto& ov : overlaps) worst = std::max(worst, measure(ov));
            return worst;
        });
    };
    out.checks.push_back(oracle("packet_oracle_overlap_loss", [](const auto& ov) { return 1.0 - ov.magnitude; }));
    out.checks.push_back(oracle("packet_oracle_phase", [](const auto& ov) { return std::abs(ov.phase); }));

    for (const auto& ch : out.checks) {
        const bool phase = ch.name == "packet_oracle_phase";
        out.report.rows.push_back({ch.name, ch.value, phase ? "rad" : "", ch.tolerance, {}});
    }
    return out;
}

RunResult run_sweep(const RunConfig& c, const RunOverrides& o) {
    const auto experiment = parse_experiment(c.choice("sweep", "experiment", "magnetic"));
    const auto param = c.text("sweep", "parameter", "");
    const auto dot = param.find('.');
    const auto section = param.substr(0, dot), key = param.substr(dot + 1);
    const auto quantity = c.text("sweep", "quantity",
                                 experiment == Experiment::Visibility ? "visibility" : "phase_shift");
    const auto points = sweep_points(c);

    std::vector<RunResult> results(points.size());
    RunOverrides inner = o;
    inner.threads = 1;
    parallel_for(points.size(), static_cast<unsigned>(c.count("sweep", "threads", 0)), [&](std::size_t i) {
        RunConfig point = c;
        point.set_number(section, key, points[i]);
        results[i] = run(point, experiment, inner);
    });

    RunResult out;
    out.report.experiment = "sweep";
    out.report.parameter = param;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& rows = results[i].report.rows;
        const auto it = std::find_if(rows.begin(), rows.end(), [&](const Row& r) { return r.quantity == quantity; });
        if (it == rows.end())
            throw ConfigError("sweep quantity '" + quantity + "' is not produced by the " +
                              std::string(to_string(experiment)) + " experiment");
        Row row = *it;
        row.parameter_value = points[i];
        out.report.rows.push_back(std::move(row));
        for (const auto& w : results[i].warnings)
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
    }
    std::stable_sort(out.report.rows.begin(), out.report.rows.end(),
                     [](const Row& a, const Row& b) { return *a.parameter_value < *b.parameter_value; });
    return out;
}

}  // namespace

bool RunResult::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

std::vector<double> sweep_points(const RunConfig& c) {
    const auto param = c.text("sweep", "parameter", "");
    const auto dot = param.find('.');
    const KeySpec* spec = find_key(param.substr(0, dot), param.substr(dot + 1));
    const auto* from = c.entry("sweep", "from");
    const auto* to = c.entry("sweep", "to");
    const double lo = c.parse_number(*spec, from->text, from->line, from->column);
    const double hi = c.parse_number(*spec, to->text, to->line, to->column);
    const std::size_t n = c.count("sweep", "count", 7);
    const bool log_scale = c.choice("sweep", "scale", "linear") == "log";
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n - 1);
        pts[i] = log_scale ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo);
    }
    pts.front() = lo;
    pts.back() = hi;
    return pts;
}

RunResult run(const RunConfig& config, Experiment experiment, const RunOverrides& overrides) {
    switch (experiment) {
        case Experiment::Magnetic: return run_magnetic(config, overrides);
        case Experiment::Electric: return run_electric(config, overrides);
        case Experiment::Visibility: return run_visibility(config);
        case Experiment::Verify: return run_verify(config);
        case Experiment::Sweep: return run_sweep(config, overrides);
    }
    throw ConfigError("unknown experiment");
}

}  // namespace abkit::cli
