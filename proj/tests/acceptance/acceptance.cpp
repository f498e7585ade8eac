// Acceptance gate: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "abkit/capacitor.hpp"
#include "abkit/dynamics.hpp"
#include "abkit/interference.hpp"
#include "abkit/packet.hpp"
#include "abkit/propagator.hpp"
#include "abkit/quadrature.hpp"
#include "abkit/samples.hpp"
#include "abkit/solenoid.hpp"

using namespace abkit;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Magnetic set-up at L/R = 100 with the shell charge chosen so the
// reference phase is pi.
solenoid::SolenoidSpec magnetic_spec() {
    solenoid::SolenoidSpec s;
    s.a = 1.0;
    s.R = 10.0;
    s.L = 1000.0;
    s.v0 = 1.0;
    s.u = 100.0;
    s.units = units::UnitSystem::cgs();
    s.Q = 1.0;
    s.Q = pi / solenoid::ab_phase_reference(s);
    return s;
}

solenoid::PhaseOptions sign_opts(solenoid::SignSelection sel) {
    solenoid::PhaseOptions o;
    o.signs = sel;
    return o;
}

Outcome quarter_shift() {
    const auto s = magnetic_spec();
    const double ref = solenoid::ab_phase_reference(s);
    const auto r = solenoid::solenoid_phase(s, solenoid::Traverse::A, solenoid::Gauge::Lorenz,
                                            sign_opts(solenoid::SignSelection::Positive));
    const double e1 = rel(r.value, ref / 4), e2 = rel(r.extrapolated, ref / 4);
    return {e1 <= 5e-3 && e2 <= 5e-4, fmt("phase/(ref/4) finite rel err %.3e (<=5e-3), extrapolated %.3e (<=5e-4)", e1, e2)};
}

Outcome full_shift() {
    using solenoid::SignSelection;
    const auto s = magnetic_spec();
    const double ref = solenoid::ab_phase_reference(s);
    double total = 0.0, total_x = 0.0;
    for (auto tr : {solenoid::Traverse::A, solenoid::Traverse::B})
        for (auto sel : {SignSelection::Positive, SignSelection::Negative}) {
            const auto r = solenoid::solenoid_phase(s, tr, solenoid::Gauge::Lorenz, sign_opts(sel));
            const double sgn = tr == solenoid::Traverse::A ? 1.0 : -1.0;  // Phi_A - Phi_B
            total += sgn * r.value;
            total_x += sgn * r.extrapolated;
        }
    const double e1 = rel(total, ref), e2 = rel(total_x, ref);
    return {e1 <= 5e-3 && e2 <= 5e-4,
            fmt("four quarters sum to %.6f vs %.6f: rel err %.3e (<=5e-3), extrapolated %.3e (<=5e-4)", total, ref, e1, e2)};
}

Outcome gauge_independence() {
    const auto s = magnetic_spec();
    auto total = [&](solenoid::Gauge g, solenoid::PotentialPart part) {
        solenoid::PhaseOptions o;
        o.part = part;
        o.extrapolate = false;
        return solenoid::solenoid_phase(s, solenoid::Traverse::A, g, o).value -
               solenoid::solenoid_phase(s, solenoid::Traverse::B, g, o).value;
    };
    const double lor = total(solenoid::Gauge::Lorenz, solenoid::PotentialPart::Full);
    const double cou = total(solenoid::Gauge::Coulomb, solenoid::PotentialPart::Full);
    const double first = total(solenoid::Gauge::Coulomb, solenoid::PotentialPart::CoulombFirst);
    const double e1 = rel(cou, lor), e2 = rel(first, 0.5 * lor);
    return {e1 <= 5e-3 && e2 <= 1e-8,
            fmt("Coulomb vs Lorenz total rel diff %.3e (<=5e-3); first term vs half Lorenz %.3e (<=1e-8)", e1, e2)};
}

Outcome angular_identity() {
    double worst = 0.0;
    for (double r : {0.1, 0.5, 0.9}) {
        const auto q = numerics::adaptive_quad(
            [r](double t) { return std::sin(t) * std::sin(t) / (1 + r * r - 2 * r * std::cos(t)); }, 0.0, 2 * pi);
        worst = std::max(worst, rel(q.value, pi));
    }
    return {worst <= 1e-10, fmt("max rel err over r in {0.1,0.5,0.9}: %.3e (<=1e-10)", worst)};
}

Outcome time_average() {
    const auto s = magnetic_spec();
    const auto avg = solenoid::time_averaged_phase(s, solenoid::Traverse::A);
    solenoid::PhaseOptions o = sign_opts(solenoid::SignSelection::Positive);
    o.extrapolate = false;
    const double cont = solenoid::solenoid_phase(s, solenoid::Traverse::A, solenoid::Gauge::Lorenz, o).value;
    const double budget = (s.a / s.R) * (s.a / s.R);
    const double e1 = rel(avg.finite_length, cont), e2 = rel(avg.infinite_length, avg.closed_form);
    return {e1 <= budget && e2 <= 1e-6,
            fmt("time average vs continuum rel diff %.3e (<=(a/R)^2=%.0e); closed form rel err %.3e (<=1e-6)", e1, budget,
                e2)};
}

bool within_magnitude(double v, double ref) { return std::abs(std::log10(v / ref)) <= 1.0; }

Outcome visibility_budget() {
    const auto b = solenoid::visibility_budget(pi, {1.0, 10.0, 100.0, 1.0, 100.0});
    const bool ok = b.electron_count >= 0.5e14 && b.electron_count <= 2e14 && b.pieces_per_ring == 1000.0 &&
                    b.sigma >= 3e-3 && b.sigma <= 12e-3 && within_magnitude(b.position_exponent_sum, 1e-16) &&
                    within_magnitude(b.momentum_exponent_sum, 1e-9) && b.visibility >= 1.0 - 1e-7;
    return {ok, fmt("N_e=%.3e n_a=%.0f sigma=%.3e cm pos=%.2e mom=%.2e V=1-%.2e", b.electron_count, b.pieces_per_ring,
                    b.sigma, b.position_exponent_sum, b.momentum_exponent_sum, 1.0 - b.visibility)};
}

capacitor::CapacitorSpec plate_spec() {
    capacitor::CapacitorSpec s;
    s.sigma_s = 0.8;
    s.area = 2.0;
    s.D = 1.5;
    s.M = 1e6;
    s.e = 0.3;
    s.T = 2.0;
    s.u = 5.0;
    return s;
}

Outcome fixed_plates() {
    const auto s = plate_spec();
    const double expected = -s.e * s.sigma_s * s.D * s.T;
    const double direct = capacitor::fixed_plate_phase_shift(s);
    const auto led = capacitor::plate_attributed_phase(s);
    double worst_quarter = 0.0;
    for (const auto& row : led.plates)
        for (const auto& p : row) worst_quarter = std::max(worst_quarter, rel(p.contribution, expected / 4));
    const double e1 = rel(direct, expected), e2 = rel(led.total, expected);
    return {e1 <= 1e-12 && e2 <= 1e-12 && worst_quarter <= 1e-12,
            fmt("electron route %.3e, plate route %.3e, quarters %.3e (all <=1e-12)", e1, e2, worst_quarter)};
}

Outcome attribution_invariance() {
    const auto s = plate_spec();
    const double shift = capacitor::fixed_plate_phase_shift(s);
    double worst = 0.0;
    for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) worst = std::max(worst, rel(capacitor::attribution_split(s, f).total, shift));
    return {worst <= 1e-12, fmt("max rel deviation over 5 fractions %.3e (<=1e-12)", worst)};
}

Outcome free_plates() {
    bool ok = true;
    double worst_terms = 0.0, worst_total = 0.0, worst_approx = 0.0, worst_work = 0.0;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        capacitor::CapacitorSpec s;
        s.sigma_s = 1.3;
        s.area = 2.0;
        s.M = 4.0;
        s.v0 = 0.7;
        s.e = eps * s.sigma_s * s.area;
        const auto r = capacitor::free_plate_scenario(s, true);
        const auto a = capacitor::free_plate_scenario(s, false);
        const double unit = s.sigma_s * s.e * s.v0 * r.T_bar * r.T_bar;
        const double d_terms = std::max(rel(r.electron_field_term, -unit / 3), rel(r.self_field_term, 2 * unit / 3));
        const double d_total = rel(r.phase_shift, a.phase_shift);
        const double d_approx = rel(a.phase_shift, unit / 3);
        const double d_work = rel(r.work_integral, r.potential_integral);
        ok = ok && d_terms <= 3 * eps && d_total <= 3 * eps && d_approx <= 1e-12 && d_work <= 1e-9;
        worst_terms = std::max(worst_terms, d_terms / eps);
        worst_total = std::max(worst_total, d_total / eps);
        worst_approx = std::max(worst_approx, d_approx);
        worst_work = std::max(worst_work, d_work);
    }
    return {ok, fmt("-1/3,+2/3 terms within %.2f eps; exact vs approx within %.2f eps (<=3); approx vs +1/3 %.1e; work %.1e (<=1e-9)",
                    worst_terms, worst_total, worst_approx, worst_work)};
}

Outcome packet_oracle() {
    std::mt19937_64 rng(101);
    double min_mag = 1.0, max_phase = 0.0;
    for (int i = 0; i < 5; ++i) {
        const auto pc = samples::random_packet_case(rng);
        const auto ov = numerics::packet_oracle_check(pc.spec, pc.sigma, pc.T, 400);
        min_mag = std::min(min_mag, ov.magnitude);
        max_phase = std::max(max_phase, std::abs(ov.phase));
    }
    return {min_mag >= 0.999 && max_phase <= 1e-3,
            fmt("5 specs: min |overlap| %.9f (>=0.999), max phase error %.3e rad (<=1e-3)", min_mag, max_phase)};
}

Outcome phase_identity() {
    std::mt19937_64 rng(202);
    const numerics::QuadOptions quad{1e-12, 0.0, 2000};
    double worst = 0.0, worst_weak = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto s = samples::random_smooth_spec(rng);
        worst = std::max(worst, std::abs(packet::check_phase_identity(s, 1.0, 2.0, quad).relative_residual));
        // Weak coupling: the q^2 terms fall below the tolerance on their own.
        s.q *= 1e-5;
        worst_weak = std::max(worst_weak, std::abs(packet::check_phase_identity(s, 1.0, 2.0, quad).relative_difference));
    }
    return {worst <= 1e-9 && worst_weak <= 1e-9,
            fmt("100 specs: max rel residual beyond q^2 terms %.3e; weak-coupling raw rel diff %.3e (<=1e-9)", worst,
                worst_weak)};
}

Outcome reciprocity() {
    const auto rc = samples::rotating_rings_case();
    const numerics::QuadOptions quad{};
    double worst = 0.0;
    for (auto g : {interference::Gauge::Lorenz, interference::Gauge::Coulomb}) {
        const interference::GaugeDyad d{g};
        const double e = interference::interaction_phase(rc.branch, d, rc.T, interference::Attribution::Electron, quad);
        const double n = interference::interaction_phase(rc.branch, d, rc.T, interference::Attribution::Sources, quad);
        worst = std::max(worst, rel(n, e));
    }
    const double tol = 2.0 * quad.rel_tol;
    return {worst <= tol, fmt("electron route vs source route rel diff %.3e (<=%.0e)", worst, tol)};
}

Outcome interference_sanity() {
    double worst_sum = 0.0, worst_order = 0.0;
    int produced = 0;
    for (double qn : {0.0, 0.3, -0.7, 2.0}) {
        auto s = samples::crossing_case(qn);
        if (qn == 0.0) s.packets_B[1] = s.packets_A[1];
        for (auto g : {interference::Gauge::Lorenz, interference::Gauge::Coulomb}) {
            const auto r = interference::detection_probabilities(s.A, s.B, s.packets_A, s.packets_B,
                                                                 interference::GaugeDyad{g}, s.T);
            ++produced;
            worst_sum = std::max(worst_sum, std::abs(r.P_plus + r.P_minus - 1.0));
            const double scale = std::max(std::abs(r.phase_from_sources), 1e-300);
            worst_order = std::max({worst_order, std::abs(r.phase_from_sources - r.phase_from_electron) / scale,
                                    std::abs(r.phase_from_sources - r.phase_joint) / scale});
        }
    }
    return {worst_sum <= 1e-12 && worst_order <= 1e-9,
            fmt("%d results: max |P+ + P- - 1| %.1e (<=1e-12); assembly orders rel diff %.1e (<=1e-9)", produced,
                worst_sum, worst_order)};
}

Outcome cubic_divergence() {
    // V = k x^2 / 2 with k = m = 1; shifted start X0 = x0 + delta, same speed.
    dynamics::GeneralPotentialSpec g;
    g.q = 1.0;
    g.m = 1.0;
    g.V = [](double x, double) { return 0.5 * x * x; };
    g.Vprime = [](double x, double) { return x; };
    dynamics::TrajectoryOptions o;
    o.tol = 1e-14;
    const double period = 2 * pi, x0 = 1.0, v0 = 0.3, delta = 0.1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (int i = 0; i <= 16; ++i) {
        const double t = period * 1e-4 * std::pow(100.0, i / 16.0);
        const auto ref = dynamics::integrate_general(g, x0, v0, 0.0, t, o);
        const auto exact = dynamics::integrate_general(g, x0 + delta, v0, 0.0, t, o);
        const auto approx = dynamics::approx_trajectory(g, ref, x0 + delta, v0, 0.0, t, o);
        const double lx = std::log(t), ly = std::log(std::abs(approx.position(t) - exact.position(t)));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        n += 1;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {std::abs(slope - 3.0) <= 0.1, fmt("log-log slope over t in [1e-4, 1e-2] period: %.4f (3.0 +- 0.1)", slope)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
        double runtime_target;  // seconds, 0 for none
    };
    const std::vector<Criterion> criteria{
        {"quarter shift (Lorenz)", quarter_shift, 5.0},
        {"full shift", full_shift, 0.0},
        {"gauge independence", gauge_independence, 0.0},
        {"angular identity", angular_identity, 0.0},
        {"time-averaged equivalence", time_average, 0.0},
        {"visibility budget", visibility_budget, 0.0},
        {"electric fixed plates", fixed_plates, 0.0},
        {"attribution invariance", attribution_invariance, 0.0},
        {"free plates", free_plates, 0.0},
        {"packet oracle", packet_oracle, 60.0},
        {"time-only phase identity", phase_identity, 0.0},
        {"reciprocity", reciprocity, 0.0},
        {"interference sanity", interference_sanity, 0.0},
        {"t^3 divergence", cubic_divergence, 0.0},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.runtime_target > 0.0 && secs > c.runtime_target) {
            out.pass = false;
            out.detail += fmt(" [runtime %.2fs over %.0fs target]", secs, c.runtime_target);
        }
        if (!out.pass) ++failures;
        std::printf("%s %2zu %-26s %s (%.2fs)\n", out.pass ? "PASS" : "FAIL", i + 1, c.name, out.detail.c_str(), secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
