#include "abkit/capacitor.hpp"

#include <cmath>
#include <string>

#include "abkit/errors.hpp"

namespace abkit::capacitor {

using dynamics::TimeDepForceSpec;
using numerics::adaptive_quad;
using numerics::QuadOptions;

void CapacitorSpec::validate() const {
    units.validate();
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!positive(sigma_s) || !positive(area) || !positive(D) || !positive(M) || !positive(m) || !positive(u) ||
        !positive(T))
        throw InvalidInput("capacitor: sigma_s, area, D, M, m, u and T must be positive");
    if (!std::isfinite(e)) throw InvalidInput("capacitor: electron charge must be finite");
    if (!(v0 >= 0.0) || !std::isfinite(v0)) throw InvalidInput("capacitor: v0 must be non-negative");
    if (!(ramp_time >= 0.0) || !std::isfinite(ramp_time)) throw InvalidInput("capacitor: ramp_time must be non-negative");
}

double fixed_plate_phase_shift(const CapacitorSpec& spec) {
    spec.validate();
    // Branch energies are +-e sigma_s D / 2; each phase is minus energy times T.
    const double energy_above = 0.5 * spec.e * spec.sigma_s * spec.D;
    return -2.0 * energy_above * spec.T / spec.units.hbar;
}

double ramp_correction(const CapacitorSpec& spec) {
    spec.validate();
    // Two ramps, each at mean separation D / 2.
    return -spec.e * spec.sigma_s * (0.5 * spec.D) * (2.0 * spec.ramp_time) / spec.units.hbar;
}

namespace {

double displacement_ratio(const CapacitorSpec& s) {
    const double accel = s.sigma_s * (s.sigma_s * s.area + std::abs(s.e)) / (2.0 * s.M);
    return 0.5 * accel * s.T * s.T / s.D;
}

void check_massive(const CapacitorSpec& s, const PlateOptions& opts) {
    const double r = displacement_ratio(s);
    if (!(r <= opts.max_displacement_ratio))
        throw RegimeError("plates travel " + std::to_string(r) + " of their separation during T", "displacement_ratio",
                          r);
}

// Plate starting at rest at z0 in the energy slope * z + offset.
TimeDepForceSpec plate(const CapacitorSpec& s, double z0, double slope, double offset) {
    TimeDepForceSpec p;
    p.q = 1.0;
    p.m = s.M;
    p.x0 = z0;
    p.v0 = 0.0;
    if (slope != 0.0) p.Vprime = [slope](double) { return slope; };
    if (offset != 0.0) p.g = [offset](double) { return offset; };
    return p;
}

double traverse_sign(int k) { return k == 0 ? 1.0 : -1.0; }

}  // namespace

PlateLedger plate_attributed_phase(const CapacitorSpec& spec, const PlateOptions& opts) {
    spec.validate();
    check_massive(spec, opts);
    PlateLedger out;
    out.displacement_ratio = displacement_ratio(spec);
    const double half_force = 0.5 * spec.e * spec.sigma_s;
    for (int k = 0; k < 2; ++k) {
        const double s = traverse_sign(k);
        const TimeDepForceSpec upper = plate(spec, 0.5 * spec.D, s * half_force, 0.0);
        const TimeDepForceSpec lower = plate(spec, -0.5 * spec.D, -s * half_force, 0.0);
        int j = 0;
        for (const auto* p : {&upper, &lower}) {
            auto& c = out.plates[k][j++];
            c.ledger = packet::timedep_ledger(*p, spec.D, spec.T, opts.quad);
            // Below-traverse phases enter the shift with a minus sign.
            c.contribution = s * c.ledger.potential / spec.units.hbar;
            out.total += c.contribution;
        }
    }
    return out;
}

SplitLedger attribution_split(const CapacitorSpec& spec, double f, const PlateOptions& opts) {
    spec.validate();
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidInput("electron fraction must lie in [0, 1]");
    check_massive(spec, opts);
    const double half_force = 0.5 * spec.e * spec.sigma_s;
    const double shifted = 0.5 * f * spec.D;
    SplitLedger out;
    out.electron_fraction = f;
    for (int k = 0; k < 2; ++k) {
        const double s = traverse_sign(k);
        // Electron: constant potential +- f sigma_s D / 2.
        TimeDepForceSpec el;
        el.q = spec.e;
        el.m = spec.m;
        el.v0 = spec.u;
        const double level = s * f * 0.5 * spec.sigma_s * spec.D;
        if (level != 0.0) el.g = [level](double) { return level; };
        // Plates: +- e sigma_s (Z_U - f D/2) / 2 and -+ e sigma_s (Z_L + f D/2) / 2.
        const auto upper = plate(spec, 0.5 * spec.D, s * half_force, -s * half_force * shifted);
        const auto lower = plate(spec, -0.5 * spec.D, -s * half_force, -s * half_force * shifted);
        const double hbar = spec.units.hbar;
        out.electron += s * packet::timedep_ledger(el, spec.D, spec.T, opts.quad).potential / hbar;
        out.upper_plate += s * packet::timedep_ledger(upper, spec.D, spec.T, opts.quad).potential / hbar;
        out.lower_plate += s * packet::timedep_ledger(lower, spec.D, spec.T, opts.quad).potential / hbar;
    }
    out.total = out.electron + out.upper_plate + out.lower_plate;
    return out;
}

ScenarioResult free_plate_scenario(const CapacitorSpec& spec, bool exact_mode, const QuadOptions& quad) {
    spec.validate();
    if (!(spec.v0 > 0.0)) throw InvalidInput("free plates need a launch speed v0 > 0");
    const double sA = spec.sigma_s * spec.area;
    if (!(std::abs(spec.e) < sA))
        throw InvalidInput("electron charge must be below sigma_s A: the plates would not return");
    const double sig = spec.sigma_s, e = spec.e, v0 = spec.v0, M = spec.M, hbar = spec.units.hbar;
    const double k_plus = sig * (sA + e), k_minus = sig * (sA - e);

    ScenarioResult r;
    r.T_plus = 4.0 * M * v0 / k_plus;
    r.T_minus = 4.0 * M * v0 / k_minus;
    r.D_plus = 0.25 * v0 * r.T_plus;
    r.D_minus = 0.25 * v0 * r.T_minus;
    r.T_bar = 4.0 * M * v0 / (sig * sA);

    const double Tp2 = r.T_plus * r.T_plus, Tm2 = r.T_minus * r.T_minus;
    // T_-^2 - T_+^2 without cancellation.
    const double dT = 4.0 * M * v0 * 2.0 * sig * e / (k_plus * k_minus);
    r.electron_field_term = -sig * e * v0 * (Tm2 + Tp2) / 6.0 / hbar;
    r.self_field_term = sig * sA * v0 * dT * (r.T_minus + r.T_plus) / 6.0 / hbar;
    const double bar = sig * e * v0 * r.T_bar * r.T_bar / hbar;
    r.approx_electron_field_term = -bar / 3.0;
    r.approx_self_field_term = 2.0 * bar / 3.0;
    r.approx_phase_shift = bar / 3.0;
    r.phase_shift = exact_mode ? r.electron_field_term + r.self_field_term : r.approx_phase_shift;

    // z_U = -z_L = v0 t - k t^2 / 4M.
    auto height = [&](double k) { return [=](double t) { return v0 * t - k * t * t / (4.0 * M); }; };
    const auto z_plus = height(k_plus), z_minus = height(k_minus);
    const double I_plus = adaptive_quad(z_plus, 0.0, r.T_plus, quad).value;
    const double I_minus = adaptive_quad(z_minus, 0.0, r.T_minus, quad).value;
    // Separation z_U - z_L = 2 z_U.
    r.quadrature_electron_field_term = -sig * e * (I_plus + I_minus) / hbar;
    r.quadrature_self_field_term = sig * sA * (I_minus - I_plus) / hbar;

    // Upper plate in the electron's field, electron above: V = e sigma_s z / 2.
    const double F = -0.5 * e * sig;
    r.potential_integral = -adaptive_quad([&](double t) { return -F * z_plus(t); }, 0.0, r.T_plus, quad).value / hbar;
    auto speed = [&](double t) { return v0 - k_plus * t / (2.0 * M); };
    r.work_integral = adaptive_quad(
                          [&](double t) {
                              if (t == 0.0) return 0.0;
                              return adaptive_quad([&](double tp) { return speed(tp) * F; }, 0.0, t, quad).value;
                          },
                          0.0, r.T_plus, quad)
                          .value /
                      hbar;
    return r;
}

}  // namespace abkit::capacitor
