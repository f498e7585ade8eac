#include "abkit/packet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "abkit/errors.hpp"

namespace abkit::packet {

using dynamics::ClassicalTrajectory;
using dynamics::GeneralPotentialSpec;
using dynamics::TimeDepForceSpec;
using numerics::adaptive_quad;
using numerics::QuadOptions;

GaussianPacket::GaussianPacket(double sigma, double x_center, double p_mean, PhaseLedger ledger)
    : sigma_(sigma), x_center_(x_center), p_mean_(p_mean), ledger_(ledger) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("packet width must be positive");
}

double GaussianPacket::density(double x) const noexcept {
    const double d = x - x_center_;
    return std::exp(-d * d / (2.0 * sigma_ * sigma_)) / (std::sqrt(2.0 * std::numbers::pi) * sigma_);
}

std::complex<double> GaussianPacket::amplitude(double x) const {
    return std::polar(std::sqrt(density(x)), phase(x));
}

PhaseLedger timedep_ledger(const TimeDepForceSpec& spec, double sigma, double T, const QuadOptions& quad) {
    spec.validate();
    if (!(T >= 0.0)) throw InvalidInput("evolution time must be non-negative");
    const auto pt = dynamics::solve_time_dep(spec, T, quad);
    const auto I = dynamics::time_dep_integrals(spec, T, quad);

    PhaseLedger L;
    L.p_final = pt.p;
    L.x_final = pt.x;
    L.legacy_kinetic = pt.p * pt.p * T / (2.0 * spec.m);
    L.legacy_moment = spec.q * spec.v0 * I.moment;
    L.kinetic = L.legacy_kinetic + L.legacy_moment;
    if (T > 0.0 && spec.q != 0.0) {
        L.potential =
            -spec.q *
            adaptive_quad([&](double t) { return spec.potential(spec.x0 + spec.v0 * t, t); }, 0.0, T, quad).value;
        if (spec.A) {
            const double a2 = adaptive_quad([&](double t) { return spec.A(t) * spec.A(t); }, 0.0, T, quad).value;
            L.dropped_quadratic = spec.q * spec.q * a2 / (2.0 * spec.m * spec.c * spec.c);
        }
    }
    L.quantum_potential_bound = T / (8.0 * spec.m * sigma * sigma);
    return L;
}

GaussianPacket evolve_packet_timedep(const TimeDepForceSpec& spec, double sigma, double T,
                                     const PacketOptions& opts) {
    spec.validate();
    if (!(sigma > 0.0) || !(T > 0.0)) throw InvalidInput("sigma and T must be positive");
    if (spec.v0 == 0.0)
        throw RegimeError("packet at rest has no defined wavelength", "wavelength_ratio",
                          std::numeric_limits<double>::infinity());
    const auto report = units::check_regime({sigma, spec.m, std::abs(spec.v0), T}, units::UnitSystem::natural(),
                                            opts.tol_wavelength, opts.tol_spread);
    if (!report.wavelength_ok)
        throw RegimeError("wavelength_ratio " + std::to_string(report.wavelength_ratio) + " not below tolerance",
                          "wavelength_ratio", report.wavelength_ratio);
    if (!report.spreading_ok)
        throw RegimeError("spreading_ratio " + std::to_string(report.spreading_ratio) + " not below tolerance",
                          "spreading_ratio", report.spreading_ratio);
    const auto L = timedep_ledger(spec, sigma, T, opts.quad);
    return GaussianPacket(sigma, L.x_final, L.p_final, L);
}

namespace {

// Integrates f over [t0, t1] one trajectory segment at a time.
double integrate_along(const ClassicalTrajectory& traj, const std::function<double(double)>& f, double t0,
                       double t1, const QuadOptions& quad) {
    std::vector<double> cuts{t0};
    for (double t : traj.times())
        if (t > t0 && t < t1) cuts.push_back(t);
    cuts.push_back(t1);

    // Scale the absolute tolerance from a coarse pass so near-zero segments
    // do not chase relative accuracy.
    double magnitude = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        magnitude += std::abs(numerics::kronrod15(f, cuts[i], cuts[i + 1]).value);
    QuadOptions seg = quad;
    seg.abs_tol = std::max(quad.abs_tol, quad.rel_tol * magnitude / static_cast<double>(cuts.size()));

    std::vector<double> parts;
    parts.reserve(cuts.size());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) parts.push_back(adaptive_quad(f, cuts[i], cuts[i + 1], seg).value);
    return numerics::pairwise_sum(parts);
}

struct GeneralTerms {
    double kinetic;
    double potential;
};

GeneralTerms general_terms(const ClassicalTrajectory& traj, const GeneralPotentialSpec& spec, double T,
                           const QuadOptions& quad) {
    const double t0 = traj.t_begin();
    if (!traj.spans(t0, T) || T < t0) throw InvalidInput("trajectory does not span [t0, T]");
    if (T == t0) return {0.0, 0.0};
    const double kinetic = integrate_along(
        traj,
        [&](double t) {
            const double p = traj.momentum(t);
            return p * p / (2.0 * spec.m);
        },
        t0, T, quad);
    double potential = 0.0;
    if (spec.q != 0.0 && spec.V)
        potential = -spec.q * integrate_along(traj, [&](double t) { return spec.V(traj.position(t), t); }, t0, T, quad);
    return {kinetic, potential};
}

}  // namespace

double phase_general(const ClassicalTrajectory& traj, const GeneralPotentialSpec& spec, double x, double T,
                     const QuadOptions& quad) {
    spec.validate();
    const auto terms = general_terms(traj, spec, T, quad);
    return traj.momentum(T) * (x - traj.position(T)) + terms.kinetic + terms.potential;
}

GaussianPacket packet_general(const ClassicalTrajectory& traj, const GeneralPotentialSpec& spec, double sigma,
                              double T, const QuadOptions& quad) {
    spec.validate();
    const auto terms = general_terms(traj, spec, T, quad);
    PhaseLedger L;
    L.p_final = traj.momentum(T);
    L.x_final = traj.position(T);
    L.kinetic = terms.kinetic;
    L.potential = terms.potential;
    L.quantum_potential_bound = (T - traj.t_begin()) / (8.0 * spec.m * sigma * sigma);
    if (spec.q != 0.0 && spec.A && T > traj.t_begin()) {
        const double a2 = integrate_along(
            traj,
            [&](double t) {
                const double a = traj.vector_potential(t);
                return a * a;
            },
            traj.t_begin(), T, quad);
        L.dropped_quadratic = spec.q * spec.q * a2 / (2.0 * spec.m * spec.c * spec.c);
    }
    return GaussianPacket(sigma, L.x_final, L.p_final, L);
}

IdentityReport check_phase_identity(const TimeDepForceSpec& spec, double sigma, double T, const QuadOptions& quad,
                                std::optional<double> x) {
    spec.validate();
    if (!(T > 0.0)) throw InvalidInput("check_phase_identity: T must be positive");
    const auto L = timedep_ledger(spec, sigma, T, quad);
    const double at = x.value_or(L.x_final);
    const double q = spec.q, m = spec.m, c = spec.c;
    const double p0 = spec.p0();
    const double A0 = spec.vector_potential(0.0);
    const auto IT = dynamics::time_dep_integrals(spec, T, quad);

    IdentityReport r;
    r.lhs = L.total_at(at);

    // General form on the same closed-form motion.
    const auto U = [&](double t) { return dynamics::time_dep_integrals(spec, t, quad).impulse; };
    r.kinetic_integral = adaptive_quad(
                             [&](double t) {
                                 const double p = p0 - q * U(t);
                                 return p * p / (2.0 * m);
                             },
                             0.0, T, quad)
                             .value;
    double potential = 0.0;
    double shift_term = 0.0;
    double u2 = 0.0;
    if (q != 0.0) {
        potential = -q * adaptive_quad(
                             [&](double t) {
                                 return spec.potential(dynamics::solve_time_dep(spec, t, quad).x, t);
                             },
                             0.0, T, quad)
                             .value;
        shift_term = adaptive_quad(
                         [&](double t) {
                             const auto I = dynamics::time_dep_integrals(spec, t, quad);
                             return ((I.area - A0 * t) / c + t * I.impulse - I.moment) * spec.gradient(t);
                         },
                         0.0, T, quad)
                         .value;
        u2 = adaptive_quad(
                 [&](double t) {
                     const double u = U(t);
                     return u * u;
                 },
                 0.0, T, quad)
                 .value;
    }
    r.rhs = L.p_final * (at - L.x_final) + r.kinetic_integral + potential;

    const double kinetic_q2 = q * q * A0 * IT.moment / (m * c) + q * q * (u2 - T * IT.impulse * IT.impulse) / (2.0 * m);
    r.kinetic_rearranged = L.legacy_kinetic + L.legacy_moment + kinetic_q2;
    r.predicted_quadratic = kinetic_q2 + q * q / m * shift_term;

    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.difference = r.rhs - r.lhs;
    r.residual = r.difference - r.predicted_quadratic;
    r.relative_difference = scale > 0.0 ? std::abs(r.difference) / scale : 0.0;
    r.relative_residual = scale > 0.0 ? std::abs(r.residual) / scale : 0.0;
    return r;
}

ExactTimeDep exact_timedep_parameters(const TimeDepForceSpec& spec, double sigma, double t, const QuadOptions& quad) {
    spec.validate();
    const double q = spec.q, m = spec.m, c = spec.c;
    const auto beta_i = [&](double s) {
        const auto I = dynamics::time_dep_integrals(spec, s, quad);
        return -spec.x0 + q / m * (I.area / c - I.moment);
    };
    const auto I = dynamics::time_dep_integrals(spec, t, quad);
    ExactTimeDep out;
    out.beta_r = 2.0 * sigma * sigma * (spec.p0() - q * I.impulse);
    out.beta_i = beta_i(t);
    if (t > 0.0 && q != 0.0) {
        out.gamma = -adaptive_quad(
                         [&](double s) {
                             const double a = spec.vector_potential(s);
                             return q * q * a * a / (2.0 * m * c * c) + q * spec.offset(s) -
                                    q * spec.gradient(s) * beta_i(s);
                         },
                         0.0, t, quad)
                         .value;
    }
    return out;
}

std::vector<std::complex<double>> exact_timedep_wavefunction(const TimeDepForceSpec& spec, double sigma, double t,
                                                             std::span<const double> xs, const QuadOptions& quad) {
    using cd = std::complex<double>;
    const auto par = exact_timedep_parameters(spec, sigma, t, quad);
    const cd a(sigma * sigma, t / (2.0 * spec.m));
    const cd beta(par.beta_r, par.beta_i);
    const cd prefactor = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) * std::sqrt(sigma * sigma / a);
    const double offset = par.beta_r * par.beta_r / (4.0 * sigma * sigma);
    std::vector<cd> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const cd w = cd(0.0, xs[i]) + beta;
        out[i] = prefactor * std::exp(w * w / (4.0 * a) + cd(-offset, par.gamma));
    }
    return out;
}

}  // namespace abkit::packet
