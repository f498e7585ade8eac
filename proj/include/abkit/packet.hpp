#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "abkit/dynamics.hpp"
#include "abkit/quadrature.hpp"
#include "abkit/units.hpp"

// All packet quantities use hbar = 1: phases are actions.
namespace abkit::packet {

// Decomposed phase theta(x) = p_final (x - x_final) + kinetic + potential.
struct PhaseLedger {
    double p_final = 0.0;
    double x_final = 0.0;
    double kinetic = 0.0;    // int p_cl^2 / 2m dt, or the time-only form below
    double potential = 0.0;  // -q int V dt
    // Time-only form: kinetic = legacy_kinetic + legacy_moment.
    double legacy_kinetic = 0.0;  // p_cl(T)^2 T / 2m
    double legacy_moment = 0.0;   // q v0 W(T)
    // Neglected quantum-potential phase, T / (8 m sigma^2).
    double quantum_potential_bound = 0.0;
    // Dropped q^2 A^2 / (2 m c^2) integral, kept for inspection only.
    double dropped_quadratic = 0.0;

    double total_at(double x) const noexcept { return p_final * (x - x_final) + kinetic + potential; }
};

class GaussianPacket {
public:
    GaussianPacket(double sigma, double x_center, double p_mean, PhaseLedger ledger);

    double sigma() const noexcept { return sigma_; }
    double x_center() const noexcept { return x_center_; }
    double p_mean() const noexcept { return p_mean_; }
    const PhaseLedger& ledger() const noexcept { return ledger_; }
    bool normalized() const noexcept { return true; }

    double phase(double x) const noexcept { return ledger_.total_at(x); }
    double density(double x) const noexcept;
    std::complex<double> amplitude(double x) const;

private:
    double sigma_;
    double x_center_;
    double p_mean_;
    PhaseLedger ledger_;
};

struct PacketOptions {
    double tol_wavelength = units::default_tol_wavelength;
    double tol_spread = units::default_tol_spread;
    numerics::QuadOptions quad{};
};

// Packet after time T under a time-only force (closed-form classical motion).
// Throws RegimeError if the packet is not narrow and slowly spreading.
GaussianPacket evolve_packet_timedep(const dynamics::TimeDepForceSpec& spec, double sigma, double T,
                                     const PacketOptions& opts = {});

// Same ledger without the regime test; used where the caller has its own
// validity condition (massive plates starting at rest).
PhaseLedger timedep_ledger(const dynamics::TimeDepForceSpec& spec, double sigma, double T,
                           const numerics::QuadOptions& quad = {});

// Phase p_cl(T)(x - x_cl(T)) + int p_cl^2/2m - q int V(x_cl(t), t) dt.
double phase_general(const dynamics::ClassicalTrajectory& traj, const dynamics::GeneralPotentialSpec& spec,
                     double x, double T, const numerics::QuadOptions& quad = {});

GaussianPacket packet_general(const dynamics::ClassicalTrajectory& traj,
                              const dynamics::GeneralPotentialSpec& spec, double sigma, double T,
                              const numerics::QuadOptions& quad = {});

struct IdentityReport {
    double lhs = 0.0;  // time-only phase
    double rhs = 0.0;  // general phase on the same motion
    double difference = 0.0;
    double relative_difference = 0.0;
    // Exact value of rhs - lhs from the q^2 terms both forms leave out.
    double predicted_quadratic = 0.0;
    double residual = 0.0;  // difference - predicted_quadratic
    double relative_residual = 0.0;
    // Term-wise pieces.
    double kinetic_integral = 0.0;    // int p_cl^2 / 2m
    double kinetic_rearranged = 0.0;  // p_cl(T)^2 T / 2m + q v0 W(T) + q^2 terms
};

// Compares the time-only phase with the general three-term phase for a
// time-only force, at position x (default x_cl(T)).
IdentityReport check_phase_identity(const dynamics::TimeDepForceSpec& spec, double sigma, double T,
                                const numerics::QuadOptions& quad = {}, std::optional<double> x = {});

// Exact solution of the time-only problem without neglecting spreading or
// q^2 terms, normalized, starting from a Gaussian of width sigma at x0 with
// canonical momentum p0.
struct ExactTimeDep {
    double beta_r = 0.0;
    double beta_i = 0.0;
    double gamma = 0.0;
};

ExactTimeDep exact_timedep_parameters(const dynamics::TimeDepForceSpec& spec, double sigma, double t,
                                      const numerics::QuadOptions& quad = {});

std::vector<std::complex<double>> exact_timedep_wavefunction(const dynamics::TimeDepForceSpec& spec,
                                                             double sigma, double t,
                                                             std::span<const double> xs,
                                                             const numerics::QuadOptions& quad = {});

}  // namespace abkit::packet
