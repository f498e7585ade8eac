#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abkit/interference.hpp"
#include "abkit/quadrature.hpp"
#include "abkit/units.hpp"
#include "abkit/vec3.hpp"

// Magnetic experiment: an electron splits at (0, -R, 0), circles a solenoid
// of radius a and length L along either half of a circle of radius R, and
// recombines at (0, R, 0) after T = pi R / u. The solenoid is two
// superimposed cylindrical shells of charge +Q and -Q made of rings of
// pieces moving at speed v0 in opposite senses.
namespace abkit::solenoid {

using interference::Gauge;

struct SolenoidSpec {
    double a = 1.0;   // ring radius
    double R = 10.0;  // electron orbit radius
    double L = 100.0;
    double v0 = 1.0;  // piece speed
    double u = 100.0;  // electron speed
    double Q = 0.0;   // charge magnitude per shell
    double M = 1.0;   // mass per shell
    std::size_t n_a = 64;  // pieces per ring
    std::size_t n_L = 64;  // rings
    double e = 0.0;   // electron charge; 0 means units.e_charge
    units::UnitSystem units = units::UnitSystem::cgs();

    double traverse_time() const { return 3.141592653589793 * R / u; }
    double electron_charge() const { return e != 0.0 ? e : units.e_charge; }
    double piece_charge() const { return Q / static_cast<double>(n_a * n_L); }
    double piece_mass() const { return M / static_cast<double>(n_a * n_L); }
    void validate() const;
};

// Counter-clockwise (A) or clockwise (B) half circle.
enum class Traverse { A, B };

struct PieceState {
    double phi0 = 0.0;
    double z = 0.0;
    int charge_sign = 1;  // +1 moves counter-clockwise, -1 clockwise
    double q = 0.0;       // charge magnitude
    double m = 1.0;
};

// Which part of the electron's vector potential acts on the pieces.
enum class PotentialPart { Full, CoulombFirst, CoulombSecond };

enum class SignSelection { Positive, Negative, Both };

enum class Mode { Continuum, Discrete };

// B0 = 4 v0 Q / (c a L).
double b_field(const SolenoidSpec& spec);
// e pi a^2 B0 / (hbar c).
double ab_phase_reference(const SolenoidSpec& spec);
// Same phase written through the number of elementary charges per shell,
// 4 pi N_e (e^2 / hbar c) (v0 / c) (a / L).
double ab_phase_from_count(double electron_count, double a, double L, double v0, const units::UnitSystem& units);

double electron_angle(Traverse traverse, double t, const SolenoidSpec& spec);
Vec3 electron_position(Traverse traverse, double t, const SolenoidSpec& spec);
Vec3 electron_velocity(Traverse traverse, double t, const SolenoidSpec& spec);

// Vector potential of the electron at a point. Throws SingularityError at
// the electron's position.
Vec3 electron_vector_potential(const Vec3& point, Traverse traverse, double t, const SolenoidSpec& spec,
                               Gauge gauge, PotentialPart part = PotentialPart::Full);
// Its time derivative at a fixed point.
Vec3 electron_vector_potential_rate(const Vec3& point, Traverse traverse, double t, const SolenoidSpec& spec,
                                    Gauge gauge);

Vec3 piece_position(const PieceState& piece, double t, const SolenoidSpec& spec);
Vec3 piece_velocity(const PieceState& piece, double t, const SolenoidSpec& spec);

struct PieceOptions {
    PotentialPart part = PotentialPart::Full;
    // Hold the piece at its initial site while keeping its velocity.
    bool fixed_site = false;
    numerics::QuadOptions quad{};
};

// Phase (radians) of one piece moving in the electron's vector potential.
double piece_phase(const PieceState& piece, Traverse traverse, const SolenoidSpec& spec, Gauge gauge,
                   const PieceOptions& opts = {});

// Pieces of one sign on the midpoint lattice phi0 = 2 pi (i + 1/2) / n_a,
// z = -L/2 + (j + 1/2) L / n_L.
std::vector<PieceState> lattice(const SolenoidSpec& spec, int charge_sign);

struct PhaseOptions {
    Mode mode = Mode::Continuum;
    SignSelection signs = SignSelection::Both;
    PotentialPart part = PotentialPart::Full;
    bool fixed_site = false;  // discrete mode only
    // Continuum only: also extrapolate to infinite L at fixed Q / L.
    bool extrapolate = true;
    numerics::QuadOptions quad{};
    unsigned threads = 0;  // 0: hardware concurrency
};

struct PhaseResult {
    double value = 0.0;          // at the configured length
    double extrapolated = 0.0;   // L -> infinity (continuum) or value
    double error_estimate = 0.0;
    std::vector<std::string> warnings;
};

// Phase the solenoid pieces acquire from one electron traverse.
PhaseResult solenoid_phase(const SolenoidSpec& spec, Traverse traverse, Gauge gauge, const PhaseOptions& opts = {});

// Phase of the electron moving in the pieces' vector potential, computed
// by a time quadrature of the summed field (discrete) or from the static
// potential of the current sheet (continuum).
double electron_side_phase(const SolenoidSpec& spec, Traverse traverse, Gauge gauge, const PhaseOptions& opts = {});

struct TimeAverageResult {
    double finite_length = 0.0;    // z over [-L/2, L/2]
    double infinite_length = 0.0;  // z over the whole line
    double closed_form = 0.0;      // +-Q e v0 a pi / (L c^2 hbar)
};

// Phase of one shell from the time-averaged, first order in a, vector
// potential felt at each site.
TimeAverageResult time_averaged_phase(const SolenoidSpec& spec, Traverse traverse,
                                      const numerics::QuadOptions& quad = {});

// Phase from the displacement of each piece against its accumulated
// impulse; the electron starts from rest, so the potential switches on at
// t = 0 with a sudden impulse. Pieces are held at their sites.
double impulse_phase_view(const SolenoidSpec& spec, Traverse traverse, Gauge gauge, const PhaseOptions& opts = {});

struct Geometry {
    double a = 1.0;
    double R = 10.0;
    double L = 100.0;
    double v0 = 1.0;
    double u = 100.0;
};

struct BudgetOptions {
    // n_a is the largest power of ten with n_a^3 <= margin * bound.
    double constraint_margin = 1e-3;
    units::UnitSystem units = units::UnitSystem::cgs();
};

struct BudgetReport {
    double electron_count = 0.0;     // N_e per shell
    double constraint_bound = 0.0;   // N_e (m_e v0 a / hbar)(2 pi a / L)
    double pieces_per_ring = 0.0;    // n_a
    double sigma = 0.0;              // 2 pi a / n_a
    double rings = 0.0;              // n_L = L / sigma, rounded
    double pieces = 0.0;             // n_p = n_a n_L per shell
    double electrons_per_piece = 0.0;
    double piece_mass = 0.0;
    double wavelength = 0.0;         // h / (m v0)
    double wavelengths_per_packet = 0.0;
    double traverse_time = 0.0;
    double piece_shift = 0.0;        // total shift target lambda / 2 pi, shared by n_p
    double speed_change = 0.0;
    double position_exponent_sum = 0.0;
    double momentum_exponent_sum = 0.0;
    double visibility = 1.0;
    // The same exponents from packet overlaps of every piece in both shells.
    double direct_position_exponent_sum = 0.0;
    double direct_momentum_exponent_sum = 0.0;
    double direct_visibility = 1.0;
    // L int f^2 / (int f)^2 for the per-ring share f(z) of the phase: the
    // factor by which unequal sharing along the axis raises the exponents.
    double axial_inhomogeneity = 1.0;
};

// Sizes a solenoid that produces target_phase and estimates the loss of
// visibility from the pieces' recoil.
BudgetReport visibility_budget(double target_phase, const Geometry& geometry, const BudgetOptions& opts = {});

}  // namespace abkit::solenoid
