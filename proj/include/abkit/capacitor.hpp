#pragma once

#include <array>

#include "abkit/packet.hpp"
#include "abkit/quadrature.hpp"
#include "abkit/units.hpp"

// Electric experiment in rationalized units (the field between the plates
// equals the surface charge density). The electron passes above (+) or
// below (-) two plates of charge density +-sigma_s and area A while they sit
// a distance D apart for a time T. With plate coordinates z_U, z_L the
// interaction energy is (sigma_s^2 A +- e sigma_s)(z_U - z_L) / 2.
namespace abkit::capacitor {

struct CapacitorSpec {
    double sigma_s = 1.0;  // surface charge density
    double area = 1.0;
    double D = 1.0;        // plate separation
    double M = 1.0;        // plate mass
    double m = 1.0;        // electron mass
    double e = 1.0;        // electron charge
    double u = 1.0;        // electron speed
    double T = 1.0;        // traverse duration
    double v0 = 0.0;       // plate launch speed (free plates)
    double ramp_time = 0.0;  // duration of each separation or rejoining ramp
    units::UnitSystem units = units::UnitSystem::natural(units::System::RationalizedMks);

    // e / (sigma_s A), the expansion parameter.
    double coupling_ratio() const { return e / (sigma_s * area); }
    void validate() const;
};

enum class Traverse { Above, Below };

// -e sigma_s D T / hbar: difference of the electron's +-e sigma_s D T / 2
// branch phases with the plates held fixed.
double fixed_plate_phase_shift(const CapacitorSpec& spec);

// Extra shift from the finite separation and rejoining ramps, during which
// the mean separation is D / 2: -e sigma_s D ramp_time / hbar.
double ramp_correction(const CapacitorSpec& spec);

struct PlateContribution {
    packet::PhaseLedger ledger;  // plate packet after T
    double contribution = 0.0;   // signed share of Phi_above - Phi_below
};

struct PlateLedger {
    // [traverse][plate], traverse 0 above, 1 below; plate 0 upper, 1 lower.
    std::array<std::array<PlateContribution, 2>, 2> plates{};
    double displacement_ratio = 0.0;  // plate travel over T relative to D
    double total = 0.0;
};

struct PlateOptions {
    double max_displacement_ratio = 1e-3;
    numerics::QuadOptions quad{};
};

// Phase shift carried by the plates moving in the electron's field, from
// each plate's packet phase. Throws RegimeError("displacement_ratio") when
// the plates travel too far during T.
PlateLedger plate_attributed_phase(const CapacitorSpec& spec, const PlateOptions& opts = {});

struct SplitLedger {
    double electron_fraction = 0.0;
    double electron = 0.0;     // electron's share of Phi_above - Phi_below
    double upper_plate = 0.0;
    double lower_plate = 0.0;
    double total = 0.0;
};

// Moves a constant fraction of the interaction energy onto the electron;
// fraction 0 puts the whole shift on the plates, 1 on the electron.
SplitLedger attribution_split(const CapacitorSpec& spec, double electron_fraction, const PlateOptions& opts = {});

struct ScenarioResult {
    double T_plus = 0.0;   // return time of the plates, electron above
    double T_minus = 0.0;
    double D_plus = 0.0;   // largest separation
    double D_minus = 0.0;
    double T_bar = 0.0;    // 4 M v0 / (sigma_s^2 A)
    // Plates in the electron's field, and one plate in the other's field.
    double electron_field_term = 0.0;
    double self_field_term = 0.0;
    double phase_shift = 0.0;
    // Leading-order forms: -T_bar^2 sigma e v0 / 3, +2/3 and the +1/3 sum.
    double approx_electron_field_term = 0.0;
    double approx_self_field_term = 0.0;
    double approx_phase_shift = 0.0;
    // Same two terms by quadrature along the plate trajectories.
    double quadrature_electron_field_term = 0.0;
    double quadrature_self_field_term = 0.0;
    // Upper plate, electron above: -int V dt against the work integral.
    double potential_integral = 0.0;
    double work_integral = 0.0;
    // Branches are recombined exactly by the decelerating endgame.
    double plate_visibility = 1.0;
};

// Plates launched apart at +-v0 from z = 0 and pulled back by their mutual
// attraction and the electron. Exact mode keeps all orders in
// e / (sigma_s A); otherwise phase_shift is the leading-order value.
ScenarioResult free_plate_scenario(const CapacitorSpec& spec, bool exact_mode = true,
                                   const numerics::QuadOptions& quad = {});

}  // namespace abkit::capacitor
