#pragma once

#include <string_view>

namespace abkit::units {

enum class System { CgsGaussian, RationalizedMks };

// Constants of one unit system. Natural mode keeps the system's c, e and m_e
// but sets hbar to exactly 1 so that phases equal actions.
struct UnitSystem {
    System tag = System::CgsGaussian;
    double c = 1.0;
    double hbar = 1.0;
    double e_charge = 1.0;
    double m_electron = 1.0;

    static UnitSystem cgs();
    static UnitSystem mks();
    static UnitSystem natural(System tag = System::CgsGaussian, double c = 1.0,
                              double e_charge = 1.0, double m_electron = 1.0);

    bool is_natural() const noexcept { return hbar == 1.0; }
    // Action (erg s or J s) to phase in radians.
    double phase(double action) const noexcept { return action / hbar; }

    void validate() const;
};

std::string_view to_string(System s);

enum class Quantity {
    Length,
    Mass,
    Time,
    Velocity,
    Charge,
    Energy,
    Action,
    MagneticField,
    SurfaceChargeDensity,
};

// Converts between the physical CGS-Gaussian and SI systems.
double convert(double value, Quantity kind, System from, System to);

struct PacketRegime {
    double sigma = 0.0;
    double mass = 0.0;
    double speed = 0.0;
    double duration = 0.0;
};

struct RegimeReport {
    double wavelength_ratio = 0.0;  // de Broglie wavelength over packet width
    double spreading_ratio = 0.0;   // hbar T / (2 m sigma^2)
    bool wavelength_ok = false;
    bool spreading_ok = false;

    bool ok() const noexcept { return wavelength_ok && spreading_ok; }
};

inline constexpr double default_tol_wavelength = 1e-2;
inline constexpr double default_tol_spread = 1e-3;

// Reports whether a packet sits in the narrow, non-spreading regime.
// Never throws on a failed ratio; throws InvalidInput on non-positive fields.
RegimeReport check_regime(const PacketRegime& regime, const UnitSystem& units,
                          double tol_wavelength = default_tol_wavelength,
                          double tol_spread = default_tol_spread);

}  // namespace abkit::units
