#include "abkit/units.hpp"

#include <cmath>
#include <numbers>

#include "abkit/errors.hpp"

namespace abkit::units {

namespace {

constexpr double c_si = 299792458.0;

// Multiplier taking one CGS unit of `kind` to SI.
double cgs_to_si(Quantity kind) {
    switch (kind) {
        case Quantity::Length: return 1e-2;
        case Quantity::Mass: return 1e-3;
        case Quantity::Time: return 1.0;
        case Quantity::Velocity: return 1e-2;
        case Quantity::Charge: return 1.0 / (10.0 * c_si);
        case Quantity::Energy: return 1e-7;
        case Quantity::Action: return 1e-7;
        case Quantity::MagneticField: return 1e-4;
        case Quantity::SurfaceChargeDensity: return 1e4 / (10.0 * c_si);
    }
    throw InvalidInput("unknown quantity kind");
}

}  // namespace

UnitSystem UnitSystem::cgs() {
    return {System::CgsGaussian, 2.99792458e10, 1.054571817e-27, 4.80320471e-10, 9.1093837015e-28};
}

UnitSystem UnitSystem::mks() {
    return {System::RationalizedMks, c_si, 1.054571817e-34, 1.602176634e-19, 9.1093837015e-31};
}

UnitSystem UnitSystem::natural(System tag, double c, double e_charge, double m_electron) {
    UnitSystem u{tag, c, 1.0, e_charge, m_electron};
    u.validate();
    return u;
}

void UnitSystem::validate() const {
    for (double v : {c, hbar, e_charge, m_electron}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("unit constants must be positive and finite");
    }
}

std::string_view to_string(System s) {
    return s == System::CgsGaussian ? "cgs-gaussian" : "rationalized-mks";
}

double convert(double value, Quantity kind, System from, System to) {
    if (from == to) return value;
    const double f = cgs_to_si(kind);
    return from == System::CgsGaussian ? value * f : value / f;
}

RegimeReport check_regime(const PacketRegime& r, const UnitSystem& units, double tol_wavelength,
                          double tol_spread) {
    if (!(r.sigma > 0.0) || !(r.mass > 0.0) || !(r.duration > 0.0) || !(r.speed > 0.0))
        throw InvalidInput("check_regime: sigma, mass, speed and duration must be positive");
    if (!(tol_wavelength > 0.0) || !(tol_spread > 0.0))
        throw InvalidInput("check_regime: tolerances must be positive");

    RegimeReport out;
    const double lambda = 2.0 * std::numbers::pi * units.hbar / (r.mass * r.speed);
    out.wavelength_ratio = lambda / r.sigma;
    out.spreading_ratio = units.hbar * r.duration / (2.0 * r.mass * r.sigma * r.sigma);
    out.wavelength_ok = out.wavelength_ratio < tol_wavelength;
    out.spreading_ok = out.spreading_ratio < tol_spread;
    return out;
}

}  // namespace abkit::units
