#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "abkit/capacitor.hpp"
#include "abkit/errors.hpp"
#include "abkit/interference.hpp"
#include "abkit/packet.hpp"
#include "abkit/quadrature.hpp"
#include "abkit/solenoid.hpp"
#include "abkit/units.hpp"

namespace py = pybind11;
using namespace abkit;

namespace {

solenoid::Traverse traverse_of(const std::string& s) {
    if (s == "A") return solenoid::Traverse::A;
    if (s == "B") return solenoid::Traverse::B;
    throw InvalidInput("traverse must be 'A' or 'B'");
}

interference::Gauge gauge_of(const std::string& s) {
    if (s == "lorenz") return interference::Gauge::Lorenz;
    if (s == "coulomb") return interference::Gauge::Coulomb;
    throw InvalidInput("gauge must be 'lorenz' or 'coulomb'");
}

solenoid::SignSelection signs_of(const std::string& s) {
    if (s == "positive") return solenoid::SignSelection::Positive;
    if (s == "negative") return solenoid::SignSelection::Negative;
    if (s == "both") return solenoid::SignSelection::Both;
    throw InvalidInput("signs must be 'positive', 'negative' or 'both'");
}

}  // namespace

PYBIND11_MODULE(_abkit, m) {
    m.doc() = "Semiclassical phase shifts of charged particles and their sources";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidInput>(m, "InvalidInput", base);
    py::register_exception<UnsupportedConfiguration>(m, "UnsupportedConfiguration", base);
    py::register_exception<NumericError>(m, "NumericError", base);
    py::register_exception<RegimeError>(m, "RegimeError", base);

    py::class_<units::UnitSystem>(m, "UnitSystem")
        .def_static("cgs", &units::UnitSystem::cgs)
        .def_static("mks", &units::UnitSystem::mks)
        .def_static(
            "natural",
            [](const std::string& tag, double c, double e, double me) {
                return units::UnitSystem::natural(
                    tag == "rationalized" ? units::System::RationalizedMks : units::System::CgsGaussian, c, e, me);
            },
            py::arg("tag") = "gaussian", py::arg("c") = 1.0, py::arg("e_charge") = 1.0, py::arg("m_electron") = 1.0)
        .def_readonly("c", &units::UnitSystem::c)
        .def_readonly("hbar", &units::UnitSystem::hbar)
        .def_readonly("e_charge", &units::UnitSystem::e_charge)
        .def_readonly("m_electron", &units::UnitSystem::m_electron);

    m.def(
        "adaptive_quad",
        [](const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol) {
            const auto r = numerics::adaptive_quad(f, a, b, numerics::QuadOptions{rel_tol, abs_tol, 2000});
            return py::make_tuple(r.value, r.error_estimate);
        },
        py::arg("f"), py::arg("a"), py::arg("b"), py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 0.0,
        "Adaptive Gauss-Kronrod integral of f over [a, b]; returns (value, error_estimate).");

    py::class_<dynamics::TimeDepForceSpec>(m, "TimeDepForceSpec")
        .def(py::init<>())
        .def_readwrite("q", &dynamics::TimeDepForceSpec::q)
        .def_readwrite("m", &dynamics::TimeDepForceSpec::m)
        .def_readwrite("c", &dynamics::TimeDepForceSpec::c)
        .def_readwrite("x0", &dynamics::TimeDepForceSpec::x0)
        .def_readwrite("v0", &dynamics::TimeDepForceSpec::v0)
        .def_readwrite("A", &dynamics::TimeDepForceSpec::A)
        .def_readwrite("Vprime", &dynamics::TimeDepForceSpec::Vprime)
        .def_readwrite("g", &dynamics::TimeDepForceSpec::g);

    m.def(
        "phase_identity",
        [](const dynamics::TimeDepForceSpec& s, double sigma, double T) {
            const auto r = packet::check_phase_identity(s, sigma, T, {1e-12, 0.0, 2000});
            return py::dict(py::arg("lhs") = r.lhs, py::arg("rhs") = r.rhs, py::arg("difference") = r.difference,
                            py::arg("predicted_quadratic") = r.predicted_quadratic,
                            py::arg("relative_residual") = r.relative_residual);
        },
        py::arg("spec"), py::arg("sigma"), py::arg("T"),
        "Time-only phase against the general phase on the same motion.");

    m.def(
        "outcome_probabilities",
        [](double visibility, double phase) {
            const auto p = interference::outcome_probabilities(visibility, phase);
            return py::make_tuple(p.plus, p.minus);
        },
        py::arg("visibility"), py::arg("phase"));

    py::class_<solenoid::SolenoidSpec>(m, "SolenoidSpec")
        .def(py::init<>())
        .def_readwrite("a", &solenoid::SolenoidSpec::a)
        .def_readwrite("R", &solenoid::SolenoidSpec::R)
        .def_readwrite("L", &solenoid::SolenoidSpec::L)
        .def_readwrite("v0", &solenoid::SolenoidSpec::v0)
        .def_readwrite("u", &solenoid::SolenoidSpec::u)
        .def_readwrite("Q", &solenoid::SolenoidSpec::Q)
        .def_readwrite("M", &solenoid::SolenoidSpec::M)
        .def_readwrite("n_a", &solenoid::SolenoidSpec::n_a)
        .def_readwrite("n_L", &solenoid::SolenoidSpec::n_L)
        .def_readwrite("units", &solenoid::SolenoidSpec::units);

    m.def("ab_phase_reference", &solenoid::ab_phase_reference, py::arg("spec"));
    m.def(
        "solenoid_phase",
        [](const solenoid::SolenoidSpec& s, const std::string& traverse, const std::string& gauge,
           const std::string& signs, bool discrete, bool extrapolate) {
            solenoid::PhaseOptions o;
            o.mode = discrete ? solenoid::Mode::Discrete : solenoid::Mode::Continuum;
            o.signs = signs_of(signs);
            o.extrapolate = extrapolate;
            py::gil_scoped_release release;
            const auto r = solenoid::solenoid_phase(s, traverse_of(traverse), gauge_of(gauge), o);
            py::gil_scoped_acquire acquire;
            return py::dict(py::arg("value") = r.value, py::arg("extrapolated") = r.extrapolated,
                            py::arg("error_estimate") = r.error_estimate, py::arg("warnings") = r.warnings);
        },
        py::arg("spec"), py::arg("traverse") = "A", py::arg("gauge") = "lorenz", py::arg("signs") = "both",
        py::arg("discrete") = false, py::arg("extrapolate") = true);
    m.def(
        "visibility_budget",
        [](double target, double a, double R, double L, double v0, double u) {
            const auto b = solenoid::visibility_budget(target, {a, R, L, v0, u});
            return py::dict(py::arg("electron_count") = b.electron_count, py::arg("pieces_per_ring") = b.pieces_per_ring,
                            py::arg("sigma") = b.sigma, py::arg("pieces") = b.pieces,
                            py::arg("position_exponent_sum") = b.position_exponent_sum,
                            py::arg("momentum_exponent_sum") = b.momentum_exponent_sum,
                            py::arg("visibility") = b.visibility);
        },
        py::arg("target_phase"), py::arg("a") = 1.0, py::arg("R") = 10.0, py::arg("L") = 100.0, py::arg("v0") = 1.0,
        py::arg("u") = 100.0, "Visibility budget in CGS units.");

    py::class_<capacitor::CapacitorSpec>(m, "CapacitorSpec")
        .def(py::init<>())
        .def_readwrite("sigma_s", &capacitor::CapacitorSpec::sigma_s)
        .def_readwrite("area", &capacitor::CapacitorSpec::area)
        .def_readwrite("D", &capacitor::CapacitorSpec::D)
        .def_readwrite("M", &capacitor::CapacitorSpec::M)
        .def_readwrite("m", &capacitor::CapacitorSpec::m)
        .def_readwrite("e", &capacitor::CapacitorSpec::e)
        .def_readwrite("u", &capacitor::CapacitorSpec::u)
        .def_readwrite("T", &capacitor::CapacitorSpec::T)
        .def_readwrite("v0", &capacitor::CapacitorSpec::v0);

    m.def("fixed_plate_phase_shift", &capacitor::fixed_plate_phase_shift, py::arg("spec"));
    m.def(
        "plate_contributions",
        [](const capacitor::CapacitorSpec& s) {
            const auto led = capacitor::plate_attributed_phase(s);
            py::list out;
            for (const auto& row : led.plates)
                for (const auto& p : row) out.append(p.contribution);
            return out;
        },
        py::arg("spec"), "Upper and lower plate shares for the above and below traverses.");
    m.def(
        "attribution_split",
        [](const capacitor::CapacitorSpec& s, double f) {
            const auto r = capacitor::attribution_split(s, f);
            return py::dict(py::arg("electron") = r.electron, py::arg("upper_plate") = r.upper_plate,
                            py::arg("lower_plate") = r.lower_plate, py::arg("total") = r.total);
        },
        py::arg("spec"), py::arg("electron_fraction"));
    m.def(
        "free_plate_scenario",
        [](const capacitor::CapacitorSpec& s, bool exact) {
            const auto r = capacitor::free_plate_scenario(s, exact);
            return py::dict(py::arg("T_plus") = r.T_plus, py::arg("T_minus") = r.T_minus, py::arg("T_bar") = r.T_bar,
                            py::arg("electron_field_term") = r.electron_field_term,
                            py::arg("self_field_term") = r.self_field_term, py::arg("phase_shift") = r.phase_shift,
                            py::arg("approx_phase_shift") = r.approx_phase_shift,
                            py::arg("potential_integral") = r.potential_integral,
                            py::arg("work_integral") = r.work_integral);
        },
        py::arg("spec"), py::arg("exact") = true);
}
