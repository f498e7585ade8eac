import math

import pytest

import abkit


def test_quadrature_angular_identity():
    for r in (0.1, 0.5, 0.9):
        value, err = abkit.adaptive_quad(
            lambda t: math.sin(t) ** 2 / (1 + r * r - 2 * r * math.cos(t)), 0.0, 2 * math.pi
        )
        assert value == pytest.approx(math.pi, rel=1e-10)
        assert err >= 0.0


def test_solenoid_quarter_and_full_shift():
    spec = abkit.SolenoidSpec()
    spec.L = 1000.0
    spec.Q = 1e4
    spec.units = abkit.UnitSystem.natural(c=1000.0)
    ref = abkit.ab_phase_reference(spec)
    quarter = abkit.solenoid_phase(spec, "A", "lorenz", "positive")
    assert quarter["value"] == pytest.approx(ref / 4, rel=5e-3)
    total = abkit.solenoid_phase(spec, "A")["value"] - abkit.solenoid_phase(spec, "B")["value"]
    assert total == pytest.approx(ref, rel=5e-3)


def test_visibility_budget_defaults():
    b = abkit.visibility_budget(math.pi)
    assert b["pieces_per_ring"] == 1000
    assert b["visibility"] >= 1 - 1e-7


def test_capacitor_fixed_plates_and_split():
    spec = abkit.CapacitorSpec()
    spec.M = 1e6
    spec.e = 0.3
    spec.D = 1.5
    shift = abkit.fixed_plate_phase_shift(spec)
    assert shift == pytest.approx(-0.3 * 1.5, rel=1e-12)
    for share in abkit.plate_contributions(spec):
        assert share == pytest.approx(shift / 4, rel=1e-12)
    for f in (0.0, 0.37, 1.0):
        assert abkit.attribution_split(spec, f)["total"] == pytest.approx(shift, rel=1e-12)


def test_free_plates_leading_order():
    spec = abkit.CapacitorSpec()
    spec.sigma_s, spec.area, spec.M, spec.v0 = 1.3, 2.0, 4.0, 0.7
    spec.e = 1e-4 * spec.sigma_s * spec.area
    r = abkit.free_plate_scenario(spec)
    assert r["phase_shift"] == pytest.approx(r["approx_phase_shift"], rel=3e-4)
    assert r["potential_integral"] == pytest.approx(r["work_integral"], rel=1e-9)


def test_python_callables_drive_the_identity_check():
    spec = abkit.TimeDepForceSpec()
    spec.q, spec.m, spec.c, spec.v0 = 0.7, 2.0, 1.5, 1.1
    spec.A = lambda t: 0.3 * math.sin(1.3 * t)
    spec.Vprime = lambda t: 0.2 * math.cos(0.7 * t)
    r = abkit.phase_identity(spec, 1.0, 2.0)
    assert abs(r["relative_residual"]) < 1e-9


def test_errors_map_to_python_exceptions():
    with pytest.raises(abkit.InvalidInput):
        abkit.outcome_probabilities(1.5, 0.0)
    spec = abkit.CapacitorSpec()
    spec.M = 1.0
    with pytest.raises(abkit.RegimeError):
        abkit.plate_contributions(spec)
    assert issubclass(abkit.InvalidInput, abkit.Error)
