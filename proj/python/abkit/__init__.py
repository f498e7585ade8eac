"""Semiclassical phase shifts of charged particles and their sources."""

from ._abkit import (
    CapacitorSpec,
    Error,
    InvalidInput,
    NumericError,
    RegimeError,
    SolenoidSpec,
    TimeDepForceSpec,
    UnitSystem,
    UnsupportedConfiguration,
    ab_phase_reference,
    adaptive_quad,
    phase_identity,
    attribution_split,
    fixed_plate_phase_shift,
    free_plate_scenario,
    outcome_probabilities,
    plate_contributions,
    solenoid_phase,
    visibility_budget,
)

__all__ = [
    "CapacitorSpec",
    "Error",
    "InvalidInput",
    "NumericError",
    "RegimeError",
    "SolenoidSpec",
    "TimeDepForceSpec",
    "UnitSystem",
    "UnsupportedConfiguration",
    "ab_phase_reference",
    "adaptive_quad",
    "phase_identity",
    "attribution_split",
    "fixed_plate_phase_shift",
    "free_plate_scenario",
    "outcome_probabilities",
    "plate_contributions",
    "solenoid_phase",
    "visibility_budget",
]
