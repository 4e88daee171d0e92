"""Polarization-entanglement distribution toolkit (C++ core)."""

import json as _json

from . import _core
from ._core import (
    EstimationError,
    InputError,
    SweepError,
    apply_one_sided,
    bell_phi_plus,
    coincidence_probability,
    deployed_loss_db,
    estimate_rotation,
    fidelity_from_gsi,
    fidelity_to_phi_plus,
    gsi_at_rate,
    rotation_angle,
    rotation_matrix,
    simulate_counts,
    su2_from_poincare,
    transmission,
    werner_parameter_from_gsi,
    werner_state,
)

__all__ = [
    "EstimationError",
    "InputError",
    "SweepError",
    "analyze_sweep",
    "apply_one_sided",
    "bell_phi_plus",
    "bounds_from_counts",
    "coincidence_probability",
    "deployed_loss_db",
    "estimate_rotation",
    "fidelity_from_gsi",
    "fidelity_to_phi_plus",
    "gsi_at_rate",
    "rotation_angle",
    "rotation_matrix",
    "run_long_term",
    "simulate_counts",
    "su2_from_poincare",
    "transmission",
    "werner_parameter_from_gsi",
    "werner_state",
]


def bounds_from_counts(counts, form="sound", normalization="linear_total", bootstrap=0, seed=0):
    """Fidelity bounds report for a {"HH": n, ...} mapping."""
    return _json.loads(_core.bounds_from_counts(counts, form, normalization, bootstrap, seed))


def analyze_sweep(path, reference_nm=1300.0, fwhms=(0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0)):
    return _json.loads(_core.analyze_sweep_file(str(path), reference_nm, list(fwhms)))


def run_long_term(duration_days=1.0, seed=1, drift=True):
    return _json.loads(_core.run_long_term(duration_days, seed, drift))
