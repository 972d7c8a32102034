"""Two-photon adiabatic passage between hyperfine ground states driven by a
single linearly chirped pulse: four- and three-level dynamics, dressed-state
analysis and parameter sweeps."""

from .dressed import (
    ActiveSubset, AdiabaticityReport, DressedFrame, NoActiveSubsetError, TrackingError,
    active_subset, adiabaticity_report, bare_weights, dressed_frame, propagate_dressed,
)
from .model import (
    AtomSystem, PulseParams, bandwidth, envelope, four_level, hamiltonian3, hamiltonian4,
    intensity, rb85_d1_preset, three_level,
)
from .propagator import (
    IntegrationError, IntegrationSettings, Trajectory, basis_state, default_window,
    final_populations, propagate, transient_max,
)
from .reduction import ReductionReport, aminus_drift, compare_models, to_pm_basis
from .sweep import SweepResult, SweepSpec, classify_region, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ActiveSubset", "AdiabaticityReport", "AtomSystem", "DressedFrame", "IntegrationError",
    "IntegrationSettings", "NoActiveSubsetError", "PulseParams", "ReductionReport",
    "SweepResult", "SweepSpec", "TrackingError", "Trajectory", "active_subset",
    "adiabaticity_report", "aminus_drift", "bandwidth", "bare_weights", "basis_state",
    "classify_region", "compare_models", "default_window", "dressed_frame", "envelope",
    "final_populations", "four_level", "hamiltonian3", "hamiltonian4", "intensity",
    "propagate", "propagate_dressed", "rb85_d1_preset", "run_sweep", "three_level",
    "to_pm_basis", "transient_max",
]
