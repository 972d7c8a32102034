"""Three-level Lambda approximation of the four-level system.

The excited pair is rotated into a_+ = (a3 + a4)/sqrt2 and
a_- = (a3 - a4)/sqrt2. Only a_+ couples to the ground states once the
excited splitting omega43 is dropped, so a_- is conserved and the dynamics
reduce to |1>, |2>, |+>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import AtomSystem, PulseParams, four_level, three_level
from .propagator import IntegrationSettings, Trajectory, basis_state, default_window, propagate

_S = 1.0 / math.sqrt(2.0)


def to_pm_basis(state4):
    """(a1, a2, a3, a4) -> (a1, a2, a+, a-). Accepts (..., 4) arrays."""
    a = np.asarray(state4, dtype=complex)
    if a.shape[-1] != 4:
        raise ValueError(f"expected 4 components, got shape {a.shape}")
    out = a.copy()
    out[..., 2] = _S * (a[..., 2] + a[..., 3])
    out[..., 3] = _S * (a[..., 2] - a[..., 3])
    return out


def from_pm_basis(state_pm):
    """Inverse of :func:`to_pm_basis` (the map is its own inverse)."""
    return to_pm_basis(state_pm)


def _require_resonant(pulse):
    if pulse.detuning != 0.0:
        raise ValueError(f"the Lambda reduction needs zero detuning, got {pulse.detuning}")


def aminus_drift(pulse: PulseParams, atom: AtomSystem,
                 settings: IntegrationSettings | None = None) -> float:
    """max_t | |a_-(t)| - |a_-(t0)| | along the four-level trajectory from |1>."""
    _require_resonant(pulse)
    settings = settings or default_window(pulse)
    traj = propagate(four_level(pulse, atom), basis_state(4), settings)
    return _drift(traj)


def _drift(traj4: Trajectory) -> float:
    am = np.abs(to_pm_basis(traj4.states)[:, 3])
    return float(np.max(np.abs(am - am[0])))


@dataclass(frozen=True, eq=False)
class ReductionReport:
    sweep_product: float        # |chirp_rate| tau0, GHz
    rabi: float
    omega43: float
    validity_chirp: bool        # |chirp_rate| tau0 >> omega43
    validity_rabi: bool         # peak_rabi >> omega43
    aminus_drift: float
    population_gap: float       # max over samples of P1, P2, excited differences
    final_gap_p2: float
    final_four: np.ndarray      # P1, P2, P3, P4
    final_three: np.ndarray     # P1, P2, P+
    dominant_four: str          # "ground", "target" or "excited"
    dominant_three: str
    times: np.ndarray
    populations_four: np.ndarray
    populations_three: np.ndarray

    @property
    def same_outcome(self) -> bool:
        return self.dominant_four == self.dominant_three

    def summary(self) -> str:
        lines = [
            f"validity_chirp |alpha/2pi|*tau0 >> omega43: {self.sweep_product:.6g} GHz "
            f"vs {self.omega43:.6g} GHz -> {self.validity_chirp}",
            f"validity_rabi Omega_R >> omega43: {self.rabi:.6g} GHz "
            f"vs {self.omega43:.6g} GHz -> {self.validity_rabi}",
            f"aminus_drift: {self.aminus_drift:.6g}",
            f"population_gap: {self.population_gap:.6g}",
            f"final_gap_p2: {self.final_gap_p2:.6g}",
            "final four-level P1 P2 P3 P4: " + " ".join(f"{p:.6f}" for p in self.final_four),
            "final three-level P1 P2 P+: " + " ".join(f"{p:.6f}" for p in self.final_three),
            f"dominant final state: four-level {self.dominant_four}, "
            f"three-level {self.dominant_three}",
            f"same outcome: {self.same_outcome}",
        ]
        return "\n".join(lines) + "\n"


def _dominant(p1, p2, pexc):
    return ("ground", "target", "excited")[int(np.argmax([p1, p2, pexc]))]


# "much greater than" for the validity flags
MUCH_GREATER = 5.0


def compare_models(pulse: PulseParams, atom: AtomSystem,
                   settings: IntegrationSettings | None = None) -> ReductionReport:
    """Propagate both models from |1> on the same grid and compare populations.

    The three-level intermediate population is compared with P3 + P4.
    """
    _require_resonant(pulse)
    settings = settings or default_window(pulse)
    t4 = propagate(four_level(pulse, atom), basis_state(4), settings)
    t3 = propagate(three_level(pulse, atom), basis_state(3), settings)
    p4, p3 = t4.populations, t3.populations
    exc4 = p4[:, 2] + p4[:, 3]
    gap = max(np.max(np.abs(p4[:, 0] - p3[:, 0])),
              np.max(np.abs(p4[:, 1] - p3[:, 1])),
              np.max(np.abs(exc4 - p3[:, 2])))
    w43 = atom.omega43
    return ReductionReport(
        sweep_product=pulse.sweep_product,
        rabi=pulse.peak_rabi,
        omega43=w43,
        validity_chirp=pulse.sweep_product > MUCH_GREATER * w43,
        validity_rabi=pulse.peak_rabi > MUCH_GREATER * w43,
        aminus_drift=_drift(t4),
        population_gap=float(gap),
        final_gap_p2=float(abs(p4[-1, 1] - p3[-1, 1])),
        final_four=p4[-1].copy(),
        final_three=p3[-1].copy(),
        dominant_four=_dominant(p4[-1, 0], p4[-1, 1], exc4[-1]),
        dominant_three=_dominant(*p3[-1]),
        times=t4.times,
        populations_four=p4,
        populations_three=p3,
    )
