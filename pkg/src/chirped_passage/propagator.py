"""Integration of i dC/dt = H(t) C for few-level systems."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .model import PulseParams

Builder = Callable[[float], np.ndarray]

# Envelope falls to exp(-25) of its peak at this many tau0 from the center.
WINDOW_HALF_WIDTH = 5.0 * math.sqrt(2.0)


class IntegrationError(RuntimeError):
    """Raised when the stepper gives up; ``time`` is where it stopped."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t = {time:.6g} ns)")
        self.time = time


@dataclass(frozen=True)
class IntegrationSettings:
    t_start: float
    t_end: float
    max_step: float
    tolerance: float = 1e-10
    n_samples: int = 2001
    frequency_scale: float = 1.0

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError("t_start must precede t_end")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_samples)

    def refined(self, factor: float = 2.0) -> "IntegrationSettings":
        """Same window with step cap and tolerance divided by ``factor``."""
        return replace(self, max_step=self.max_step / factor, tolerance=self.tolerance / factor)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled amplitudes; ``states[i]`` is the state vector at ``times[i]``."""

    times: np.ndarray
    states: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def norms(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms - 1.0)))

    def __len__(self):
        return len(self.times)


def default_window(pulse: PulseParams, **overrides) -> IntegrationSettings:
    """Window of +-5 sqrt(2) tau0 about the pulse center.

    Keyword overrides are applied to the returned settings.
    """
    half = WINDOW_HALF_WIDTH * pulse.tau0
    settings = IntegrationSettings(
        t_start=pulse.center - half,
        t_end=pulse.center + half,
        max_step=pulse.tau0 / 100.0,
        tolerance=1e-10,
        n_samples=2001,
    )
    return replace(settings, **overrides) if overrides else settings


def basis_state(dim: int, index: int = 0) -> np.ndarray:
    c = np.zeros(dim, dtype=complex)
    c[index] = 1.0
    return c


def propagate(hamiltonian: Builder, initial, settings: IntegrationSettings) -> Trajectory:
    """Integrate the Schrodinger equation from ``settings.t_start``.

    Uses the DOP853 embedded Runge-Kutta pair. The state is never
    renormalized, so ``Trajectory.norm_drift`` measures the integrator error.
    """
    c0 = np.asarray(initial, dtype=complex).ravel()
    norm = float(np.vdot(c0, c0).real)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"initial state is not normalized (norm = {norm:.12g})")
    h0 = np.asarray(hamiltonian(settings.t_start))
    if h0.shape != (c0.size, c0.size):
        raise ValueError(f"Hamiltonian shape {h0.shape} does not match state size {c0.size}")

    scale = settings.frequency_scale

    def rhs(t, c):
        return -1j * scale * (hamiltonian(t) @ c)

    return _integrate(rhs, c0, settings)


def _integrate(rhs, c0, settings: IntegrationSettings) -> Trajectory:
    times = settings.times
    sol = solve_ivp(
        rhs,
        (settings.t_start, settings.t_end),
        c0,
        method="DOP853",
        t_eval=times,
        rtol=settings.tolerance,
        atol=settings.tolerance * 1e-2,
        max_step=settings.max_step,
    )
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else settings.t_start
        raise IntegrationError(sol.message, t_fail)
    return Trajectory(times=sol.t, states=sol.y.T.copy())


def final_populations(traj: Trajectory) -> np.ndarray:
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    return traj.populations[-1]


def transient_max(traj: Trajectory, states: Sequence[int]) -> float:
    """Largest summed population of ``states`` (0-based) over the run."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    idx = sorted(set(states))
    dim = traj.states.shape[1]
    if not idx or any(not 0 <= i < dim for i in idx):
        raise IndexError(f"state indices {idx} out of range for dimension {dim}")
    return float(traj.populations[:, idx].sum(axis=1).max())
