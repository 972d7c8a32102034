"""Pulse, level structure and interaction Hamiltonians.

Units: frequencies in GHz, times in ns, chirp rates in GHz/ns. A frequency
multiplies time directly in the phase (no factor 2pi is inserted), so every
quantity is measured in the same system of units and only ratios such as
peak_rabi / omega21 or chirp_rate / omega21**2 matter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FWHM_PER_TAU0 = 2.0 * math.sqrt(math.log(2.0))


@dataclass(frozen=True)
class PulseParams:
    """Linearly chirped Gaussian pulse.

    Parameters
    ----------
    peak_rabi : float
        Peak Rabi frequency (GHz).
    fwhm : float
        Full width at half maximum of the pulse intensity (ns).
    chirp_rate : float
        Signed linear chirp rate alpha/2pi (GHz/ns).
    detuning : float
        One-photon detuning (GHz).
    center : float
        Time of the pulse peak, also the zero of the chirp (ns).
    """

    peak_rabi: float
    fwhm: float
    chirp_rate: float
    detuning: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        if not self.peak_rabi >= 0.0:
            raise ValueError(f"peak_rabi must be >= 0, got {self.peak_rabi}")
        if not self.fwhm > 0.0:
            raise ValueError(f"fwhm must be > 0, got {self.fwhm}")
        for name in ("chirp_rate", "detuning", "center"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def tau0(self) -> float:
        """Pulse duration, fwhm / (2 sqrt(ln 2))."""
        return self.fwhm / FWHM_PER_TAU0

    @property
    def sweep_product(self) -> float:
        """|chirp_rate| * tau0, the frequency range swept within one duration."""
        return abs(self.chirp_rate) * self.tau0


@dataclass(frozen=True)
class AtomSystem:
    """Hyperfine splittings of the four optically coupled levels.

    ``omega43`` may be zero; that degenerate excited manifold makes the
    three-level reduction exact.
    """

    omega21: float
    omega43: float
    labels: tuple[str, ...] = field(default=("|1>", "|2>", "|3>", "|4>"))

    def __post_init__(self):
        if not self.omega21 > 0.0:
            raise ValueError(f"omega21 must be > 0, got {self.omega21}")
        if not self.omega43 >= 0.0:
            raise ValueError(f"omega43 must be >= 0, got {self.omega43}")
        if not self.omega21 > self.omega43:
            raise ValueError("omega21 must exceed omega43")
        if len(self.labels) != 4:
            raise ValueError("need exactly four level labels")


def rb85_d1_preset() -> AtomSystem:
    """85Rb, 5S1/2 and 5P1/2 hyperfine splittings."""
    return AtomSystem(
        omega21=3.035,
        omega43=0.362,
        labels=("5S1/2 F=2", "5S1/2 F=3", "5P1/2 F'=2", "5P1/2 F'=3"),
    )


PRESETS = {"rb85-d1": rb85_d1_preset}


def envelope(t, pulse: PulseParams):
    """Rabi frequency at time ``t`` (GHz).

    The field amplitude is ``peak_rabi * exp(-(t - center)**2 / (2 tau0**2))``
    so that the intensity ``exp(-(t - center)**2 / tau0**2)`` has the
    requested FWHM.
    """
    x = (np.asarray(t, dtype=float) - pulse.center) / pulse.tau0
    return pulse.peak_rabi * np.exp(-0.5 * x * x)


def intensity(t, pulse: PulseParams):
    """Normalized intensity profile, (envelope / peak)**2."""
    x = (np.asarray(t, dtype=float) - pulse.center) / pulse.tau0
    return np.exp(-x * x)


def bandwidth(pulse: PulseParams) -> float:
    """Spectral width estimate 1/tau0 (GHz). Diagnostic only."""
    return 1.0 / pulse.tau0


class PulseHamiltonian:
    """Time-dependent Hamiltonian of the form

        H(t) = static + chirp_rate * (t - center) * sweep + envelope(t) * coupling

    Calling the object returns H(t) as a complex (n, n) array in GHz.
    """

    def __init__(self, static, sweep, coupling, pulse: PulseParams):
        self.static = np.asarray(static, dtype=complex)
        self.sweep = np.asarray(sweep, dtype=complex)
        self.coupling = np.asarray(coupling, dtype=complex)
        self.pulse = pulse
        self.dim = self.static.shape[0]

    def __call__(self, t: float) -> np.ndarray:
        p = self.pulse
        x = (t - p.center) / p.tau0
        rabi = p.peak_rabi * math.exp(-0.5 * x * x)
        return self.static + (p.chirp_rate * (t - p.center)) * self.sweep + rabi * self.coupling

    def derivative(self, t: float) -> np.ndarray:
        """dH/dt, exact."""
        p = self.pulse
        x = (t - p.center) / p.tau0
        rabi_dot = -p.peak_rabi * math.exp(-0.5 * x * x) * x / p.tau0
        return p.chirp_rate * self.sweep + rabi_dot * self.coupling


def four_level(pulse: PulseParams, atom: AtomSystem) -> PulseHamiltonian:
    """Four-level Hamiltonian: ground |1>,|2> each coupled to excited |3>,|4>."""
    d, w21, w43 = pulse.detuning, atom.omega21, atom.omega43
    static = np.diag([d + w43, d + w43 + w21, 0.0, w43])
    sweep = np.diag([1.0, 1.0, 0.0, 0.0])
    coupling = np.zeros((4, 4))
    coupling[:2, 2:] = -0.5
    coupling[2:, :2] = -0.5
    return PulseHamiltonian(static, sweep, coupling, pulse)


def three_level(pulse: PulseParams, atom: AtomSystem) -> PulseHamiltonian:
    """Lambda Hamiltonian with the excited pair replaced by one level.

    Only defined at zero one-photon detuning.
    """
    if pulse.detuning != 0.0:
        raise ValueError("three-level reduction requires zero detuning, "
                         f"got {pulse.detuning}")
    static = np.diag([0.0, atom.omega21, 0.0])
    sweep = np.diag([1.0, 1.0, 0.0])
    c = -1.0 / math.sqrt(2.0)
    coupling = np.array([[0.0, 0.0, c], [0.0, 0.0, c], [c, c, 0.0]])
    return PulseHamiltonian(static, sweep, coupling, pulse)


def hamiltonian4(t: float, pulse: PulseParams, atom: AtomSystem) -> np.ndarray:
    return four_level(pulse, atom)(t)


def hamiltonian3(t: float, pulse: PulseParams, atom: AtomSystem) -> np.ndarray:
    return three_level(pulse, atom)(t)


def build_hamiltonian(model: str, pulse: PulseParams, atom: AtomSystem) -> PulseHamiltonian:
    if model == "four":
        return four_level(pulse, atom)
    if model == "three":
        return three_level(pulse, atom)
    raise ValueError(f"unknown model {model!r}, expected 'four' or 'three'")


def is_hermitian(h: np.ndarray, atol: float = 1e-12) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and np.allclose(h, h.conj().T, rtol=0, atol=atol)
