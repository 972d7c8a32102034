"""End-of-pulse populations over a (FWHM, chirp rate) grid."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import AtomSystem, PulseParams, build_hamiltonian, rb85_d1_preset
from .propagator import IntegrationError, basis_state, default_window, propagate

log = logging.getLogger(__name__)

MODEL_DIM = {"four": 4, "three": 3}


def _strictly_monotone(axis) -> bool:
    d = np.diff(axis)
    return bool(np.all(d > 0) or np.all(d < 0))


@dataclass(frozen=True)
class SweepSpec:
    fwhm_axis: tuple[float, ...]
    chirp_axis: tuple[float, ...]
    peak_rabi: float = 3.035
    detuning: float = 0.0
    atom: AtomSystem = field(default_factory=rb85_d1_preset)
    model: str = "four"
    tolerance: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "fwhm_axis", tuple(float(x) for x in self.fwhm_axis))
        object.__setattr__(self, "chirp_axis", tuple(float(x) for x in self.chirp_axis))
        for name in ("fwhm_axis", "chirp_axis"):
            axis = getattr(self, name)
            if not axis:
                raise ValueError(f"{name} is empty")
            if not _strictly_monotone(axis):
                raise ValueError(f"{name} must be strictly monotone")
        if min(self.fwhm_axis) <= 0:
            raise ValueError("fwhm values must be positive")
        if self.model not in MODEL_DIM:
            raise ValueError(f"unknown model {self.model!r}")
        if self.model == "three" and self.detuning != 0.0:
            raise ValueError("three-level model needs zero detuning")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.fwhm_axis), len(self.chirp_axis)

    @property
    def dim(self) -> int:
        return MODEL_DIM[self.model]

    def pulse(self, i: int, j: int) -> PulseParams:
        return PulseParams(peak_rabi=self.peak_rabi, fwhm=self.fwhm_axis[i],
                           chirp_rate=self.chirp_axis[j], detuning=self.detuning)


def default_spec(n: int = 64, **kw) -> SweepSpec:
    """fwhm 0.5..4.5 ns by chirp -4..0 GHz/ns."""
    return SweepSpec(tuple(np.linspace(0.5, 4.5, n)), tuple(np.linspace(-4.0, 0.0, n)), **kw)


def inversion_region_spec(n: int = 16, **kw) -> SweepSpec:
    """fwhm 2.5..4 ns by chirp -4..-2 GHz/ns, where inversion is expected."""
    return SweepSpec(tuple(np.linspace(2.5, 4.0, n)), tuple(np.linspace(-4.0, -2.0, n)), **kw)


@dataclass(frozen=True, eq=False)
class SweepResult:
    spec: SweepSpec
    final_pops: np.ndarray   # (n_fwhm, n_chirp, dim); NaN where the cell failed
    flags: np.ndarray        # (n_fwhm, n_chirp, 2): sweep condition, Landau-Zener condition
    failures: list[tuple[int, int, str]]

    def population(self, state: int) -> np.ndarray:
        return self.final_pops[..., state]


def _flags(pulse: PulseParams, atom: AtomSystem) -> tuple[bool, bool]:
    rate = abs(pulse.chirp_rate)
    return pulse.sweep_product > atom.omega21, rate < pulse.peak_rabi ** 2


def _run_cell(args):
    spec, i, j = args
    pulse = spec.pulse(i, j)
    settings = default_window(pulse, tolerance=spec.tolerance, n_samples=2)
    try:
        traj = propagate(build_hamiltonian(spec.model, pulse, spec.atom),
                         basis_state(spec.dim), settings)
    except IntegrationError as exc:
        return i, j, None, str(exc)
    return i, j, traj.populations[-1], None


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Propagate every grid cell from |1> and collect final populations.

    Cells are independent and written by index, so the result does not
    depend on ``workers``. Integrator failures are recorded per cell.
    """
    nf, nc = spec.shape
    pops = np.full((nf, nc, spec.dim), np.nan)
    flags = np.zeros((nf, nc, 2), dtype=bool)
    failures = []
    cells = [(spec, i, j) for i in range(nf) for j in range(nc)]
    for _, i, j in cells:
        flags[i, j] = _flags(spec.pulse(i, j), spec.atom)

    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(cells) // (4 * workers))
            outcomes = list(pool.map(_run_cell, cells, chunksize=chunk))
    else:
        outcomes = [_run_cell(c) for c in cells]

    for i, j, p, err in outcomes:
        if err is None:
            pops[i, j] = p
        else:
            log.warning("cell (%d, %d) failed: %s", i, j, err)
            failures.append((i, j, err))
    failures.sort()
    return SweepResult(spec=spec, final_pops=pops, flags=flags, failures=failures)


@dataclass(frozen=True, eq=False)
class RegionMap:
    inverted: np.ndarray   # final P2 >= threshold
    analytic: np.ndarray   # both analytic conditions hold
    agreement: float       # fraction of non-failed cells where the two maps agree
    inverted_fraction: float


def classify_region(result: SweepResult, threshold: float = 0.9) -> RegionMap:
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    p2 = result.population(1)
    ok = ~np.isnan(p2)
    inverted = np.where(ok, p2, -1.0) >= threshold
    analytic = result.flags[..., 0] & result.flags[..., 1]
    n = int(ok.sum())
    agreement = float(np.sum((inverted == analytic) & ok) / n) if n else float("nan")
    frac = float(np.sum(inverted & ok) / n) if n else float("nan")
    return RegionMap(inverted=inverted, analytic=analytic, agreement=agreement,
                     inverted_fraction=frac)
