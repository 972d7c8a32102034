"""Instantaneous eigenbasis of H(t), tracked by continuity.

Conventions: ``transforms[n]`` holds the dressed eigenvectors as columns
(bare index first), so bare amplitudes are ``C = T @ C_d``. The coupling
matrix is ``K = T^dagger dT/dt``, and the dressed amplitudes obey

    i dC_d/dt = s * diag(lambda) C_d - i K C_d

with ``s`` the frequency scale used by the propagator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import linear_sum_assignment

from .model import AtomSystem, PulseParams
from .propagator import Builder, IntegrationError, Trajectory

ROMAN = ("I", "II", "III", "IV", "V", "VI")


class TrackingError(RuntimeError):
    pass


class NoActiveSubsetError(LookupError):
    pass


@dataclass(frozen=True, eq=False)
class DressedFrame:
    times: np.ndarray
    energies: np.ndarray    # (n, d)
    transforms: np.ndarray  # (n, d, d), columns are eigenvectors
    couplings: np.ndarray   # (n, d, d), T^dagger dT/dt
    overlaps: np.ndarray    # (n-1, d), |<v_i(t_k)|v_i(t_k+1)>|

    @property
    def dim(self) -> int:
        return self.energies.shape[1]

    def to_bare(self, dressed: Trajectory) -> Trajectory:
        states = np.einsum("nij,nj->ni", self.transforms, dressed.states)
        return Trajectory(times=dressed.times, states=states)

    def to_dressed(self, bare: Trajectory) -> Trajectory:
        states = np.einsum("nji,nj->ni", self.transforms.conj(), bare.states)
        return Trajectory(times=bare.times, states=states)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude component real and positive."""
    k = np.argmax(np.abs(v), axis=0)
    lead = v[k, np.arange(v.shape[1])]
    return v * (lead.conj() / np.abs(lead))


def _initial_order(vals, vecs):
    # Label dressed state k by the bare state it coincides with, when that
    # assignment is a permutation; otherwise fall back to ascending energy.
    dominant = np.argmax(np.abs(vecs), axis=0)
    if len(set(dominant.tolist())) == len(dominant):
        return np.argsort(dominant)
    return np.arange(len(vals))


def dressed_frame(hamiltonian: Builder, times, *, degeneracy_tol: float = 1e-10,
                  min_overlap: float = 0.5) -> DressedFrame:
    """Diagonalize ``hamiltonian`` on ``times`` and track the eigenvectors.

    States are labelled at the first sample (by the bare state they match
    when the field is off) and then followed by maximal overlap with the
    previous sample, so dressed curves may cross in energy. Eigenvector
    phases are fixed at the first sample and then chosen for continuity.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 3:
        raise ValueError("need at least 3 time samples")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")

    hs = np.array([hamiltonian(t) for t in times], dtype=complex)
    vals, vecs = np.linalg.eigh(hs)
    n, d = vals.shape

    if np.min(np.diff(vals[0])) < degeneracy_tol:
        raise TrackingError(f"degenerate eigenvalues at t = {times[0]:.6g} ns; ordering undefined")
    order = _initial_order(vals[0], vecs[0])
    energies = np.empty_like(vals)
    transforms = np.empty_like(vecs)
    energies[0] = vals[0, order]
    transforms[0] = _fix_phase(vecs[0][:, order])
    overlaps = np.empty((n - 1, d))

    for k in range(1, n):
        prev = transforms[k - 1]
        cur, lam = vecs[k], vals[k]
        _, cols = linear_sum_assignment(-np.abs(prev.conj().T @ cur))
        cur, lam = cur[:, cols], lam[cols]
        # Rotate nearly degenerate blocks onto the previous vectors.
        scale = max(1.0, float(np.max(np.abs(lam))))
        for block in _degenerate_blocks(lam, degeneracy_tol * scale * 10):
            a = cur[:, block].conj().T @ prev[:, block]
            u, _, wh = np.linalg.svd(a)
            cur[:, block] = cur[:, block] @ (u @ wh)
        ov = np.einsum("ij,ij->j", prev.conj(), cur)
        mag = np.abs(ov)
        if mag.min() < min_overlap:
            raise TrackingError(
                f"eigenvector tracking lost at t = {times[k]:.6g} ns (overlap {mag.min():.3f})")
        cur = cur * (ov.conj() / mag)
        overlaps[k - 1] = mag
        energies[k] = lam
        transforms[k] = cur

    couplings = _group_gradient(transforms, times)
    return DressedFrame(times, energies, transforms, couplings, overlaps)


def _degenerate_blocks(lam, tol):
    idx = np.argsort(lam)
    blocks, current = [], [idx[0]]
    for a, b in zip(idx[:-1], idx[1:]):
        if lam[b] - lam[a] < tol:
            current.append(b)
        else:
            if len(current) > 1:
                blocks.append(current)
            current = [b]
    if len(current) > 1:
        blocks.append(current)
    return blocks


def _unitary_log(u):
    """Principal log of unitary matrices close to the identity.

    With u = exp(i theta), (u - u^dagger) / 2i = sin(theta) is Hermitian, so
    log u = i arcsin(sin theta) is antihermitian by construction. Valid while
    all eigenphases lie inside (-pi/2, pi/2), i.e. adjacent samples overlap.
    """
    s = (u - np.conj(np.swapaxes(u, -1, -2))) / 2j
    vals, vecs = np.linalg.eigh(s)
    theta = np.arcsin(np.clip(vals, -1.0, 1.0))
    return 1j * np.einsum("...ik,...k,...jk->...ij", vecs, theta, vecs.conj())


def _group_gradient(transforms, times, order: int = 4):
    """K = T^dagger dT/dt from finite differences on the unitary group.

    For each sample k the relative logs log(T_k^dagger T_j) of ``order``
    neighbours are fitted to K h + K' h^2/2 + ..., a central stencil in the
    interior and one-sided at the ends. Every term is antihermitian, so K is
    antihermitian to round-off.
    """
    n = len(times)
    if n < order + 1:
        order = n - 1
    half = order // 2
    starts = np.clip(np.arange(n) - half, 0, n - order - 1)
    stencil = starts[:, None] + np.arange(order + 1)[None, :]
    # Drop the centre point itself from each stencil.
    k = np.arange(n)
    mask = stencil != k[:, None]
    nbrs = stencil[mask].reshape(n, order)
    h = times[nbrs] - times[:, None]
    powers = np.arange(1, order + 1)
    fact = np.cumprod(powers).astype(float)
    a = h[:, :, None] ** powers[None, None, :] / fact[None, None, :]  # (n, j, m)
    e1 = np.zeros(order)
    e1[0] = 1.0
    # weights w with sum_j w_j a[j, m] = delta_m0
    w = np.linalg.solve(np.swapaxes(a, 1, 2), np.broadcast_to(e1, (n, order))[..., None])[..., 0]
    tk = np.conj(np.swapaxes(transforms, -1, -2))
    u = np.einsum("nij,nmjl->nmil", tk, transforms[nbrs])
    logs = _unitary_log(u)
    return np.einsum("nm,nmij->nij", w, logs)


def bare_weights(frame: DressedFrame) -> np.ndarray:
    """|T_ij|^2: weight of bare state i in dressed state j, per sample."""
    return np.abs(frame.transforms) ** 2


def analytic_couplings(hamiltonian, frame: DressedFrame) -> np.ndarray:
    """K_ij = <v_i|dH/dt|v_j> / (lambda_j - lambda_i), off-diagonal only.

    Needs ``hamiltonian.derivative``; independent check on the differenced K.
    """
    out = np.zeros_like(frame.couplings)
    for k, t in enumerate(frame.times):
        v = frame.transforms[k]
        lam = frame.energies[k]
        hd = v.conj().T @ hamiltonian.derivative(t) @ v
        gap = lam[None, :] - lam[:, None]
        np.fill_diagonal(gap, 1.0)
        kk = hd / gap
        np.fill_diagonal(kk, 0.0)
        out[k] = kk
    return out


def propagate_dressed(frame: DressedFrame, initial, *, tolerance: float = 1e-10,
                      frequency_scale: float = 1.0, nonadiabatic: bool = True,
                      basis: str = "bare") -> Trajectory:
    """Integrate the dressed-basis equations on the frame's time span.

    ``initial`` is given in the bare basis unless ``basis="dressed"``.
    Energies and couplings are cubic-spline interpolated between samples.
    The returned trajectory holds dressed amplitudes; use
    ``frame.to_bare`` to map back.
    """
    c0 = np.asarray(initial, dtype=complex).ravel()
    if basis == "bare":
        c0 = frame.transforms[0].conj().T @ c0
    elif basis != "dressed":
        raise ValueError(f"basis must be 'bare' or 'dressed', got {basis!r}")
    if abs(np.vdot(c0, c0).real - 1.0) > 1e-8:
        raise ValueError("initial state is not normalized")

    d = frame.dim
    lam = CubicSpline(frame.times, frame.energies, axis=0)
    kspl = CubicSpline(frame.times, frame.couplings.reshape(len(frame.times), d * d), axis=0)

    if nonadiabatic:
        def rhs(t, c):
            return -1j * frequency_scale * lam(t) * c - kspl(t).reshape(d, d) @ c
    else:
        def rhs(t, c):
            return -1j * frequency_scale * lam(t) * c

    span = frame.times[-1] - frame.times[0]
    sol = solve_ivp(rhs, (frame.times[0], frame.times[-1]), c0, method="DOP853",
                    t_eval=frame.times, rtol=tolerance, atol=tolerance * 1e-2,
                    max_step=span / 200)
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]) if sol.t.size else frame.times[0])
    return Trajectory(times=sol.t, states=sol.y.T.copy())


@dataclass(frozen=True)
class ActiveSubset:
    pair: tuple[int, int]
    crossing_time: float
    min_gap: float
    peak_coupling: float
    threshold: float

    @property
    def labels(self) -> tuple[str, str]:
        return ROMAN[self.pair[0]], ROMAN[self.pair[1]]


def active_subset(frame: DressedFrame, initial_bare: int = 0, *,
                  threshold_factor: float = 10.0, floor: float = 1e-8) -> ActiveSubset:
    """Dressed state holding ``initial_bare`` at the start and its partner.

    The partner is the dressed state with the largest peak coupling to it.
    It must exceed ``threshold_factor`` times the median peak coupling of
    all other pairs (and the absolute ``floor``, in 1/ns).
    """
    d = frame.dim
    first = bare_weights(frame)[0]
    a = int(np.argmax(first[initial_bare]))
    peaks = np.max(np.abs(frame.couplings), axis=0)
    candidates = [j for j in range(d) if j != a]
    b = max(candidates, key=lambda j: peaks[a, j])
    others = [peaks[i, j] for i in range(d) for j in range(i + 1, d) if {i, j} != {a, b}]
    threshold = max(threshold_factor * float(np.median(others)) if others else 0.0, floor)
    if peaks[a, b] <= threshold:
        raise NoActiveSubsetError(
            f"no dressed state couples to {ROMAN[a]} above {threshold:.3g} /ns")
    gap = np.abs(frame.energies[:, a] - frame.energies[:, b])
    k = int(np.argmin(gap))
    return ActiveSubset(pair=(a, b), crossing_time=float(frame.times[k]), min_gap=float(gap[k]),
                        peak_coupling=float(peaks[a, b]), threshold=threshold)


@dataclass(frozen=True)
class AdiabaticityReport:
    sweep_product: float      # |chirp_rate| * tau0, GHz
    omega21: float
    condition_sweep: bool
    chirp_rate_abs: float     # GHz/ns
    rabi_squared: float       # GHz^2
    condition_lz: bool
    lz_ratio: float           # peak_rabi^2 / |chirp_rate|
    active: ActiveSubset | None = None
    min_gap: float | None = None
    coupling_ratio: float | None = None

    def summary(self) -> str:
        lines = [
            f"sweep condition |alpha/2pi|*tau0 > omega21: {self.sweep_product:.6g} GHz "
            f"vs {self.omega21:.6g} GHz -> {self.condition_sweep}",
            f"Landau-Zener condition |alpha/2pi| < Omega_R^2: {self.chirp_rate_abs:.6g} GHz/ns "
            f"vs {self.rabi_squared:.6g} GHz^2 -> {self.condition_lz}",
            f"Landau-Zener ratio Omega_R^2/|alpha/2pi|: {self.lz_ratio:.6g}",
        ]
        if self.active is None:
            lines.append("active pair: none")
        else:
            i, j = self.active.labels
            lines += [
                f"active pair: ({i}, {j})",
                f"avoided crossing time: {self.active.crossing_time:.6g} ns",
                f"min gap: {self.min_gap:.6g} GHz",
                f"coupling ratio max |K|/gap: {self.coupling_ratio:.6g}",
            ]
        return "\n".join(lines) + "\n"


def adiabaticity_report(pulse: PulseParams, atom: AtomSystem, frame: DressedFrame | None = None,
                        *, initial_bare: int = 0, frequency_scale: float = 1.0,
                        threshold_factor: float = 10.0) -> AdiabaticityReport:
    """Evaluate the two analytic adiabaticity inequalities, plus frame metrics.

    Both inequalities compare numbers in the units they are quoted in
    (GHz against GHz, GHz/ns against GHz^2).
    """
    rate = abs(pulse.chirp_rate)
    rabi2 = pulse.peak_rabi ** 2
    kw = dict(
        sweep_product=pulse.sweep_product,
        omega21=atom.omega21,
        condition_sweep=pulse.sweep_product > atom.omega21,
        chirp_rate_abs=rate,
        rabi_squared=rabi2,
        condition_lz=rate < rabi2,
        lz_ratio=rabi2 / rate if rate > 0 else float("inf"),
    )
    if frame is not None:
        try:
            sub = active_subset(frame, initial_bare, threshold_factor=threshold_factor)
        except NoActiveSubsetError:
            sub = None
        if sub is not None:
            a, b = sub.pair
            gap = np.abs(frame.energies[:, a] - frame.energies[:, b])
            k = np.abs(frame.couplings[:, a, b])
            with np.errstate(divide="ignore"):
                ratio = np.where(gap > 0, k / (frequency_scale * gap), np.inf)
            kw.update(active=sub, min_gap=sub.min_gap, coupling_ratio=float(np.max(ratio)))
    return AdiabaticityReport(**kw)
