"""CSV tables, text reports and gnuplot scripts for the CLI."""
from __future__ import annotations

import os
import tempfile

import numpy as np

from .dressed import ROMAN, DressedFrame, bare_weights
from .propagator import Trajectory
from .sweep import SweepResult, classify_region

SCHEMA_VERSION = 1


def fmt(x) -> str:
    return f"{x:.16e}"


def _table(kind: str, header: list[str], rows) -> str:
    lines = [f"# chirped-passage {kind} v{SCHEMA_VERSION}", ",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    d = traj.states.shape[1]
    header = ["time_ns"]
    for k in range(1, d + 1):
        header += [f"re_c{k}", f"im_c{k}"]
    header += [f"p{k}" for k in range(1, d + 1)] + ["norm"]
    amps = np.empty((len(traj), 2 * d))
    amps[:, 0::2] = traj.states.real
    amps[:, 1::2] = traj.states.imag
    data = np.column_stack([traj.times, amps, traj.populations, traj.norms])
    return _table("trajectory", header, data)


def populations_plot(dim: int, csv_name: str = "trajectory.csv") -> str:
    first_p = 2 + 2 * dim
    curves = ", \\\n     ".join(
        f"'{csv_name}' using 1:{first_p + k} with lines title 'P{k + 1}'" for k in range(dim))
    return (
        "set datafile separator ','\n"
        "set xlabel 'time (ns)'\n"
        "set ylabel 'population'\n"
        "set yrange [0:1.05]\n"
        f"plot {curves}\n"
    )


def dressed_energies_csv(frame: DressedFrame, diagonals: np.ndarray) -> str:
    d = frame.dim
    header = ["time_ns"] + [f"lambda_{ROMAN[j]}" for j in range(d)]
    header += [f"bare_{k}" for k in range(1, d + 1)]
    return _table("dressed_energies", header,
                  np.column_stack([frame.times, frame.energies, diagonals]))


def bare_weights_csv(frame: DressedFrame) -> str:
    d = frame.dim
    header = ["time_ns"] + [f"w_{i + 1}_{ROMAN[j]}" for i in range(d) for j in range(d)]
    w = bare_weights(frame).reshape(len(frame.times), d * d)
    return _table("bare_weights", header, np.column_stack([frame.times, w]))


def coupling_csv(frame: DressedFrame) -> str:
    d = frame.dim
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    header = ["time_ns"] + [f"k_{ROMAN[i]}_{ROMAN[j]}" for i, j in pairs]
    k = np.column_stack([np.abs(frame.couplings[:, i, j]) for i, j in pairs])
    return _table("coupling", header, np.column_stack([frame.times, k]))


def dressed_plot(dim: int) -> str:
    energy = ", \\\n     ".join(
        [f"'dressed_energies.csv' using 1:{2 + j} with lines title '{ROMAN[j]}'"
         for j in range(dim)]
        + [f"'dressed_energies.csv' using 1:{2 + dim + k} with lines dt 2 title '|{k + 1}>'"
           for k in range(dim)])
    return (
        "set datafile separator ','\n"
        "set xlabel 'time (ns)'\n"
        "set ylabel 'energy (GHz)'\n"
        f"plot {energy}\n"
    )


def sweep_matrix_csv(result: SweepResult, state: int) -> str:
    spec = result.spec
    lines = [f"# chirped-passage sweep_p{state + 1} v{SCHEMA_VERSION}",
             ",".join(["fwhm_ns\\chirp_GHz_per_ns"] + [fmt(c) for c in spec.chirp_axis])]
    pops = result.population(state)
    for i, fw in enumerate(spec.fwhm_axis):
        lines.append(",".join([fmt(fw)] + [fmt(v) for v in pops[i]]))
    return "\n".join(lines) + "\n"


def flags_csv(result: SweepResult, threshold: float = 0.9) -> str:
    spec = result.spec
    region = classify_region(result, threshold)
    lines = [f"# chirped-passage flags v{SCHEMA_VERSION}",
             "i,j,fwhm_ns,chirp_GHz_per_ns,sweep_condition,lz_condition,inverted"]
    nf, nc = spec.shape
    for i in range(nf):
        for j in range(nc):
            s, lz = result.flags[i, j]
            lines.append(f"{i},{j},{fmt(spec.fwhm_axis[i])},{fmt(spec.chirp_axis[j])},"
                         f"{int(s)},{int(lz)},{int(region.inverted[i, j])}")
    return "\n".join(lines) + "\n"


def failures_csv(result: SweepResult) -> str:
    spec = result.spec
    lines = [f"# chirped-passage failures v{SCHEMA_VERSION}",
             "i,j,fwhm_ns,chirp_GHz_per_ns,message"]
    for i, j, msg in result.failures:
        msg = msg.replace('"', "'")
        lines.append(f'{i},{j},{fmt(spec.fwhm_axis[i])},{fmt(spec.chirp_axis[j])},"{msg}"')
    return "\n".join(lines) + "\n"


def sweep_plot(state: int = 1) -> str:
    return (
        "set datafile separator ','\n"
        "set xlabel 'chirp rate (GHz/ns)'\n"
        "set ylabel 'FWHM (ns)'\n"
        "set view map\n"
        f"plot 'sweep_p{state + 1}.csv' matrix nonuniform with image title 'P{state + 1}'\n"
    )


def write_outputs(directory: str, files: dict[str, str]) -> list[str]:
    """Write every file via a temporary name and rename; nothing partial."""
    os.makedirs(directory, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=directory)
            staged.append((tmp, os.path.join(directory, name)))
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            os.chmod(tmp, 0o644)
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]
