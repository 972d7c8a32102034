"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 integrator failure,
4 eigenvector tracking failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import output
from .config import (
    ConfigError, RunConfig, SettingsOverrides, dump_config, parse_config, parse_sweep_spec,
    resolve_preset,
)
from .dressed import TrackingError, adiabaticity_report, dressed_frame
from .model import AtomSystem, build_hamiltonian
from .propagator import IntegrationError, basis_state, default_window, propagate
from .reduction import compare_models
from .sweep import default_spec, inversion_region_spec, run_sweep

log = logging.getLogger("chirped_passage")

EXIT_CONFIG, EXIT_INTEGRATOR, EXIT_TRACKING = 2, 3, 4


def _common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="INI file with [pulse] [atom] [settings] [output]")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides config and "
                   "$CHIRPED_PASSAGE_OUT)")
    p.add_argument("--preset", metavar="NAME", help="atom preset, e.g. rb85-d1")
    p.add_argument("--model", choices=("three", "four"))
    p.add_argument("--threads", type=int, default=1, metavar="N", help="sweep workers")
    p.add_argument("--dump-config", action="store_true",
                   help="print the resolved configuration and exit")
    g = p.add_argument_group("pulse and atom overrides")
    g.add_argument("--peak-rabi", type=float, metavar="GHZ")
    g.add_argument("--fwhm", type=float, metavar="NS")
    g.add_argument("--chirp-rate", type=float, metavar="GHZ_PER_NS")
    g.add_argument("--detuning", type=float, metavar="GHZ")
    g.add_argument("--center", type=float, metavar="NS")
    g.add_argument("--omega21", type=float, metavar="GHZ")
    g.add_argument("--omega43", type=float, metavar="GHZ")
    g.add_argument("--tolerance", type=float)
    g.add_argument("--samples", type=int, help="number of output samples")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="chirped-passage",
        description="Chirped-pulse population transfer between hyperfine ground states.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("propagate", parents=[common], help="time-dependent populations")
    sub.add_parser("dressed", parents=[common], help="dressed-state energies, weights, couplings")
    sub.add_parser("compare", parents=[common], help="four-level vs three-level model")
    sw = sub.add_parser("sweep", parents=[common], help="end-of-pulse populations on a grid")
    sw.add_argument("--spec", metavar="PATH", help="sweep file with a [sweep] section")
    sw.add_argument("--grid", choices=("default", "inversion"), default="default",
                    help="built-in grid when no --spec is given")
    sw.add_argument("--n", type=int, default=None, help="points per axis for built-in grids")
    sw.add_argument("--threshold", type=float, default=0.9, help="P2 inversion threshold")
    return parser


def resolve_config(args) -> RunConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = parse_config(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    else:
        cfg = RunConfig()
    try:
        if args.preset:
            cfg = replace(cfg, atom=resolve_preset(args.preset), preset=args.preset)
        if args.omega21 is not None or args.omega43 is not None:
            a = cfg.atom
            cfg = replace(cfg, preset=None, atom=AtomSystem(
                omega21=a.omega21 if args.omega21 is None else args.omega21,
                omega43=a.omega43 if args.omega43 is None else args.omega43))
        pulse_kw = {k: getattr(args, k) for k in
                    ("peak_rabi", "fwhm", "chirp_rate", "detuning", "center")
                    if getattr(args, k) is not None}
        if pulse_kw:
            cfg = replace(cfg, pulse=replace(cfg.pulse, **pulse_kw))
        if args.model:
            cfg = replace(cfg, model=args.model)
        if args.tolerance is not None or args.samples is not None:
            s = cfg.settings
            cfg = replace(cfg, settings=SettingsOverrides(
                tolerance=s.tolerance if args.tolerance is None else args.tolerance,
                max_step=s.max_step,
                n_samples=s.n_samples if args.samples is None else args.samples,
                frequency_scale=s.frequency_scale))
        if args.out:
            cfg = replace(cfg, output=args.out)
        if cfg.model == "three" and cfg.pulse.detuning != 0.0:
            raise ConfigError("the three-level model needs zero detuning")
        default_window(cfg.pulse, **cfg.settings.as_kwargs())
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _settings(cfg: RunConfig):
    return default_window(cfg.pulse, **cfg.settings.as_kwargs())


def _describe(cfg: RunConfig) -> str:
    p, a = cfg.pulse, cfg.atom
    return (f"model: {cfg.model}\n"
            f"pulse: peak_rabi={p.peak_rabi!r} GHz fwhm={p.fwhm!r} ns tau0={p.tau0:.6g} ns "
            f"chirp_rate={p.chirp_rate!r} GHz/ns detuning={p.detuning!r} GHz center={p.center!r} ns\n"
            f"atom: omega21={a.omega21!r} GHz omega43={a.omega43!r} GHz\n")


def cmd_propagate(cfg: RunConfig) -> dict[str, str]:
    h = build_hamiltonian(cfg.model, cfg.pulse, cfg.atom)
    traj = propagate(h, basis_state(h.dim), _settings(cfg))
    log.info("final populations %s, norm drift %.2e", traj.populations[-1], traj.norm_drift)
    return {"trajectory.csv": output.trajectory_csv(traj),
            "populations.plt": output.populations_plot(h.dim)}


def cmd_dressed(cfg: RunConfig) -> dict[str, str]:
    h = build_hamiltonian(cfg.model, cfg.pulse, cfg.atom)
    settings = _settings(cfg)
    frame = dressed_frame(h, settings.times)
    diagonals = np.array([np.diag(h(t)).real for t in frame.times])
    report = adiabaticity_report(cfg.pulse, cfg.atom, frame,
                                 frequency_scale=settings.frequency_scale)
    return {
        "dressed_energies.csv": output.dressed_energies_csv(frame, diagonals),
        "bare_weights.csv": output.bare_weights_csv(frame),
        "coupling.csv": output.coupling_csv(frame),
        "adiabaticity.txt": _describe(cfg) + report.summary(),
        "dressed.plt": output.dressed_plot(h.dim),
    }


def cmd_compare(cfg: RunConfig) -> dict[str, str]:
    if cfg.pulse.detuning != 0.0:
        raise ConfigError("compare needs zero detuning")
    rep = compare_models(cfg.pulse, cfg.atom, _settings(cfg))
    rows = ["time_ns,p1_four,p2_four,p34_four,p1_three,p2_three,pplus_three"]
    step = max(1, len(rep.times) // 200)
    for k in list(range(0, len(rep.times), step)) + ([len(rep.times) - 1]
                                                    if (len(rep.times) - 1) % step else []):
        p4, p3 = rep.populations_four[k], rep.populations_three[k]
        rows.append(",".join(output.fmt(v) for v in
                             (rep.times[k], p4[0], p4[1], p4[2] + p4[3], p3[0], p3[1], p3[2])))
    text = _describe(replace(cfg, model="four")) + rep.summary() + "\nmatched samples\n"
    return {"reduction.txt": text + "\n".join(rows) + "\n"}


def cmd_sweep(cfg: RunConfig, args) -> dict[str, str]:
    if args.spec:
        try:
            with open(args.spec) as fh:
                spec = parse_sweep_spec(fh.read(), cfg)
        except OSError as exc:
            raise ConfigError(f"cannot read sweep spec: {exc}") from None
    else:
        make = inversion_region_spec if args.grid == "inversion" else default_spec
        kw = dict(peak_rabi=cfg.pulse.peak_rabi, detuning=cfg.pulse.detuning,
                  atom=cfg.atom, model=cfg.model)
        if cfg.settings.tolerance is not None:
            kw["tolerance"] = cfg.settings.tolerance
        try:
            spec = make(args.n, **kw) if args.n else make(**kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if not 0.0 < args.threshold < 1.0:
        raise ConfigError("--threshold must lie in (0, 1)")
    result = run_sweep(spec, workers=max(1, args.threads))
    files = {f"sweep_p{k + 1}.csv": output.sweep_matrix_csv(result, k) for k in range(spec.dim)}
    files["flags.csv"] = output.flags_csv(result, args.threshold)
    files["failures.csv"] = output.failures_csv(result)
    files["sweep.plt"] = output.sweep_plot(1)
    return files


def _check_writable(path: str):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path!r}: {exc}") from None
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path!r} is not writable")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.dump_config:
            sys.stdout.write(dump_config(cfg))
            return 0
        out = cfg.output_dir()
        _check_writable(out)
        if args.command == "propagate":
            files = cmd_propagate(cfg)
        elif args.command == "dressed":
            files = cmd_dressed(cfg)
        elif args.command == "compare":
            files = cmd_compare(cfg)
        else:
            files = cmd_sweep(cfg, args)
        for path in output.write_outputs(out, files):
            log.info("wrote %s", path)
    except ConfigError as exc:
        print(f"chirped-passage: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"chirped-passage: integrator failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR
    except TrackingError as exc:
        print(f"chirped-passage: eigenvector tracking failure: {exc}", file=sys.stderr)
        return EXIT_TRACKING
    return 0


if __name__ == "__main__":
    sys.exit(main())
