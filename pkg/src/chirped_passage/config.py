"""Run configuration: INI files with [pulse], [atom], [settings], [output]."""
from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .model import PRESETS, AtomSystem, PulseParams
from .sweep import SweepSpec

OUT_ENV = "CHIRPED_PASSAGE_OUT"

# Reference pulse: inverts the rb85-d1 ground pair.
DEFAULT_PULSE = PulseParams(peak_rabi=3.035, fwhm=2.995, chirp_rate=-2.947)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SettingsOverrides:
    tolerance: float | None = None
    max_step: float | None = None
    n_samples: int | None = None
    frequency_scale: float | None = None

    def as_kwargs(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if getattr(self, f.name) is not None}


@dataclass(frozen=True)
class RunConfig:
    pulse: PulseParams = DEFAULT_PULSE
    atom: AtomSystem = field(default_factory=PRESETS["rb85-d1"])
    preset: str | None = "rb85-d1"
    model: str = "four"
    settings: SettingsOverrides = field(default_factory=SettingsOverrides)
    output: str | None = None

    def __post_init__(self):
        if self.model not in ("four", "three"):
            raise ConfigError(f"model must be 'four' or 'three', got {self.model!r}")

    def output_dir(self) -> str:
        return self.output or os.environ.get(OUT_ENV) or "out"


def resolve_preset(name: str) -> AtomSystem:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None


def _getfloat(section, key, default=None):
    if key not in section:
        return default
    try:
        return float(section[key])
    except ValueError:
        raise ConfigError(f"[{section.name}] {key}: not a number: {section[key]!r}") from None


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    unknown = set(cp.sections()) - {"pulse", "atom", "settings", "output"}
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")

    cfg = RunConfig()
    try:
        if cp.has_section("pulse"):
            s = cp["pulse"]
            p = cfg.pulse
            cfg = replace(cfg, pulse=PulseParams(
                peak_rabi=_getfloat(s, "peak_rabi", p.peak_rabi),
                fwhm=_getfloat(s, "fwhm", p.fwhm),
                chirp_rate=_getfloat(s, "chirp_rate", p.chirp_rate),
                detuning=_getfloat(s, "detuning", p.detuning),
                center=_getfloat(s, "center", p.center),
            ))
        if cp.has_section("atom"):
            s = cp["atom"]
            if "preset" in s:
                cfg = replace(cfg, atom=resolve_preset(s["preset"]), preset=s["preset"])
            if "omega21" in s or "omega43" in s:
                base = cfg.atom
                cfg = replace(cfg, preset=None, atom=AtomSystem(
                    omega21=_getfloat(s, "omega21", base.omega21),
                    omega43=_getfloat(s, "omega43", base.omega43),
                ))
        if cp.has_section("settings"):
            s = cp["settings"]
            n = s.get("n_samples")
            cfg = replace(cfg, model=s.get("model", cfg.model), settings=SettingsOverrides(
                tolerance=_getfloat(s, "tolerance"),
                max_step=_getfloat(s, "max_step"),
                n_samples=int(n) if n is not None else None,
                frequency_scale=_getfloat(s, "frequency_scale"),
            ))
        if cp.has_section("output"):
            cfg = replace(cfg, output=cp["output"].get("dir") or None)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def dump_config(cfg: RunConfig) -> str:
    cp = configparser.ConfigParser()
    p = cfg.pulse
    cp["pulse"] = {k: repr(getattr(p, k)) for k in
                   ("peak_rabi", "fwhm", "chirp_rate", "detuning", "center")}
    if cfg.preset is not None:
        cp["atom"] = {"preset": cfg.preset}
    else:
        cp["atom"] = {"omega21": repr(cfg.atom.omega21), "omega43": repr(cfg.atom.omega43)}
    cp["settings"] = {"model": cfg.model}
    for k, v in cfg.settings.as_kwargs().items():
        cp["settings"][k] = repr(v)
    if cfg.output is not None:
        cp["output"] = {"dir": cfg.output}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _axis(text: str, name: str) -> tuple[float, ...]:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return tuple(np.linspace(float(start), float(stop), int(num)))
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"cannot parse {name} axis {text!r}") from None


def parse_sweep_spec(text: str, cfg: RunConfig) -> SweepSpec:
    """Sweep file: a [sweep] section with ``fwhm`` and ``chirp`` axes.

    Optional keys peak_rabi, detuning, model, tolerance default to the run
    configuration.
    """
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    if not cp.has_section("sweep"):
        raise ConfigError("sweep file needs a [sweep] section")
    s = cp["sweep"]
    for key in ("fwhm", "chirp"):
        if key not in s:
            raise ConfigError(f"[sweep] is missing {key!r}")
    try:
        return SweepSpec(
            fwhm_axis=_axis(s["fwhm"], "fwhm"),
            chirp_axis=_axis(s["chirp"], "chirp"),
            peak_rabi=_getfloat(s, "peak_rabi", cfg.pulse.peak_rabi),
            detuning=_getfloat(s, "detuning", cfg.pulse.detuning),
            atom=cfg.atom,
            model=s.get("model", cfg.model),
            tolerance=_getfloat(s, "tolerance", cfg.settings.tolerance or 1e-10),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
