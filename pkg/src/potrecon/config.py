"""Experiment configuration: INI files -> validated dataclasses.

One config file describes one experiment recipe end to end.  The grammar is
plain ``configparser`` INI with these sections (all optional — every key has
a default reproducing the baseline disk experiment):

    [domain]       half_width, radius, n_per_side_forward,
                   n_per_side_inversion, n_boundary
    [plan]         n_lines, kappa_min, kappa_max, kappa_step
    [physics]      k (comma list), b, m (comma list of truncation multiples)
    [potential]    preset = case1 | case2 | constant, or bumps = a,px,py,s; ...
    [measurement]  mode = full | linearized, noise_level
    [bounds]       eps, m1, n, radius, trace_constant
    [output]       directory, heatmap (pgm | png | none), write_grids
    [forward]      k, kappa, y_hat = yx,yy   (single-probe data dump)

Numbers are parsed with float()/int(); lists split on commas; bump entries
split on semicolons.  Unknown sections or keys are rejected rather than
ignored, so a typo cannot silently fall back to a default.  ``config_hash``
is a stable digest of the fully resolved values (defaults included), which
the run manifest records so reruns can be matched to their recipe.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .bounds import StabilityParams
from .errors import ConfigurationError
from .potentials import GaussianBump, preset as potential_preset
from .sampling import SamplingPlan, build_sampling

__all__ = [
    "DomainSettings",
    "PlanSettings",
    "PhysicsSettings",
    "PotentialSettings",
    "MeasurementSettings",
    "BoundsSettings",
    "OutputSettings",
    "ForwardSettings",
    "ExperimentConfig",
    "load_config",
    "config_hash",
]

_HEATMAP_CHOICES = ("pgm", "png", "none")
_MODE_CHOICES = ("full", "linearized")
_PRESET_CHOICES = ("case1", "case2", "constant")


@dataclass(frozen=True)
class DomainSettings:
    half_width: float = 1.0
    radius: float = 0.7
    n_per_side_forward: int = 100
    n_per_side_inversion: int = 90
    n_boundary: int = 256


@dataclass(frozen=True)
class PlanSettings:
    n_lines: int = 9
    kappa_min: float = 1.0
    kappa_max: float = 50.0
    kappa_step: float = 0.2

    def build(self) -> SamplingPlan:
        return build_sampling(
            self.n_lines, self.kappa_min, self.kappa_max, self.kappa_step
        )


@dataclass(frozen=True)
class PhysicsSettings:
    k: tuple[float, ...] = (15.2,)
    b: float = 0.0
    m: tuple[float, ...] = (2.0,)


@dataclass(frozen=True)
class PotentialSettings:
    preset: str = "case1"
    bumps: tuple[GaussianBump, ...] = ()

    def resolve(self) -> tuple[GaussianBump, ...] | str:
        """The mixture to sample, or the string ``"constant"``."""
        if self.bumps:
            return self.bumps
        if self.preset == "constant":
            return "constant"
        return potential_preset(self.preset)


@dataclass(frozen=True)
class MeasurementSettings:
    mode: str = "full"
    noise_level: float = 0.0


@dataclass(frozen=True)
class BoundsSettings:
    eps: float = 1e-3
    m1: float = 1.0
    n: int = 2
    radius: float = 0.5
    trace_constant: float = 1.0

    def params(self) -> StabilityParams:
        return StabilityParams(
            eps=self.eps,
            m1=self.m1,
            n=self.n,
            radius=self.radius,
            trace_constant=self.trace_constant,
        )


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    heatmap: str = "pgm"
    write_grids: bool = True


@dataclass(frozen=True)
class ForwardSettings:
    k: float = 15.2
    kappa: float = 8.4
    y_hat: tuple[float, float] = (-0.17, 0.98)

    def direction(self) -> np.ndarray:
        v = np.asarray(self.y_hat, dtype=float)
        norm = float(np.hypot(v[0], v[1]))
        if norm == 0.0:
            raise ConfigurationError("forward y_hat must be a nonzero direction")
        return v / norm


@dataclass(frozen=True)
class ExperimentConfig:
    domain: DomainSettings = field(default_factory=DomainSettings)
    plan: PlanSettings = field(default_factory=PlanSettings)
    physics: PhysicsSettings = field(default_factory=PhysicsSettings)
    potential: PotentialSettings = field(default_factory=PotentialSettings)
    measurement: MeasurementSettings = field(default_factory=MeasurementSettings)
    bounds: BoundsSettings = field(default_factory=BoundsSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    forward: ForwardSettings = field(default_factory=ForwardSettings)


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------

def _number(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigurationError(f"[{section}] {key} = {raw!r} is not a number") from exc


def _integer(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"[{section}] {key} = {raw!r} is not an integer") from exc


def _boolean(section: str, key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"[{section}] {key} = {raw!r} is not a boolean")


def _number_list(section: str, key: str, raw: str) -> tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigurationError(f"[{section}] {key} must list at least one number")
    return tuple(_number(section, key, p) for p in parts)


def _choice(options: tuple[str, ...]) -> Callable[[str, str, str], str]:
    def parse(section: str, key: str, raw: str) -> str:
        value = raw.strip().lower()
        if value not in options:
            raise ConfigurationError(
                f"[{section}] {key} must be one of {options}, got {raw!r}"
            )
        return value

    return parse


def _bumps(section: str, key: str, raw: str) -> tuple[GaussianBump, ...]:
    bumps = []
    for entry in raw.split(";"):
        entry = entry.strip()
        if not entry:
            continue
        parts = [p.strip() for p in entry.split(",")]
        if len(parts) != 4:
            raise ConfigurationError(
                f"bump entry {entry!r} needs exactly amplitude,px,py,width"
            )
        a, px, py, s = (_number(section, key, p) for p in parts)
        if s <= 0.0:
            raise ConfigurationError(f"bump width must be positive, got {s}")
        bumps.append(GaussianBump(amplitude=a, center=(px, py), width=s))
    if not bumps:
        raise ConfigurationError(f"[{section}] {key} is present but empty")
    return tuple(bumps)


def _pair(section: str, key: str, raw: str) -> tuple[float, float]:
    parts = _number_list(section, key, raw)
    if len(parts) != 2:
        raise ConfigurationError(f"[{section}] {key} needs two components, got {raw!r}")
    return (parts[0], parts[1])


# Section name -> (defaults factory, {key: parser}).  Field names double as
# config keys except where the parser table says otherwise.
_SCHEMA: dict[str, tuple[type, dict[str, Callable[[str, str, str], Any]]]] = {
    "domain": (DomainSettings, {
        "half_width": _number,
        "radius": _number,
        "n_per_side_forward": _integer,
        "n_per_side_inversion": _integer,
        "n_boundary": _integer,
    }),
    "plan": (PlanSettings, {
        "n_lines": _integer,
        "kappa_min": _number,
        "kappa_max": _number,
        "kappa_step": _number,
    }),
    "physics": (PhysicsSettings, {
        "k": _number_list,
        "b": _number,
        "m": _number_list,
    }),
    "potential": (PotentialSettings, {
        "preset": _choice(_PRESET_CHOICES),
        "bumps": _bumps,
    }),
    "measurement": (MeasurementSettings, {
        "mode": _choice(_MODE_CHOICES),
        "noise_level": _number,
    }),
    "bounds": (BoundsSettings, {
        "eps": _number,
        "m1": _number,
        "n": _integer,
        "radius": _number,
        "trace_constant": _number,
    }),
    "output": (OutputSettings, {
        "directory": lambda s, k, raw: raw.strip(),
        "heatmap": _choice(_HEATMAP_CHOICES),
        "write_grids": _boolean,
    }),
    "forward": (ForwardSettings, {
        "k": _number,
        "kappa": _number,
        "y_hat": _pair,
    }),
}


def _validate(cfg: ExperimentConfig) -> None:
    dom = cfg.domain
    if dom.half_width <= 0.0 or dom.radius <= 0.0 or dom.radius >= dom.half_width:
        raise ConfigurationError(
            f"need 0 < radius < half_width, got radius={dom.radius}, "
            f"half_width={dom.half_width}"
        )
    for name in ("n_per_side_forward", "n_per_side_inversion", "n_boundary"):
        if getattr(dom, name) < 8:
            raise ConfigurationError(f"[domain] {name} must be at least 8")

    cfg.plan.build()  # range checks live in build_sampling

    ph = cfg.physics
    if any(k <= 0.0 for k in ph.k):
        raise ConfigurationError(f"[physics] k values must be positive, got {ph.k}")
    if ph.b < 0.0:
        raise ConfigurationError(f"[physics] b must be nonnegative, got {ph.b}")
    if any(m <= 0.0 for m in ph.m):
        raise ConfigurationError(f"[physics] m values must be positive, got {ph.m}")

    if cfg.measurement.noise_level < 0.0:
        raise ConfigurationError(
            f"[measurement] noise_level must be nonnegative, "
            f"got {cfg.measurement.noise_level}"
        )

    # [bounds] is deliberately NOT hypothesis-checked here: the bounds
    # command reports out-of-hypothesis parameter sets as rejected rows
    # instead of refusing the whole config.

    if cfg.forward.k <= 0.0 or cfg.forward.kappa <= 0.0:
        raise ConfigurationError("[forward] k and kappa must be positive")
    cfg.forward.direction()  # rejects the zero vector


def load_config(path: str | Path | None = None, text: str | None = None) -> ExperimentConfig:
    """Parse and validate an experiment config from a file or literal text.

    Missing file, unknown section, unknown key, or an out-of-range value all
    raise :class:`ConfigurationError`.
    """
    if (path is None) == (text is None):
        raise ValueError("pass exactly one of path or text")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        if path is not None:
            p = Path(path)
            if not p.is_file():
                raise ConfigurationError(f"config file not found: {p}")
            with p.open() as fh:
                parser.read_file(fh)
        else:
            parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from exc

    sections: dict[str, Any] = {}
    for name, (factory, keys) in _SCHEMA.items():
        settings = factory()
        if parser.has_section(name):
            for key, raw in parser[name].items():
                if key not in keys:
                    raise ConfigurationError(
                        f"unknown key {key!r} in [{name}]; expected one of {sorted(keys)}"
                    )
                settings = replace(settings, **{key: keys[key](name, key, raw)})
        sections[name] = settings
    unknown = set(parser.sections()) - set(_SCHEMA)
    if unknown:
        raise ConfigurationError(
            f"unknown config section(s) {sorted(unknown)}; expected one of "
            f"{sorted(_SCHEMA)}"
        )

    cfg = ExperimentConfig(**sections)
    _validate(cfg)
    return cfg


def _flatten(cfg: ExperimentConfig) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    for section_name in sorted(_SCHEMA):
        section = getattr(cfg, section_name)
        for f in fields(section):
            value = getattr(section, f.name)
            if isinstance(value, tuple) and value and isinstance(value[0], GaussianBump):
                rendered = ";".join(
                    f"{b.amplitude!r},{b.center[0]!r},{b.center[1]!r},{b.width!r}"
                    for b in value
                )
            elif isinstance(value, tuple):
                rendered = ",".join(repr(v) for v in value)
            else:
                rendered = repr(value)
            pairs.append((f"{section_name}.{f.name}", rendered))
    return pairs


def config_hash(cfg: ExperimentConfig, seed: int = 0) -> str:
    """Hex digest pinning the fully resolved config plus the run seed."""
    digest = hashlib.sha256()
    for key, rendered in _flatten(cfg):
        digest.update(f"{key}={rendered}\n".encode())
    digest.update(f"seed={seed}\n".encode())
    return digest.hexdigest()
