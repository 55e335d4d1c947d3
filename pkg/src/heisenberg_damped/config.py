"""Run configuration: flat ``key = value`` text with dotted section keys.

Lines are ``section.key = value``; ``#`` starts a comment; blank lines are
ignored. Unknown keys, duplicate keys and malformed values are errors that
carry the offending line number and key. :meth:`RunConfig.to_text` writes
every field, and parsing that text gives back an equal configuration.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .decay_lab import OBSERVABLES, ProfileSpec
from .hermite import MultiIndex

__all__ = ["ConfigError", "ProfileConfig", "RunConfig", "bundled_config", "load_config"]


class ConfigError(ValueError):
    """Malformed configuration text."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _parse_float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"non-finite number {text!r}")
    return v


def _parse_int(text: str) -> int:
    return int(text)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {text!r}")
    return _parse_float(parts[0]), _parse_float(parts[1])


def _fmt_pair(p) -> str:
    return f"{_fmt_float(p[0])}, {_fmt_float(p[1])}"


def _parse_modes(text: str):
    """``all`` or ``k;k*scale;...`` with each k a comma-separated multi-index."""
    if text.strip().lower() == "all":
        return None
    modes = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        idx, _, scale = item.partition("*")
        k = MultiIndex(tuple(int(c) for c in idx.split(",")))
        modes.append((k, _parse_float(scale) if scale else 1.0))
    if not modes:
        raise ValueError("empty mode list")
    return tuple(modes)


def _fmt_modes(modes) -> str:
    if modes is None:
        return "all"
    return "; ".join(",".join(str(c) for c in k.k) + f"*{_fmt_float(s)}" for k, s in modes)


@dataclass(frozen=True)
class ProfileConfig:
    kind: str = "flat"
    amplitude: float = 1.0
    support: tuple[float, float] = (0.0, 0.125)
    sigma: float = 0.0
    modes: tuple | None = None

    def spec(self, target: str) -> ProfileSpec:
        return ProfileSpec(self.kind, self.amplitude, self.support, self.sigma, target, self.modes)


_PROFILE_CODECS = {
    "kind": (str.strip, str),
    "amplitude": (_parse_float, _fmt_float),
    "support": (_parse_pair, _fmt_pair),
    "sigma": (_parse_float, _fmt_float),
    "modes": (_parse_modes, _fmt_modes),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs, keyed exactly as in the text format."""

    n: int = 1
    plancherel_constant: float | None = None
    lambda_min: float = 1e-7
    lambda_max: float = 0.125
    panels: int = 36
    points: int = 8
    symmetric: bool = True
    k_max: int = 32
    l_max: int = 0
    u0: ProfileConfig = field(default_factory=ProfileConfig)
    u1: ProfileConfig = field(default_factory=lambda: ProfileConfig(kind="zero"))
    times_start: float = 1.0
    times_stop: float = 1000.0
    times_count: int = 32
    times_spacing: str = "log"
    fit_window: tuple[float, float] = (100.0, 1000.0)
    tol: dict = field(default_factory=lambda: {"u": 0.05, "gradu": 0.05, "dtu": 0.10, "Tu": 0.10})
    regularity: str = "L1_and_L2"
    bound_factor: float = 1.05
    gft_function: str = "gaussian"
    gft_half_width: float = 8.6
    gft_points: int = 8
    gft_refine: float = 1.0
    gft_check_nodes: int = 6
    gft_tol: float = 1e-6
    gft_gap: float = 0.02

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("must be a positive integer", key="group.n")
        if not 0 < self.lambda_min < self.lambda_max:
            raise ConfigError("need 0 < grid.lambda_min < grid.lambda_max", key="grid.lambda_min")
        if self.panels < 1 or self.points < 1:
            raise ConfigError("panels and points must be positive", key="grid.panels")
        if self.k_max < 0 or self.l_max < 0:
            raise ConfigError("truncations must be non-negative", key="trunc.k_max")
        if self.times_spacing not in ("log", "linear"):
            raise ConfigError("must be 'log' or 'linear'", key="times.spacing")
        if self.times_count < 1 or not 0 <= self.times_start <= self.times_stop:
            raise ConfigError("need count >= 1 and 0 <= start <= stop", key="times.count")
        if self.times_spacing == "log" and self.times_start <= 0:
            raise ConfigError("log spacing needs a positive start", key="times.start")
        if self.regularity not in ("L1_and_L2", "L2_only"):
            raise ConfigError("must be L1_and_L2 or L2_only", key="check.regularity")
        if self.gft_function not in ("gaussian", "zero"):
            raise ConfigError("must be 'gaussian' or 'zero'", key="gft.function")

    def times(self):
        import numpy as np

        if self.times_spacing == "log":
            return np.geomspace(self.times_start, self.times_stop, self.times_count)
        return np.linspace(self.times_start, self.times_stop, self.times_count)

    def to_text(self) -> str:
        lines = []
        for key, (attr, _, fmt) in _FLAT_KEYS.items():
            value = getattr(self, attr)
            if value is None:
                continue
            lines.append(f"{key} = {fmt(value)}")
        for which in ("u0", "u1"):
            prof = getattr(self, which)
            for name, (_, fmt) in _PROFILE_CODECS.items():
                lines.append(f"{which}.{name} = {fmt(getattr(prof, name))}")
        for name in OBSERVABLES:
            lines.append(f"tol.{name} = {_fmt_float(self.tol[name])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RunConfig:
        seen: dict[str, int] = {}
        kwargs: dict = {}
        profiles = {"u0": {}, "u1": {}}
        tol = dict(cls().tol)
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("expected 'key = value'", line=lineno)
            key, _, value = (part.strip() for part in line.partition("="))
            if not key:
                raise ConfigError("missing key", line=lineno)
            if key in seen:
                raise ConfigError(f"duplicate key (first set on line {seen[key]})", lineno, key)
            seen[key] = lineno
            section, _, name = key.partition(".")
            try:
                if key in _FLAT_KEYS:
                    attr, parse, _ = _FLAT_KEYS[key]
                    kwargs[attr] = parse(value)
                elif section in profiles and name in _PROFILE_CODECS:
                    profiles[section][name] = _PROFILE_CODECS[name][0](value)
                elif section == "tol" and name in OBSERVABLES:
                    tol[name] = _parse_float(value)
                else:
                    raise ConfigError("unknown key", lineno, key)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(str(exc), lineno, key) from None
        for which, vals in profiles.items():
            base = cls().u1 if which == "u1" else ProfileConfig()
            kwargs[which] = dataclasses.replace(base, **vals)
        kwargs["tol"] = tol
        try:
            return cls(**kwargs)
        except ConfigError as exc:
            if exc.key in seen:
                raise ConfigError(str(exc).split(": ", 1)[-1], seen[exc.key], exc.key) from None
            raise


_FLAT_KEYS = {
    "group.n": ("n", _parse_int, str),
    "group.plancherel_constant": ("plancherel_constant", _parse_float, _fmt_float),
    "grid.lambda_min": ("lambda_min", _parse_float, _fmt_float),
    "grid.lambda_max": ("lambda_max", _parse_float, _fmt_float),
    "grid.panels": ("panels", _parse_int, str),
    "grid.points": ("points", _parse_int, str),
    "grid.symmetric": ("symmetric", _parse_bool, lambda b: "true" if b else "false"),
    "trunc.k_max": ("k_max", _parse_int, str),
    "trunc.l_max": ("l_max", _parse_int, str),
    "times.start": ("times_start", _parse_float, _fmt_float),
    "times.stop": ("times_stop", _parse_float, _fmt_float),
    "times.count": ("times_count", _parse_int, str),
    "times.spacing": ("times_spacing", str.strip, str),
    "fit.window": ("fit_window", _parse_pair, _fmt_pair),
    "check.regularity": ("regularity", str.strip, str),
    "check.bound_factor": ("bound_factor", _parse_float, _fmt_float),
    "gft.function": ("gft_function", str.strip, str),
    "gft.half_width": ("gft_half_width", _parse_float, _fmt_float),
    "gft.points": ("gft_points", _parse_int, str),
    "gft.refine": ("gft_refine", _parse_float, _fmt_float),
    "gft.check_nodes": ("gft_check_nodes", _parse_int, str),
    "gft.tol": ("gft_tol", _parse_float, _fmt_float),
    "gft.gap": ("gft_gap", _parse_float, _fmt_float),
}

_CONFIG_DIR = Path(__file__).parent / "configs"


def bundled_config(name: str) -> Path:
    """Path of a configuration shipped with the package (``name`` without ``.cfg``)."""
    path = _CONFIG_DIR / f"{name.removesuffix('.cfg')}.cfg"
    if not path.is_file():
        known = sorted(p.stem for p in _CONFIG_DIR.glob("*.cfg"))
        raise FileNotFoundError(f"no bundled config {name!r}; available: {', '.join(known)}")
    return path


def load_config(path_or_name) -> RunConfig:
    """Read a config file; a bare name without a path separator may name a bundled config."""
    path = Path(path_or_name)
    if not path.exists() and path.parent == Path(".") and path.suffix in ("", ".cfg"):
        path = bundled_config(path.name)
    return RunConfig.from_text(path.read_text(encoding="utf-8"))
