"""Decay experiments: synthetic frequency data, evolved norms and fitted rates.

Data classes are modelled by their behaviour near lambda = 0, which is what
drives the large-time rates. A flat profile (coefficients bounded as
lambda -> 0) stands in for L^1 data, because an integrable function has a
transform bounded in operator norm at every lambda. Bandlimited and power
profiles stand in for data that are only square integrable.

Each mode evolves exactly through the closed-form propagator, and norms are
Plancherel integrals over the frequency grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .group import GroupParams
from .hermite import MultiIndex, multi_indices
from .plancherel import CoefficientField, FrequencyGrid, weighted_norm
from .propagator import evolve

__all__ = [
    "OBSERVABLES",
    "DecayReport",
    "FitResult",
    "NormSeries",
    "ProfileError",
    "ProfileSpec",
    "TheoremCheck",
    "expected_slopes",
    "fit_decay_exponent",
    "make_report",
    "run_scenario",
    "synth_field",
    "verify_theorem",
]

OBSERVABLES = ("u", "gradu", "dtu", "Tu")

# (lambda exponent a, mu exponent b) of the Plancherel weight for each observable;
# dtu uses (0, 0) on the time-derivative field
_WEIGHTS = {"u": (0, 0), "gradu": (1, 1), "Tu": (2, 0), "dtu": (0, 0)}

# L^2-only data: norm(t) (1+t)^rate stays bounded
_L2_RATES = {"u": 0.0, "gradu": 0.5, "dtu": 1.0}


class ProfileError(ValueError):
    """A profile that does not define a square-integrable field."""


@dataclass(frozen=True)
class ProfileSpec:
    """Frequency profile of one initial datum on a single column l = 0.

    ``modes`` lists ``(k, scale)`` pairs; ``None`` means every k in the
    lattice with scale 1. ``kind`` is one of ``flat``, ``bandlimited``,
    ``power`` or ``zero``.
    """

    kind: str = "flat"
    amplitude: float = 1.0
    support: tuple[float, float] = (0.0, 0.125)
    sigma: float = 0.0
    target: str = "u0"
    modes: tuple[tuple[MultiIndex, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("flat", "bandlimited", "power", "zero"):
            raise ProfileError(f"unknown profile kind {self.kind!r}")
        lo, hi = self.support
        if not 0 <= lo < hi:
            raise ProfileError(f"support must satisfy 0 <= lo < hi, got {self.support}")
        if self.target not in ("u0", "u1"):
            raise ProfileError(f"target must be u0 or u1, got {self.target!r}")


def _profile(spec: ProfileSpec, lam_abs: np.ndarray, n: int) -> np.ndarray:
    lo, hi = spec.support
    inside = (lam_abs >= lo) & (lam_abs <= hi)
    if spec.kind == "zero":
        return np.zeros_like(lam_abs)
    if spec.kind == "flat":
        return np.where(inside, spec.amplitude, 0.0)
    if spec.kind == "power":
        if lo == 0 and spec.sigma <= -(n + 1) / 2:
            raise ProfileError(
                f"|lambda|^{spec.sigma} is not square integrable against |lambda|^{n} near 0")
        with np.errstate(divide="ignore"):
            return np.where(inside, spec.amplitude * lam_abs ** spec.sigma, 0.0)
    # smooth bump vanishing to all orders at both ends of the support
    s = np.clip((2.0 * lam_abs - lo - hi) / (hi - lo), -1.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        bump = np.where(np.abs(s) < 1.0, np.exp(1.0 - 1.0 / (1.0 - s * s)), 0.0)
    return spec.amplitude * bump


def synth_field(spec: ProfileSpec, grid: FrequencyGrid, k_max: int, l_max: int = 0) -> CoefficientField:
    """Coefficient field with value profile(|lambda|) * scale_k in column l = 0."""
    fld = CoefficientField.zeros(grid, k_max, l_max)
    values = np.zeros(fld.values.shape, dtype=complex)
    prof = _profile(spec, np.abs(grid.nodes), grid.n)
    modes = spec.modes
    if modes is None:
        values[:, :, 0] = prof[:, None]
    else:
        for k, scale in modes:
            if k.n != grid.n:
                raise ProfileError(f"mode {k} does not have dimension n = {grid.n}")
            if k not in fld.k_position:
                raise ProfileError(f"mode {k} lies outside |k| <= {k_max}")
            values[:, fld.k_position[k], 0] += scale * prof
    return fld.with_values(values)


@dataclass(frozen=True)
class NormSeries:
    """Norms of u, grad_hor u, d_t u and T u at increasing times."""

    times: np.ndarray
    norms: dict
    params: GroupParams
    k_max: int
    l_max: int
    grid_size: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __getitem__(self, observable: str) -> np.ndarray:
        return self.norms[observable]


def run_scenario(u0: CoefficientField, u1: CoefficientField, times) -> NormSeries:
    """Evolve every mode of (u0, u1) and record the four norm observables."""
    if u0.grid is not u1.grid and not (
        np.array_equal(u0.grid.nodes, u1.grid.nodes) and np.array_equal(u0.grid.weights, u1.grid.weights)
    ):
        raise ValueError("u0 and u1 live on different frequency grids")
    if (u0.k_max, u0.l_max) != (u1.k_max, u1.l_max):
        raise ValueError("u0 and u1 have different truncations")
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    z = u0.mu[None, :, None] * np.abs(u0.grid.nodes)[:, None, None]
    z = np.broadcast_to(z, u0.values.shape)
    norms = {name: np.empty(len(times)) for name in OBSERVABLES}
    for i, t in enumerate(times):
        v, v_dot = evolve(t, z, u0.values, u1.values)
        fu = u0.with_values(v)
        fd = u0.with_values(v_dot)
        for name in ("u", "gradu", "Tu"):
            norms[name][i] = weighted_norm(fu, *_WEIGHTS[name])
        norms["dtu"][i] = weighted_norm(fd, *_WEIGHTS["dtu"])
    return NormSeries(times, norms, u0.grid.params, u0.k_max, u0.l_max, len(u0.grid))


@dataclass(frozen=True)
class FitResult:
    observable: str
    slope: float
    intercept: float
    stderr: float
    window: tuple[float, float]
    expected: float | None = None
    tol: float | None = None

    @property
    def passed(self) -> bool | None:
        if self.expected is None or self.tol is None:
            return None
        return abs(self.slope - self.expected) <= self.tol


def fit_decay_exponent(series: NormSeries, observable: str, window=(1e2, 1e3)) -> FitResult:
    """Least-squares slope of log(norm) against log(1 + t) on the time window."""
    lo, hi = window
    times = series.times
    sel = (times >= lo) & (times <= hi)
    if sel.sum() < 8:
        raise ValueError(f"fit window {window} holds {sel.sum()} samples; at least 8 are needed")
    values = series[observable][sel]
    if np.any(~(values > 0)):
        raise ValueError(f"{observable} norm is not positive inside the fit window")
    res = stats.linregress(np.log1p(times[sel]), np.log(values))
    return FitResult(observable, float(res.slope), float(res.intercept), float(res.stderr), (lo, hi))


def expected_slopes(params: GroupParams) -> dict:
    """Decay exponents for data in L^1 and L^2: -Q/4 with offsets 0, -1/2, -1, -1."""
    q4 = params.Q / 4.0
    return {"u": -q4, "gradu": -q4 - 0.5, "dtu": -q4 - 1.0, "Tu": -q4 - 1.0}


DEFAULT_TOLS = {"u": 0.05, "gradu": 0.05, "dtu": 0.10, "Tu": 0.10}


@dataclass(frozen=True)
class DecayReport:
    series: NormSeries
    fits: dict
    window: tuple[float, float]

    def rows(self):
        for name in OBSERVABLES:
            yield self.fits[name]


def make_report(series: NormSeries, window=(1e2, 1e3), tols: dict | None = None) -> DecayReport:
    tols = {**DEFAULT_TOLS, **(tols or {})}
    expected = expected_slopes(series.params)
    fits = {}
    for name in OBSERVABLES:
        fit = fit_decay_exponent(series, name, window)
        fits[name] = FitResult(name, fit.slope, fit.intercept, fit.stderr, fit.window,
                               expected[name], tols[name])
    return DecayReport(series, fits, tuple(window))


@dataclass(frozen=True)
class TheoremCheck:
    regularity: str
    passed: bool
    details: dict


def verify_theorem(report: DecayReport | NormSeries, params: GroupParams,
                   regularity: str = "L1_and_L2", bound_factor: float = 1.05,
                   calibration_time: float = 1.0) -> TheoremCheck:
    """Compare a scenario with the decay estimates for its data class.

    ``L1_and_L2`` requires a :class:`DecayReport` and checks each fitted
    slope against -Q/4, -Q/4 - 1/2, -Q/4 - 1, -Q/4 - 1 within its tolerance.
    ``L2_only`` checks upper bounds: norm(t) (1+t)^rate must stay below
    ``bound_factor`` times its value at ``calibration_time`` for every later
    sample, with rates 0, 1/2, 1 for u, grad_hor u, d_t u.
    """
    if regularity == "L1_and_L2":
        if not isinstance(report, DecayReport):
            raise TypeError("slope checks need a DecayReport")
        expected = expected_slopes(params)
        details = {}
        for name, fit in report.fits.items():
            ok = abs(fit.slope - expected[name]) <= fit.tol
            details[name] = {"slope": fit.slope, "expected": expected[name], "tol": fit.tol, "pass": ok}
        return TheoremCheck(regularity, all(d["pass"] for d in details.values()), details)
    if regularity == "L2_only":
        series = report.series if isinstance(report, DecayReport) else report
        times = series.times
        where = np.flatnonzero(np.isclose(times, calibration_time))
        if len(where) == 0:
            raise ValueError(f"series has no sample at the calibration time {calibration_time}")
        i0 = where[0]
        details = {}
        for name, rate in _L2_RATES.items():
            scaled = series[name][i0:] * (1.0 + times[i0:]) ** rate
            ref = scaled[0]
            worst = float(np.max(scaled) / ref) if ref > 0 else (0.0 if not np.any(scaled) else math.inf)
            details[name] = {"rate": rate, "worst_ratio": worst, "pass": worst <= bound_factor}
        return TheoremCheck(regularity, all(d["pass"] for d in details.values()), details)
    raise ValueError(f"unknown regularity class {regularity!r}")
