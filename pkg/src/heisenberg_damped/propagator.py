"""Closed-form evolution of a single frequency mode of the damped wave equation.

Each coefficient v(t) = u_hat(t, lambda)_{k,l} solves

    v'' + v' + z v = 0,   z = mu_k |lambda|,

whose characteristic roots -1/2 +- sqrt(1/4 - z) are real (elliptic, 4z < 1),
double (degenerate, 4z = 1) or complex (hyperbolic, 4z > 1). The three
regimes are evaluated through one analytic pair

    F = C(beta^2 t^2),  G = t S(beta^2 t^2),  beta^2 = 1/4 - z,

with C(u) = cosh(sqrt u), S(u) = sinh(sqrt u)/sqrt u continued to u < 0 as
cos/sin, and short Taylor series for |u| < 1e-6 so the double root is not a
seam. Everything here is vectorized over numpy arrays of ``t`` and ``z``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEGENERATE_BAND",
    "SERIES_RADIUS",
    "ModeParams",
    "ModeState",
    "Regime",
    "classify_regime",
    "damped_fg",
    "energy",
    "evolve",
    "evolve_mode",
    "fg",
]

SERIES_RADIUS = 1e-6
DEGENERATE_BAND = 1e-6


class Regime(enum.Enum):
    ELLIPTIC = "elliptic"
    DEGENERATE = "degenerate"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class ModeParams:
    """Frequency lambda and oscillator eigenvalue mu of one mode."""

    lam: float
    mu: float

    def __post_init__(self):
        if self.lam == 0 or not np.isfinite(self.lam):
            raise ValueError(f"lambda must be finite and nonzero, got {self.lam}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")

    @property
    def z(self) -> float:
        return self.mu * abs(self.lam)

    @classmethod
    def from_z(cls, z: float) -> ModeParams:
        return cls(lam=1.0, mu=z)


@dataclass(frozen=True)
class ModeState:
    v: complex
    v_dot: complex


def _as_z(p):
    return p.z if isinstance(p, ModeParams) else p


def classify_regime(p) -> Regime:
    z = _as_z(p)
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")
    gap = 4.0 * z - 1.0
    if gap > DEGENERATE_BAND:
        return Regime.HYPERBOLIC
    if gap < -DEGENERATE_BAND:
        return Regime.ELLIPTIC
    return Regime.DEGENERATE


def _series_cs(u):
    c = 1.0 + u * (1 / 2 + u * (1 / 24 + u / 720))
    s = 1.0 + u * (1 / 6 + u * (1 / 120 + u / 5040))
    return c, s


def fg(t, p):
    """The pair (F, G) with F = dG/dt, G(0) = 0, F(0) = 1.

    ``p`` is a :class:`ModeParams` or the product z = mu |lambda| (array ok).
    No damping factor is applied, so F and G grow like exp(t/2) in the
    elliptic regime; use :func:`damped_fg` for long times.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(_as_z(p), dtype=float)
    t, z = np.broadcast_arrays(t, z)
    beta2 = 0.25 - z
    u = beta2 * t * t
    small = np.abs(u) < SERIES_RADIUS
    c, s = _series_cs(np.where(small, u, 0.0))
    r = np.sqrt(np.abs(np.where(small, 1.0, u)))
    with np.errstate(over="ignore"):
        c_big = np.where(u > 0, np.cosh(r), np.cos(r))
        s_big = np.where(u > 0, np.sinh(r), np.sin(r)) / r
    F = np.where(small, c, c_big)
    G = t * np.where(small, s, s_big)
    if F.ndim == 0:
        return float(F), float(G)
    return F, G


def damped_fg(t, p):
    """exp(-t/2) times (F, G, F - G/2), each computed without cancellation.

    The third entry is the coefficient of v1 in v'(t). In the elliptic regime
    the growing and decaying exponentials are split explicitly, using
    beta - 1/2 = -z / (1/2 + beta), so small z keeps full relative accuracy.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(_as_z(p), dtype=float)
    t, z = np.broadcast_arrays(t, z)
    beta2 = 0.25 - z
    u = beta2 * t * t
    damp = np.exp(-0.5 * t)
    small = np.abs(u) < SERIES_RADIUS
    ell = (u > 0) & ~small
    hyp = (u < 0) & ~small

    eF = np.empty_like(t)
    eG = np.empty_like(t)
    eH = np.empty_like(t)

    if small.any():
        c, s = _series_cs(u[small])
        ts = t[small]
        eF[small] = damp[small] * c
        eG[small] = damp[small] * ts * s
        eH[small] = damp[small] * (c - 0.5 * ts * s)
    if ell.any():
        b = np.sqrt(beta2[ell])
        te = t[ell]
        ze = z[ell]
        slow = np.exp(-ze / (0.5 + b) * te)  # exp((beta - 1/2) t)
        fast = np.exp(-(0.5 + b) * te)
        eF[ell] = 0.5 * (slow + fast)
        eG[ell] = slow * (-np.expm1(-2.0 * b * te)) / (2.0 * b)
        # F - G/2 = slow (1/2 - 1/(4b)) + fast (1/2 + 1/(4b)), 1/2 - 1/(4b) = -z/((1/2+b) 2b)
        eH[ell] = -slow * ze / ((0.5 + b) * 2.0 * b) + fast * (0.5 + 0.25 / b)
    if hyp.any():
        w = np.sqrt(-beta2[hyp])
        th = t[hyp]
        cos = np.cos(w * th)
        sin_w = np.sin(w * th) / w
        eF[hyp] = damp[hyp] * cos
        eG[hyp] = damp[hyp] * sin_w
        eH[hyp] = damp[hyp] * (cos - 0.5 * sin_w)

    if eF.ndim == 0:
        return float(eF), float(eG), float(eH)
    return eF, eG, eH


def evolve(t, z, v0, v1):
    """Vectorized mode evolution; returns ``(v(t), v'(t))`` as arrays.

    v(t)  = e^{-t/2} [ v0 F + (v0/2 + v1) G ]
    v'(t) = e^{-t/2} [ -z G v0 + (F - G/2) v1 ]
    """
    z = np.asarray(z, dtype=float)
    eF, eG, eH = damped_fg(t, z)
    v0 = np.asarray(v0)
    v1 = np.asarray(v1)
    v = eF * v0 + eG * (0.5 * v0 + v1)
    v_dot = -z * eG * v0 + eH * v1
    return v, v_dot


def evolve_mode(t: float, p, v0: complex, v1: complex) -> ModeState:
    """State (v, v') of one mode at time ``t >= 0`` from data (v0, v1)."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    v, v_dot = evolve(t, _as_z(p), complex(v0), complex(v1))
    return ModeState(complex(v), complex(v_dot))


def energy(z, v, v_dot):
    """E = |v'|^2 / 2 + z |v|^2 / 2; dE/dt = -|v'|^2 along solutions."""
    return 0.5 * np.abs(v_dot) ** 2 + 0.5 * z * np.abs(v) ** 2
