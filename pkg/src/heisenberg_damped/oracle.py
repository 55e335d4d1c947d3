"""Independent check on the closed-form propagator: adaptive time stepping.

The projected mode equation v'' + v' + z v = 0 is integrated as the real
first-order system (Re v, Re v', Im v, Im v') with the Dormand-Prince
8(5,3) embedded pair and a PI step-size controller. Error is measured
norm-wise against the current state size, so accuracy stays relative even
after the state has decayed by many orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from . import _dop853 as tab
from .propagator import ModeParams, ModeState

__all__ = ["IntegratorConfig", "OracleError", "OracleRefused", "integrate_mode", "Z_MAX"]

Z_MAX = 1e4


class OracleError(RuntimeError):
    """Step budget exhausted before reaching the requested time."""

    def __init__(self, message: str, achieved_time: float):
        super().__init__(message)
        self.achieved_time = achieved_time


class OracleRefused(ValueError):
    """The requested mode is outside the range the oracle is meant for."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances for :func:`integrate_mode`.

    ``abs_tol`` is added to the error scale; the default 0 gives pure
    norm-wise relative control.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 0.0
    max_steps: int = 5_000_000

    def __post_init__(self):
        if not self.rel_tol >= 1e-14:
            raise ValueError(f"rel_tol must be >= 1e-14, got {self.rel_tol}")
        if self.abs_tol != 0.0 and not self.abs_tol >= 1e-14:
            raise ValueError(f"abs_tol must be 0 or >= 1e-14, got {self.abs_tol}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


@numba.njit(cache=True)
def _rhs(z, y, out):
    out[0] = y[1]
    out[1] = -y[1] - z * y[0]
    out[2] = y[3]
    out[3] = -y[3] - z * y[2]


@numba.njit(cache=True)
def _dop853(t_end, z, y0, rtol, atol, max_steps, A, B, E3, E5):
    n_stages = 12
    y = y0.copy()
    K = np.zeros((n_stages, 4))
    ys = np.zeros(4)
    y_new = np.zeros(4)
    t = 0.0
    steps = 0
    if t_end == 0.0:
        return y, t, steps
    # initial step: resolve the fastest time scale of the system
    h = min(t_end, 0.05 / (1.0 + math.sqrt(z)))
    err_prev = 1e-4
    while t < t_end:
        if steps >= max_steps:
            return y, t, -1
        if t + h > t_end:
            h = t_end - t
        for s in range(n_stages):
            for i in range(4):
                acc = y[i]
                for j in range(s):
                    acc += h * A[s, j] * K[j, i]
                ys[i] = acc
            _rhs(z, ys, K[s])
        scale = 0.0
        for i in range(4):
            acc = y[i]
            for s in range(n_stages):
                acc += h * B[s] * K[s, i]
            y_new[i] = acc
            scale = max(scale, abs(y[i]), abs(acc))
        scale = atol + rtol * scale
        err5 = 0.0
        err3 = 0.0
        for i in range(4):
            a5 = 0.0
            a3 = 0.0
            for s in range(n_stages):
                a5 += E5[s] * K[s, i]
                a3 += E3[s] * K[s, i]
            err5 += (a5 / scale) ** 2
            err3 += (a3 / scale) ** 2
        denom = err5 + 0.01 * err3
        err = 0.0 if denom == 0.0 else abs(h) * err5 / math.sqrt(denom * 4.0)
        if err <= 1.0:
            t += h
            for i in range(4):
                y[i] = y_new[i]
            steps += 1
            if err == 0.0:
                fac = 10.0
            else:
                fac = 0.9 * err ** (-0.7 / 8.0) * err_prev ** (0.4 / 8.0)
            h *= min(10.0, max(0.2, fac))
            err_prev = max(err, 1e-4)
        else:
            h *= max(0.2, 0.9 * err ** (-1.0 / 8.0))
    return y, t, steps


def integrate_mode(t: float, p, v0: complex, v1: complex,
                   cfg: IntegratorConfig | None = None) -> ModeState:
    """Numerically integrate one mode from (v0, v1) at time 0 to time ``t``."""
    cfg = cfg or IntegratorConfig()
    z = p.z if isinstance(p, ModeParams) else float(p)
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")
    if z > Z_MAX:
        raise OracleRefused(f"z = {z:g} exceeds {Z_MAX:g}; use the closed-form propagator")
    v0 = complex(v0)
    v1 = complex(v1)
    y0 = np.array([v0.real, v1.real, v0.imag, v1.imag])
    y, reached, steps = _dop853(float(t), z, y0, cfg.rel_tol, cfg.abs_tol, cfg.max_steps,
                                tab.A, tab.B, tab.E3, tab.E5)
    if steps < 0:
        raise OracleError(
            f"step budget of {cfg.max_steps} exhausted at t = {reached:.6g} of {t:.6g} (z = {z:g})",
            achieved_time=float(reached),
        )
    return ModeState(complex(y[0], y[2]), complex(y[1], y[3]))
