"""Hermite functions, oscillator ladder algebra and Gauss-Hermite rules.

Hermite functions are evaluated through the normalized three-term
recurrence on psi_m itself. The recurrence carries a per-point log scale so
that neither the polynomial H_m nor the normalization a_m is ever formed,
which keeps psi_m finite (and correct) far outside the range where
``a_m * H_m(x) * exp(-x**2 / 2)`` would overflow or underflow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "MultiIndex",
    "QuadratureError",
    "QuadratureRule",
    "apply_ladder",
    "eigenvalue",
    "gauss_hermite",
    "hermite_e",
    "hermite_function",
    "hermite_functions",
    "ladder_derivative",
    "ladder_multiply",
    "multi_indices",
]

_PI_QUARTER = math.pi ** -0.25
_BIG = 2.0 ** 400
_LOG_BIG = math.log(_BIG)


class QuadratureError(RuntimeError):
    """Raised when Gauss-Hermite nodes cannot be resolved to tolerance."""


def _scaled_recurrence(m_max, x):
    """Yield ``(m, mantissa, log_scale)`` with psi_m(x) = mantissa * exp(log_scale)."""
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.full_like(x, _PI_QUARTER)
    log_scale = -0.5 * x * x
    yield 0, cur, log_scale
    for m in range(m_max):
        nxt = x * math.sqrt(2.0 / (m + 1)) * cur - math.sqrt(m / (m + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _BIG
        if big.any():
            cur = np.where(big, cur / _BIG, cur)
            prev = np.where(big, prev / _BIG, prev)
            log_scale = log_scale + np.where(big, _LOG_BIG, 0.0)
        yield m + 1, cur, log_scale


def _unscale(mantissa, log_scale):
    with np.errstate(under="ignore", over="ignore"):
        return mantissa * np.exp(log_scale)


def hermite_function(m: int, x):
    """Normalized Hermite function psi_m evaluated at ``x`` (scalar or array).

    psi_m(x) = (sqrt(pi) 2^m m!)^(-1/2) H_m(x) exp(-x^2/2) with the
    physicists' polynomials H_m = (-1)^m e^{x^2} (d/dx)^m e^{-x^2}.
    """
    if m < 0:
        raise ValueError(f"Hermite order must be non-negative, got {m}")
    scalar = np.ndim(x) == 0
    for _, cur, log_scale in _scaled_recurrence(m, x):
        pass
    out = _unscale(cur, log_scale)
    return float(out) if scalar else out


def hermite_functions(m_max: int, x):
    """All psi_0 ... psi_{m_max} at ``x``; result has shape ``(m_max + 1,) + x.shape``."""
    if m_max < 0:
        raise ValueError(f"Hermite order must be non-negative, got {m_max}")
    x = np.asarray(x, dtype=float)
    out = np.empty((m_max + 1,) + x.shape)
    for m, cur, log_scale in _scaled_recurrence(m_max, x):
        out[m] = _unscale(cur, log_scale)
    return out


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Multi-index k in N^n labelling the oscillator eigenfunction e_k."""

    k: tuple[int, ...]

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if not k:
            raise ValueError("a multi-index needs at least one component")
        if any(v < 0 for v in k):
            raise ValueError(f"multi-index components must be >= 0, got {k}")
        object.__setattr__(self, "k", k)

    @classmethod
    def of(cls, *components: int) -> MultiIndex:
        return cls(tuple(components))

    @classmethod
    def zero(cls, n: int) -> MultiIndex:
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def order(self) -> int:
        """|k|, the sum of the components."""
        return sum(self.k)

    @property
    def eigenvalue(self) -> int:
        return 2 * self.order + self.n

    def __getitem__(self, j: int) -> int:
        return self.k[j]

    def shifted(self, j: int, step: int) -> MultiIndex | None:
        """k + step * eps_j, or None when a component would go negative."""
        if not 0 <= j < self.n:
            raise IndexError(f"direction {j} outside 0..{self.n - 1}")
        kj = self.k[j] + step
        if kj < 0:
            return None
        return MultiIndex(self.k[:j] + (kj,) + self.k[j + 1:])

    def __repr__(self) -> str:
        return f"MultiIndex{self.k}"


def eigenvalue(k: MultiIndex) -> int:
    """Oscillator eigenvalue mu_k = 2|k| + n of e_k."""
    return k.eigenvalue


def multi_indices(n: int, k_max: int) -> list[MultiIndex]:
    """All k in N^n with |k| <= k_max, graded by |k| then lexicographically."""
    if n < 1 or k_max < 0:
        raise ValueError(f"need n >= 1 and k_max >= 0, got n={n}, k_max={k_max}")
    out = []
    for order in range(k_max + 1):
        shell = [c for c in itertools.product(range(order + 1), repeat=n) if sum(c) == order]
        out.extend(MultiIndex(c) for c in sorted(shell, reverse=True))
    return out


def _ladder(k: MultiIndex, j: int, sign: float) -> list[tuple[MultiIndex, float]]:
    pairs = []
    lower = k.shifted(j, -1)
    if lower is not None:
        pairs.append((lower, math.sqrt(k[j] / 2.0)))
    pairs.append((k.shifted(j, +1), sign * math.sqrt((k[j] + 1) / 2.0)))
    return pairs


def ladder_derivative(k: MultiIndex, j: int) -> list[tuple[MultiIndex, float]]:
    """Expansion of d/dw_j e_k in the Hermite basis.

    ``j`` is a zero-based direction. Returns ``[(k - eps_j, sqrt(k_j/2)),
    (k + eps_j, -sqrt((k_j+1)/2))]``, dropping the first pair when ``k_j == 0``.
    The upper coefficient grows with k_j; it follows from
    a_k / a_{k+1} = sqrt(2(k+1)) for the normalizations of psi_k.
    """
    return _ladder(k, j, -1.0)


def ladder_multiply(k: MultiIndex, j: int) -> list[tuple[MultiIndex, float]]:
    """Expansion of w_j e_k; same shape as :func:`ladder_derivative` with a + sign."""
    return _ladder(k, j, +1.0)


def apply_ladder(coeffs: dict[MultiIndex, float], j: int, op: str) -> dict[MultiIndex, float]:
    """Apply ``d/dw_j`` (``op="d"``) or ``w_j`` (``op="w"``) to a finite expansion."""
    ladder = {"d": ladder_derivative, "w": ladder_multiply}[op]
    out: dict[MultiIndex, float] = {}
    for k, c in coeffs.items():
        for target, a in ladder(k, j):
            out[target] = out.get(target, 0.0) + a * c
    return out


def hermite_e(k: MultiIndex, w):
    """Multidimensional Hermite function e_k(w); ``w`` has trailing axis of length n."""
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != k.n:
        raise ValueError(f"points have dimension {w.shape[-1]}, multi-index has n={k.n}")
    out = np.ones(w.shape[:-1])
    for j, kj in enumerate(k.k):
        out = out * hermite_function(kj, w[..., j])
    return out


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the weight exp(-x^2).

    ``scaled_weights`` are ``weights * exp(nodes**2)``; they stay finite for
    large rules where the plain weights underflow, and are the right
    weights for integrands that already contain their own Gaussian decay.
    """

    nodes: np.ndarray
    weights: np.ndarray
    scaled_weights: np.ndarray

    @property
    def count(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> float:
        """Sum of ``weights * values`` (approximates the integral against exp(-x^2))."""
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def _gauss_hermite(count: int) -> QuadratureRule:
    # Golub-Welsch eigenvalues give starting nodes good to ~1e-13; Newton on
    # the normalized recurrence then polishes them.
    off = np.sqrt(np.arange(1, count) / 2.0)
    x = np.sort(eigh_tridiagonal(np.zeros(count), off, eigvals_only=True))
    for _ in range(20):
        psi_n = hermite_function(count, x)
        psi_nm1 = hermite_function(count - 1, x)
        dx = psi_n / (math.sqrt(2.0 * count) * psi_nm1 - x * psi_n)
        x = x - dx
        if np.all(np.abs(dx) <= 1e-14 * np.maximum(1.0, np.abs(x))):
            break
    else:
        raise QuadratureError(
            f"Gauss-Hermite({count}) Newton did not converge; "
            f"max node step {np.max(np.abs(dx)):.3e}"
        )
    if count % 2 == 1:
        x[count // 2] = 0.0
    x = 0.5 * (x - x[::-1])  # enforce exact symmetry
    if np.any(np.diff(x) <= 0):
        raise QuadratureError(f"Gauss-Hermite({count}) nodes are not strictly increasing")
    scaled = 1.0 / (count * hermite_function(count - 1, x) ** 2)
    with np.errstate(under="ignore"):
        weights = scaled * np.exp(-x * x)
    for arr in (x, weights, scaled):
        arr.setflags(write=False)
    return QuadratureRule(nodes=x, weights=weights, scaled_weights=scaled)


def gauss_hermite(count: int) -> QuadratureRule:
    """``count``-point Gauss-Hermite rule, exact to polynomial degree 2*count - 1."""
    if count < 1:
        raise ValueError(f"rule needs at least one node, got {count}")
    if count == 1:
        return QuadratureRule(
            nodes=np.zeros(1), weights=np.array([math.sqrt(math.pi)]),
            scaled_weights=np.array([math.sqrt(math.pi)]),
        )
    return _gauss_hermite(int(count))
