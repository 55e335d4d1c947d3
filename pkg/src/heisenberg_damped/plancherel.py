"""Frequency-side containers and the L^2 observables computed from them.

A :class:`CoefficientField` stores u_hat(lambda_i)_{k,l} on a lattice
(lambda nodes) x (|k| <= K) x (|l| <= L). Norms are Plancherel integrals

    ||u||^2 = c_n  sum_i w_i |lambda_i|^n  sum_{k,l} |u_hat(lambda_i)_{k,l}|^2

optionally weighted by |lambda|^a mu_k^b. Reductions use a fixed pairwise
order so repeated evaluations are bitwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import comb, zeta

from .group import GroupParams
from .hermite import MultiIndex, multi_indices

__all__ = [
    "CoefficientField",
    "FrequencyGrid",
    "GroupParams",
    "TailBound",
    "apply_Xj",
    "apply_Yj",
    "build_grid",
    "gauss_legendre_panels",
    "pairwise_sum",
    "tail_bound",
    "weighted_norm",
]


def pairwise_sum(values) -> float:
    """Deterministic pairwise (cascade) summation of a flat float array."""
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            a = np.append(a, 0.0)
        a = a[0::2] + a[1::2]
    return float(a[0])


def gauss_legendre_panels(edges, points: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on consecutive panels ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = np.polynomial.legendre.leggauss(points)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w
    return nodes.ravel(), weights.ravel()


@dataclass(frozen=True)
class FrequencyGrid:
    """Quadrature for d lambda on R \\ {0}; the |lambda|^n density is applied by norms."""

    nodes: np.ndarray
    weights: np.ndarray
    params: GroupParams

    def __post_init__(self):
        if np.any(self.nodes == 0):
            raise ValueError("frequency grid must exclude lambda = 0")
        if np.any(self.weights <= 0):
            raise ValueError("frequency weights must be positive")
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must have the same shape")

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def n(self) -> int:
        return self.params.n

    def integrate(self, values) -> float:
        """Plain d lambda quadrature of samples at the nodes."""
        return pairwise_sum(self.weights * np.asarray(values, dtype=float))


def build_grid(params: GroupParams, lambda_min: float, lambda_max: float,
               panels: int, pts_per_panel: int, symmetric: bool = True) -> FrequencyGrid:
    """Geometric panels on [lambda_min, lambda_max] with Gauss-Legendre points each.

    With ``symmetric`` the rule is mirrored to [-lambda_max, -lambda_min].
    """
    if not (0 < lambda_min < lambda_max) or not np.isfinite(lambda_max):
        raise ValueError(f"need 0 < lambda_min < lambda_max, got [{lambda_min}, {lambda_max}]")
    if panels < 1 or pts_per_panel < 1:
        raise ValueError("panels and pts_per_panel must be positive")
    edges = np.geomspace(lambda_min, lambda_max, panels + 1)
    edges[0], edges[-1] = lambda_min, lambda_max
    nodes, weights = gauss_legendre_panels(edges, pts_per_panel)
    if symmetric:
        nodes = np.concatenate([-nodes[::-1], nodes])
        weights = np.concatenate([weights[::-1], weights])
    return FrequencyGrid(nodes=nodes, weights=weights, params=params)


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Coefficients u_hat(lambda_i)_{k,l} with |k| <= k_max and |l| <= l_max.

    ``values`` has shape ``(len(grid), len(k_lattice), len(l_lattice))`` and
    is made read-only. ``truncation_loss`` records the squared norm of
    coefficients that fell outside the lattice when the field was produced
    by a ladder operator.
    """

    grid: FrequencyGrid
    k_max: int
    l_max: int
    values: np.ndarray
    truncation_loss: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        expected = (len(self.grid), len(self.k_lattice), len(self.l_lattice))
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape} does not match lattice {expected}")
        if not np.all(np.isfinite(values)):
            raise ValueError("coefficient values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.grid.n

    @cached_property
    def k_lattice(self) -> list[MultiIndex]:
        return multi_indices(self.grid.n, self.k_max)

    @cached_property
    def l_lattice(self) -> list[MultiIndex]:
        return multi_indices(self.grid.n, self.l_max)

    @cached_property
    def k_position(self) -> dict[MultiIndex, int]:
        return {k: i for i, k in enumerate(self.k_lattice)}

    @cached_property
    def mu(self) -> np.ndarray:
        return np.array([k.eigenvalue for k in self.k_lattice], dtype=float)

    @classmethod
    def zeros(cls, grid: FrequencyGrid, k_max: int, l_max: int) -> CoefficientField:
        nk = len(multi_indices(grid.n, k_max))
        nl = len(multi_indices(grid.n, l_max))
        return cls(grid, k_max, l_max, np.zeros((len(grid), nk, nl), dtype=complex))

    def with_values(self, values, truncation_loss: float = 0.0) -> CoefficientField:
        return CoefficientField(self.grid, self.k_max, self.l_max, values, truncation_loss)

    def coefficient(self, k: MultiIndex, l: MultiIndex) -> np.ndarray:
        """u_hat(.)_{k,l} across the frequency nodes."""
        return self.values[:, self.k_position[k], self.l_lattice.index(l)]

    def column_norms_squared(self) -> np.ndarray:
        """||u_hat(lambda_i) e_k||^2 = sum_l |u_{k,l}|^2, shape (nodes, k)."""
        return np.sum(np.abs(self.values) ** 2, axis=2)


def weighted_norm(fld: CoefficientField, a: float = 0.0, b: float = 0.0) -> float:
    """sqrt( c_n sum_i w_i |lambda_i|^(n+a) sum_{k,l} mu_k^b |u_{k,l}(lambda_i)|^2 ).

    (a, b) = (0, 0) gives ||u||, (1, 1) the horizontal gradient norm,
    (2, 0) the norm of T u and (1, 0) the T^(1/2) norm.
    """
    if a < 0 or b < 0:
        raise ValueError("weight exponents must be non-negative")
    grid = fld.grid
    lam = np.abs(grid.nodes)
    node_w = grid.weights * lam ** (grid.n + a)
    mode_w = fld.mu ** b
    terms = (node_w[:, None, None] * mode_w[None, :, None]) * np.abs(fld.values) ** 2
    return math.sqrt(grid.params.c_n * pairwise_sum(terms))


def _ladder_indices(fld: CoefficientField, j: int, out_k_max: int):
    if not 0 <= j < fld.n:
        raise IndexError(f"direction {j} outside 0..{fld.n - 1}")
    pos = fld.k_position
    out_lattice = multi_indices(fld.n, out_k_max)
    lower, upper, kj = [], [], []
    for k in out_lattice:
        km = k.shifted(j, -1)
        kp = k.shifted(j, +1)
        lower.append(pos[km] if km is not None else -1)
        upper.append(pos.get(kp, -1))
        kj.append(k[j])
    return out_lattice, np.array(lower), np.array(upper), np.array(kj, dtype=float)


def _apply_ladder(fld: CoefficientField, j: int, sign: float, prefactor) -> CoefficientField:
    if fld.k_max < 1:
        raise ValueError("ladder operators need k_max >= 1")
    out_k = fld.k_max - 1
    _, lower, upper, kj = _ladder_indices(fld, j, fld.k_max)
    u = fld.values
    # index -1 marks a missing neighbour; gather then zero those entries
    down = np.where((lower >= 0)[None, :, None], u[:, lower, :], 0.0)
    up = np.where((upper >= 0)[None, :, None], u[:, upper, :], 0.0)
    full = prefactor[:, None, None] * (np.sqrt(kj)[None, :, None] * down
                                       + sign * np.sqrt(kj + 1.0)[None, :, None] * up)
    n_out = len(multi_indices(fld.n, out_k))
    kept = full[:, :n_out, :]
    dropped = full[:, n_out:, :]
    lam = np.abs(fld.grid.nodes)
    node_w = fld.grid.weights * lam ** fld.n
    loss = fld.grid.params.c_n * pairwise_sum(node_w[:, None, None] * np.abs(dropped) ** 2)
    return CoefficientField(fld.grid, out_k, fld.l_max, kept, truncation_loss=loss)


def apply_Xj(fld: CoefficientField, j: int) -> CoefficientField:
    """Coefficients of X_j u: sqrt(|lambda|/2) (sqrt(k_j) u_{k-e_j,l} - sqrt(k_j+1) u_{k+e_j,l}).

    ``j`` is zero-based. The result lives on |k| <= k_max - 1; the squared
    norm of the discarded outer shell is stored as ``truncation_loss``.
    """
    lam = fld.grid.nodes
    return _apply_ladder(fld, j, -1.0, np.sqrt(np.abs(lam) / 2.0).astype(complex))


def apply_Yj(fld: CoefficientField, j: int) -> CoefficientField:
    """Coefficients of Y_j u: i sign(lambda) sqrt(|lambda|/2) (sqrt(k_j) u_{k-e_j,l} + sqrt(k_j+1) u_{k+e_j,l})."""
    lam = fld.grid.nodes
    return _apply_ladder(fld, j, +1.0, 1j * np.sign(lam) * np.sqrt(np.abs(lam) / 2.0))


@dataclass(frozen=True)
class TailBound:
    """Partial tail sum_{|k| > k_max} (2|k| + n)^-(n+1) of the convergent series."""

    n: int
    k_max: int
    value: float


def _shell_polynomial(n: int) -> np.ndarray:
    """Coefficients c_j with #{|k| = m} = C(m+n-1, n-1) = sum_j c_j s^j, s = 2m + n."""
    # C(m+n-1, n-1) = prod_{i=1}^{n-1} (m + i) / (n-1)!, and m + i = (s - n + 2i) / 2
    poly = np.poly1d([1.0])
    for i in range(1, n):
        poly = poly * np.poly1d([0.5, (2 * i - n) / 2.0])
    return poly.coeffs[::-1] / math.factorial(n - 1)


def tail_bound(params: GroupParams | int, k_max: int) -> TailBound:
    """Tail of sum_k mu_k^-(n+1) beyond the shell |k| = k_max; ``k_max=-1`` gives the full series.

    Shells are counted exactly, C(m+n-1, n-1) multi-indices with |k| = m. The
    count is a polynomial in s = 2m + n, so the tail is a finite combination
    of Hurwitz zeta values and needs no truncation of its own.
    """
    n = params.n if isinstance(params, GroupParams) else int(params)
    if k_max < -1:
        raise ValueError(f"k_max must be >= -1, got {k_max}")
    coeffs = _shell_polynomial(n)
    # sum_{m > K} s^(j-n-1) with s = 2m + n  ->  2^(j-n-1) zeta(n+1-j, K + 1 + n/2)
    q = k_max + 1 + n / 2.0
    value = 0.0
    for j, c in enumerate(coeffs):
        if c != 0.0:
            value += c * 2.0 ** (j - n - 1) * zeta(n + 1 - j, q)
    return TailBound(n=n, k_max=k_max, value=float(value))


def shell_sum(n: int, k_lo: int, k_hi: int) -> float:
    """sum_{k_lo < |k| <= k_hi} mu_k^-(n+1) by exact shell counts (finite)."""
    m = np.arange(k_lo + 1, k_hi + 1, dtype=float)
    counts = comb(m + n - 1, n - 1)
    return pairwise_sum(counts * (2 * m + n) ** -(n + 1.0))
