"""Group Fourier transform on H_1 through the Schrodinger representations.

The representation acts on L^2(R^n) by

    pi_lambda(x, y, tau) phi(w) = e^{i lambda (tau + x.y/2)} e^{i sign(lambda) sqrt|lambda| y.w} phi(w + sqrt|lambda| x)

and the transform is f_hat(lambda) = int f(eta) pi_lambda(eta)^* d eta, with
matrix entries f_hat(lambda)_{k,l} = (f_hat(lambda) e_k, e_l).

Writing X = sqrt|lambda| x and Y = sign(lambda) sqrt|lambda| y, the factor
e^{i lambda x.y/2} is exactly the symmetrizing phase, so at tau = 0 the
representation is the Weyl operator exp(i(Y w + X D)). Its Hermite matrix
elements are displacement-operator elements <k|D(zeta)|l> with
zeta = (iY - X)/sqrt(2); in polar coordinates X + iY = r e^{i theta} they
factor as R_{kl}(r) e^{-i(k-l) theta} with R real. The transform is then

    f_hat_{kl} = |lambda|^-1 int_0^inf r R_{kl}(r) int_0^{2 pi} F(r, theta) e^{i(k-l) theta} d theta dr

where F is the tau-Fourier transform of f at frequency lambda. The angular
integral is a discrete Fourier transform (trapezoid rule, spectrally exact
for periodic data) and the radial one uses Gauss-Legendre panels.

Physical-data transforms are implemented for n = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import fft as sfft

from .group import GroupParams
from .hermite import MultiIndex, QuadratureRule, gauss_hermite, hermite_functions
from .plancherel import gauss_legendre_panels

__all__ = [
    "GroupParams",
    "PhysicalFunction",
    "ResolutionError",
    "TransformRules",
    "TruncationError",
    "displacement_matrix",
    "laguerre_functions",
    "gaussian",
    "group_fourier",
    "l1_norm",
    "l2_norm",
    "operator_norm",
    "rep_matrix_coefficient",
    "zero_function",
]


class ResolutionError(RuntimeError):
    """A quadrature and its refinement disagree beyond tolerance."""

    def __init__(self, message: str, discrepancy: float):
        super().__init__(message)
        self.discrepancy = discrepancy


class TruncationError(RuntimeError):
    """The Hermite truncation leaves more mass outside than allowed."""

    def __init__(self, message: str, estimated_tail: float):
        super().__init__(message)
        self.estimated_tail = estimated_tail


Box = tuple[tuple[float, float], tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class PhysicalFunction:
    """A function on H_1 given by a vectorized sampler and a support box.

    ``sampler(x, y, tau)`` takes broadcastable arrays. Outside ``support``
    the function is treated as zero, so it should be negligible on the box
    boundary. ``scale`` is the length over which the function varies; it
    sets the spatial quadrature resolution. Known norms can be attached so
    checks do not depend on a numerical integral of their own.
    """

    sampler: Callable
    support: Box
    smoothness: str = "analytic"
    scale: float = 1.0
    real: bool = True
    name: str = "f"
    l1: float | None = None
    l2: float | None = None

    def __post_init__(self):
        if len(self.support) != 3 or any(not lo < hi for lo, hi in self.support):
            raise ValueError(f"support must be three intervals (lo, hi), got {self.support}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def __call__(self, x, y, tau):
        return self.sampler(x, y, tau)

    def inside(self, x, y) -> np.ndarray:
        (x0, x1), (y0, y1), _ = self.support
        return (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)

    @property
    def corner_radius(self) -> float:
        """Largest distance from the origin to a corner of the (x, y) box."""
        (x0, x1), (y0, y1), _ = self.support
        return math.hypot(max(abs(x0), abs(x1)), max(abs(y0), abs(y1)))


def gaussian(half_width: float = 8.6) -> PhysicalFunction:
    """e^{-(x^2 + y^2 + tau^2)/2} on H_1 with its exact L^1 and L^2 norms."""

    def sampler(x, y, tau):
        return np.exp(-0.5 * (x * x + y * y + tau * tau))

    box = ((-half_width, half_width),) * 3
    return PhysicalFunction(sampler, box, name="gaussian",
                            l1=(2.0 * math.pi) ** 1.5, l2=math.pi ** 0.75)


def zero_function(half_width: float = 1.0) -> PhysicalFunction:
    def sampler(x, y, tau):
        return np.zeros(np.broadcast(x, y, tau).shape)

    return PhysicalFunction(sampler, ((-half_width, half_width),) * 3, name="zero", l1=0.0, l2=0.0)


@dataclass(frozen=True)
class TransformRules:
    """Resolution controls for :func:`group_fourier`.

    ``points`` Gauss-Legendre nodes per panel. Panels are at most
    ``refine``^-1 times the natural width: half an oscillation period
    pi/|lambda| (capped by the function scale) in tau, half a Hermite
    wavelength (capped by sqrt|lambda| times the function scale) in r. ``check`` enables the
    doubling comparison with tolerance ``tol`` relative to the larger of the
    matrix size and ``floor_scale``.
    """

    points: int = 8
    refine: float = 1.0
    check: bool = False
    tol: float = 1e-6
    floor_scale: float = 0.0
    tail_bound: float | None = None

    def doubled(self) -> TransformRules:
        return TransformRules(self.points, 2.0 * self.refine, False, self.tol,
                              self.floor_scale, None)


def rep_matrix_coefficient(lam: float, x, y, k: MultiIndex, l: MultiIndex,
                           rule: QuadratureRule | None = None, tol: float = 1e-6) -> complex:
    """int e^{i sign(lam) sqrt|lam| y.w} e_k(w + sqrt|lam| x) e_l(w) dw by Gauss-Hermite.

    The integral factorizes over coordinates. Each factor is evaluated at the
    midpoint shift w = s - sqrt|lam| x_j / 2 so the Hermite envelope is
    centred, and again with a rule of twice the size; disagreement above
    ``tol`` raises :class:`ResolutionError`.
    """
    if lam == 0 or not np.isfinite(lam):
        raise ValueError(f"lambda must be finite and nonzero, got {lam}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not (k.n == l.n == len(x) == len(y)):
        raise ValueError("x, y, k and l must share the dimension n")
    if rule is None:
        rule = gauss_hermite(max(k.order, l.order) + 40)
    coarse = _rep_coefficient(lam, x, y, k, l, rule)
    fine = _rep_coefficient(lam, x, y, k, l, gauss_hermite(2 * rule.count))
    gap = abs(fine - coarse)
    if gap > tol:
        raise ResolutionError(
            f"Gauss-Hermite({rule.count}) and ({2 * rule.count}) disagree by {gap:.3e}", gap)
    return fine


def _rep_coefficient(lam, x, y, k, l, rule):
    a = math.sqrt(abs(lam))
    s = math.copysign(1.0, lam)
    out = 1.0 + 0.0j
    for j in range(k.n):
        shift = 0.5 * a * x[j]
        w = rule.nodes - shift
        psi_k = hermite_functions(k[j], rule.nodes + shift)[k[j]]
        psi_l = hermite_functions(l[j], w)[l[j]]
        out *= np.sum(rule.scaled_weights * np.exp(1j * s * a * y[j] * w) * psi_k * psi_l)
    return complex(out)


def laguerre_functions(alpha: int, n_max: int, x) -> np.ndarray:
    """Normalized Laguerre functions sqrt(n!/(n+alpha)!) x^(alpha/2) e^(-x/2) L_n^(alpha)(x), n = 0..n_max.

    The three-term recurrence is run on the normalized functions, seeded in
    log space, so nothing overflows for large ``x`` or ``alpha``.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((n_max + 1,) + x.shape)
    with np.errstate(divide="ignore", under="ignore", invalid="ignore"):
        log_seed = 0.5 * alpha * np.log(x) - 0.5 * x - 0.5 * math.lgamma(alpha + 1)
        cur = np.exp(log_seed) if alpha > 0 else np.exp(-0.5 * x)
    prev = np.zeros_like(x)
    out[0] = cur
    for n in range(n_max):
        nxt = ((2 * n + 1 + alpha - x) * cur - math.sqrt(n * (n + alpha)) * prev) \
            / math.sqrt((n + 1) * (n + 1 + alpha))
        prev, cur = cur, nxt
        out[n + 1] = cur
    return out


def displacement_matrix(zeta, k_max: int, l_max: int) -> np.ndarray:
    """<k|D(zeta)|l> for 0 <= k <= k_max, 0 <= l <= l_max, D(zeta) = exp(zeta a^+ - conj(zeta) a).

    Uses the closed form (u = zeta/|zeta|, x = |zeta|^2)

        <k|D|l> = u^(k-l) ell_l^(k-l)(x)           for k >= l
        <k|D|l> = (-conj u)^(l-k) ell_k^(l-k)(x)   for k < l

    with the normalized Laguerre functions of :func:`laguerre_functions`.
    ``zeta`` may be an array; output shape is ``(k_max+1, l_max+1) + zeta.shape``.
    Real ``zeta`` gives a real matrix.
    """
    zeta = np.asarray(zeta)
    real = not np.iscomplexobj(zeta)
    x = np.abs(zeta) ** 2
    mag = np.sqrt(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(mag > 0, zeta / np.where(mag > 0, mag, 1.0), 1.0)
    if real:
        u = u.real
    out = np.zeros((k_max + 1, l_max + 1) + zeta.shape, dtype=float if real else complex)
    for alpha in range(max(k_max, l_max) + 1):
        lower = min(k_max - alpha, l_max)  # k = l + alpha, l = 0..lower
        upper = min(l_max - alpha, k_max)  # l = k + alpha, k = 0..upper
        top = max(lower, upper)
        if top < 0:
            continue
        ell = laguerre_functions(alpha, top, x)
        if alpha == 0:
            for i in range(top + 1):
                out[i, i] = ell[i]
            continue
        down = u ** alpha
        up = (-np.conj(u)) ** alpha
        for i in range(lower + 1):
            out[i + alpha, i] = down * ell[i]
        for i in range(upper + 1):
            out[i, i + alpha] = up * ell[i]
    return out


def _radial_edges(r_max: float, width: float) -> np.ndarray:
    count = max(1, math.ceil(r_max / width))
    return np.linspace(0.0, r_max, count + 1)


def _tau_rule(f: PhysicalFunction, lam: float, rules: TransformRules):
    t0, t1 = f.support[2]
    width = min(f.scale, math.pi / abs(lam)) / rules.refine
    edges = np.linspace(t0, t1, max(1, math.ceil((t1 - t0) / width)) + 1)
    nodes, weights = gauss_legendre_panels(edges, rules.points)
    return nodes, weights * np.exp(-1j * lam * nodes)


def _tau_transform(f: PhysicalFunction, x, y, tau, tau_w, chunk=4096):
    out = np.zeros(x.shape, dtype=complex)
    flat_x, flat_y, flat_o = x.ravel(), y.ravel(), out.reshape(-1)
    inside = f.inside(flat_x, flat_y)
    idx = np.flatnonzero(inside)
    for start in range(0, len(idx), chunk):
        sel = idx[start:start + chunk]
        vals = f(flat_x[sel, None], flat_y[sel, None], tau[None, :])
        flat_o[sel] = vals @ tau_w
    return out


def _fourier_once(f, lam, k_max, l_max, rules):
    a = math.sqrt(abs(lam))
    s = math.copysign(1.0, lam)
    kl = max(k_max, l_max)
    # displacement elements up to order kl are below 1e-17 once |zeta| > sqrt(kl) + 9
    r_max = min(math.sqrt(2.0) * (math.sqrt(kl) + 9.0), a * f.corner_radius)
    k_r = math.sqrt(2.0 * (k_max + l_max) + 2.0)
    width = min(math.pi / k_r, a * f.scale) / rules.refine
    r_nodes, r_weights = gauss_legendre_panels(_radial_edges(r_max, width), rules.points)
    tau, tau_w = _tau_rule(f, lam, rules)

    radial = displacement_matrix(-r_nodes / math.sqrt(2.0), k_max, l_max)  # (K+1, L+1, R)
    diff = (np.arange(l_max + 1)[None, :] - np.arange(k_max + 1)[:, None])
    out = np.zeros((k_max + 1, l_max + 1), dtype=complex)
    # angular resolution grows with the ring's physical circumference
    for start in range(0, len(r_nodes), rules.points):
        rr = r_nodes[start:start + rules.points]
        ww = r_weights[start:start + rules.points]
        rho = rr[-1] / a
        modes = 2.0 * (8.0 * rho / f.scale) * rules.refine + k_max + l_max + 16
        n_theta = sfft.next_fast_len(int(math.ceil(modes)))
        theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
        X = rr[:, None] * np.cos(theta)[None, :]
        Y = rr[:, None] * np.sin(theta)[None, :]
        F = _tau_transform(f, X / a, s * Y / a, tau, tau_w)
        spec = sfft.fft(F, axis=1) * (2.0 * math.pi / n_theta)  # int F e^{-i j theta}
        ang = spec[:, diff % n_theta]  # j = l - k gives int F e^{i(k-l) theta}
        block = radial[:, :, start:start + rules.points]
        out += np.einsum("r,klr,rkl->kl", ww * rr, block, ang)
    return out / abs(lam)


def group_fourier(f: PhysicalFunction, lam: float, k_max: int, l_max: int,
                  rules: TransformRules | None = None) -> np.ndarray:
    """Matrix f_hat(lam)_{k,l}, rows k = 0..k_max, columns l = 0..l_max (n = 1)."""
    if lam == 0 or not np.isfinite(lam):
        raise ValueError(f"lambda must be finite and nonzero, got {lam}")
    if k_max < 0 or l_max < 0:
        raise ValueError("truncation orders must be non-negative")
    rules = rules or TransformRules()
    mat = _fourier_once(f, lam, k_max, l_max, rules)
    if rules.check:
        fine = _fourier_once(f, lam, k_max, l_max, rules.doubled())
        gap = float(np.max(np.abs(fine - mat)))
        scale = max(float(np.max(np.abs(fine))), rules.floor_scale)
        if gap > rules.tol * scale:
            raise ResolutionError(
                f"transform at lambda = {lam:.6g} changes by {gap:.3e} under refinement "
                f"(allowed {rules.tol * scale:.3e})", gap)
        mat = fine
    if rules.tail_bound is not None:
        total = float(np.sum(np.abs(mat) ** 2))
        edge = float(np.sum(np.abs(mat[-1, :]) ** 2) + np.sum(np.abs(mat[:-1, -1]) ** 2))
        tail = edge / total if total > 0 else 0.0
        if tail > rules.tail_bound:
            raise TruncationError(
                f"outer Hermite shell holds {tail:.3e} of the HS mass at lambda = {lam:.6g}", tail)
    return mat


def operator_norm(mat: np.ndarray, iterations: int = 500, tol: float = 1e-12, seed: int = 0) -> float:
    """Largest singular value by power iteration on mat^* mat."""
    mat = np.asarray(mat)
    if not np.any(mat):
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(mat.shape[1]) + 1j * rng.standard_normal(mat.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iterations):
        w = mat.conj().T @ (mat @ v)
        new = math.sqrt(np.linalg.norm(w))
        v = w / np.linalg.norm(w)
        if abs(new - sigma) <= tol * new:
            return new
        sigma = new
    return sigma


def _box_quadrature(f: PhysicalFunction, points: int):
    axes = []
    for lo, hi in f.support:
        edges = np.linspace(lo, hi, max(1, math.ceil((hi - lo) / f.scale)) + 1)
        axes.append(gauss_legendre_panels(edges, points))
    return axes


def _box_integral(f: PhysicalFunction, power: int, points: int) -> float:
    (xn, xw), (yn, yw), (tn, tw) = _box_quadrature(f, points)
    total = 0.0
    for i in range(len(xn)):
        vals = np.abs(f(xn[i], yn[:, None], tn[None, :])) ** power
        total += xw[i] * float(yw @ vals @ tw)
    return total


def l1_norm(f: PhysicalFunction, points: int = 8) -> float:
    """||f||_{L^1(H_1)}; the attached exact value when known, else box quadrature."""
    return f.l1 if f.l1 is not None else _box_integral(f, 1, points)


def l2_norm(f: PhysicalFunction, points: int = 8) -> float:
    """||f||_{L^2(H_1)}; the attached exact value when known, else box quadrature."""
    return f.l2 if f.l2 is not None else math.sqrt(_box_integral(f, 2, points))
