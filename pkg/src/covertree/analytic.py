"""Analytic layer: the PoiGamma law, Bessel I1, densities, tails, and the
closed-form centering and barrier curves.

PoiGamma(r, lam) is the law of a Poisson(r) number of independent mean-lam
exponentials summed together: mean lam*r, variance 2*lam^2*r, atom exp(-r)
at zero.  If Z ~ PoiGamma(l^2, 1), the density of sqrt(Z) on (0, inf) is

    f(y) = 2*l * exp(-(l^2 + y^2)) * I1(2*y*l),

with the point mass exp(-l^2) at y = 0, and for |w| <= l/2 it tracks the
density g(w) = exp(-w^2)/sqrt(pi) of a half-variance Gaussian:
f(l + w) = (1 - w/(2l) + O((w^2+1)/l^2)) * g(w).  Everything here is exact
closed form plus controlled numerical evaluation; natural logs throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import backend

SQRT_LOG2 = math.sqrt(math.log(2.0))

__all__ = [
    "SQRT_LOG2",
    "PoiGammaParams",
    "TailBounds",
    "CenteringSet",
    "BarrierCurve",
    "poigamma_sample",
    "poigamma_sample_many",
    "poigamma_mgf_neg",
    "poigamma_tail_bounds",
    "sqrt_tail_bound",
    "bessel_i1",
    "bessel_i1_log",
    "gaussian_half_density",
    "sqrt_poigamma_density",
    "sqrt_poigamma_cdf",
    "poigamma_cdf",
    "path_likelihood_ratio",
    "bridge_max_tail",
    "centering",
    "barrier",
]


@dataclass(frozen=True)
class PoiGammaParams:
    """Poisson mean r >= 0 and exponential mean lam > 0."""

    r: float
    lam: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        if self.lam <= 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")

    @property
    def mean(self) -> float:
        return self.lam * self.r

    @property
    def variance(self) -> float:
        return 2.0 * self.lam * self.lam * self.r

    @property
    def zero_mass(self) -> float:
        return math.exp(-self.r)


def poigamma_sample(p: PoiGammaParams, rng: np.random.Generator) -> float:
    """One draw of Z = sum of a Poisson(r) number of Exp(mean lam) variables.

    Scalar path shared with the field sampler: a single gamma variate stands
    in for the exponential sum once the Poisson count exceeds 32 (same law).
    """
    return backend.kernels.poigamma_draw(rng.bit_generator, p.r, p.lam)


def poigamma_sample_many(p: PoiGammaParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized draws; identical in law to poigamma_sample, different stream use."""
    n = rng.poisson(p.r, size)
    return p.lam * rng.standard_gamma(n)


def poigamma_mgf_neg(theta: float, p: PoiGammaParams) -> float:
    """E exp(-theta * Z / lam) = exp(-theta * r / (1 + theta)) for theta >= 0."""
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    return math.exp(-theta * p.r / (1.0 + theta))


class TailBounds(NamedTuple):
    lower: float | None  # bound on P(Z <= lam*r - alpha); None when alpha >= lam*r
    upper: float  # bound on P(Z >= lam*r + alpha)


def poigamma_tail_bounds(p: PoiGammaParams, alpha: float) -> TailBounds:
    """Chernoff bounds on both tails of Z ~ PoiGamma(r, lam) at distance alpha.

        P(Z <= lam*r - alpha) <= exp(2*sqrt(r*(r - alpha/lam)) + alpha/lam - 2r)
        P(Z >= lam*r + alpha) <= exp(2*sqrt(r*(r + alpha/lam)) - 2r - alpha/lam)

    The lower bound needs alpha < lam*r and is returned as None otherwise.
    It is always at most the weaker envelope exp(-alpha^2 / (4*lam^2*r))
    sometimes used in its place.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    a = alpha / p.lam
    r = p.r
    lower = None
    if a < r:
        lower = math.exp(2.0 * math.sqrt(r * (r - a)) + a - 2.0 * r)
    upper = math.exp(2.0 * math.sqrt(r * (r + a)) - 2.0 * r - a)
    return TailBounds(lower, upper)


def sqrt_tail_bound(r: float, beta: float) -> float:
    """exp(-r * beta^2), bounding both P(sqrt(Z) <= (1-b)sqrt(lam r)) and
    P(sqrt(Z) >= (1+b)sqrt(lam r)); independent of lam.  Tight at beta = 1,
    where the lower event is exactly {Z = 0}."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    return math.exp(-r * beta * beta)


# ---------------------------------------------------------------------------
# Modified Bessel function I1
# ---------------------------------------------------------------------------

_I1_SWITCH = 25.0
_I1_ASYM_TERMS = 24


def _i1_series(x: np.ndarray) -> np.ndarray:
    """Power series sum_{k>=0} (x/2)^(2k+1) / (k! (k+1)!), compensated
    summation, terms added until the relative tail drops below 1e-16."""
    half = 0.5 * x
    q = half * half
    term = half.copy()
    total = term.copy()
    comp = np.zeros_like(total)
    k = 1
    while True:
        term = term * q / (k * (k + 1))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        k += 1
        if np.all(term <= 1e-16 * total) or k > 600:
            return total


def _i1_asym_factor(x: np.ndarray) -> np.ndarray:
    """Series factor of the large-x expansion I1(x) = e^x/sqrt(2 pi x) * s(x),
    s(x) = 1 - 3/(8x) - 15/(128 x^2) - ...; summed far past the leading terms
    so the factor is accurate to ~1e-15 for x >= 25."""
    s = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, _I1_ASYM_TERMS + 1):
        term = -term * (4.0 - (2 * k - 1) ** 2) / (8.0 * x * k)
        s += term
    return s


def bessel_i1(x):
    """I1(x) for x >= 0: exact series below x = 25, asymptotic expansion above.

    Both branches agree to better than 1e-10 relative at the switchover.
    Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("bessel_i1 requires x >= 0")
    out = np.empty_like(arr)
    small = arr < _I1_SWITCH
    if np.any(small):
        out[small] = _i1_series(arr[small])
    if np.any(~small):
        b = arr[~small]
        out[~small] = np.exp(b) / np.sqrt(2.0 * math.pi * b) * _i1_asym_factor(b)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def bessel_i1_log(x):
    """log I1(x), overflow-safe for large x (-inf at x = 0)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("bessel_i1_log requires x >= 0")
    out = np.empty_like(arr)
    small = arr < _I1_SWITCH
    with np.errstate(divide="ignore"):
        if np.any(small):
            out[small] = np.log(_i1_series(arr[small]))
        if np.any(~small):
            b = arr[~small]
            out[~small] = b - 0.5 * np.log(2.0 * math.pi * b) + np.log(_i1_asym_factor(b))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# Densities and distribution functions
# ---------------------------------------------------------------------------


def gaussian_half_density(w):
    """Density exp(-w^2)/sqrt(pi) of a centered Gaussian with variance 1/2."""
    arr = np.asarray(w, dtype=float)
    out = np.exp(-arr * arr) / math.sqrt(math.pi)
    return float(out) if np.isscalar(w) or arr.ndim == 0 else out


def sqrt_poigamma_density(l: float, y):
    """Density of sqrt(Z) for Z ~ PoiGamma(l^2, 1): continuous part
    2*l*exp(-(l^2+y^2))*I1(2*y*l) for y > 0, atom mass exp(-l^2) reported
    at y = 0.  Evaluated in log space so l ~ 100 does not overflow."""
    if l <= 0:
        raise ValueError(f"l must be > 0, got {l}")
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0):
        raise ValueError("sqrt_poigamma_density requires y >= 0")
    out = np.empty_like(arr)
    zero = arr == 0.0
    out[zero] = math.exp(-l * l)
    pos = ~zero
    if np.any(pos):
        yp = arr[pos]
        x = 2.0 * yp * l
        # log f = log(2l) - (y-l)^2 + [log I1(x) - x]
        log_f = math.log(2.0 * l) - (yp - l) ** 2 + (bessel_i1_log(x) - x)
        out[pos] = np.exp(log_f)
    return float(out) if np.isscalar(y) or arr.ndim == 0 else out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def sqrt_poigamma_cdf(l: float, y) -> np.ndarray:
    """P(sqrt(Z) <= y), Z ~ PoiGamma(l^2, 1): atom plus cumulative
    Gauss-Legendre quadrature of the continuous density on a grid refined to
    cells of width <= 1/8 (the density varies on scale ~1)."""
    if l <= 0:
        raise ValueError(f"l must be > 0, got {l}")
    q = np.atleast_1d(np.asarray(y, dtype=float))
    atom = math.exp(-l * l)
    pos = np.unique(q[q > 0])
    if pos.size == 0:
        out = np.where(q < 0, 0.0, atom)
        return float(out[0]) if np.isscalar(y) or np.asarray(y).ndim == 0 else out
    # refined breakpoint grid over [0, max]
    grid = np.union1d(pos, np.arange(0.0, pos[-1] + 0.125, 0.125))
    grid = grid[grid <= pos[-1] + 1e-12]
    if grid[0] != 0.0:
        grid = np.concatenate(([0.0], grid))
    a, b = grid[:-1], grid[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    # nodes: (cells, 16)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = sqrt_poigamma_density(l, pts.ravel()).reshape(pts.shape)
    cell = (vals * _GL_WEIGHTS[None, :]).sum(axis=1) * half
    cum = np.concatenate(([0.0], np.cumsum(cell)))
    cdf_at = atom + np.interp(pos, grid, cum)
    lookup = dict(zip(pos.tolist(), np.minimum(cdf_at, 1.0).tolist()))
    out = np.array([0.0 if v < 0 else (atom if v == 0 else lookup[v]) for v in q])
    return float(out[0]) if np.isscalar(y) or np.asarray(y).ndim == 0 else out


def poigamma_cdf(p: PoiGammaParams, z) -> np.ndarray:
    """P(Z <= z) for Z ~ PoiGamma(r, lam), via the sqrt(Z/lam) quadrature."""
    arr = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.zeros_like(arr)
    ok = arr >= 0
    if np.any(ok):
        out[ok] = np.atleast_1d(sqrt_poigamma_cdf(math.sqrt(p.r), np.sqrt(arr[ok] / p.lam)))
    return float(out[0]) if np.isscalar(z) or np.asarray(z).ndim == 0 else out


def path_likelihood_ratio(l0: float, increments: Sequence[float]) -> float:
    """Product over steps of f_{l}(l + z) / g(z) along l_i = l_{i-1} + z_i.

    f_l is the sqrt-PoiGamma density with start value l, g the half-variance
    Gaussian density.  Requires l_i > 0 and |z_i| <= l_{i-1}/2 along the
    whole path; empty input gives 1.
    """
    if l0 <= 0:
        raise ValueError(f"l0 must be > 0, got {l0}")
    l = float(l0)
    log_ratio = 0.0
    for i, z in enumerate(increments):
        z = float(z)
        if abs(z) > l / 2.0 or l + z <= 0:
            raise ValueError(f"increment {i} (z={z}) violates |z| <= l/2 with l={l}")
        y = l + z
        x = 2.0 * y * l
        log_f = math.log(2.0 * l) - (y - l) ** 2 + (bessel_i1_log(x) - x)
        log_g = -z * z - 0.5 * math.log(math.pi)
        log_ratio += log_f - log_g
        l = y
    return math.exp(log_ratio)


def bridge_max_tail(q: float, lam: float) -> float:
    """P(max over [0, q] of a standard Brownian bridge >= lam) = exp(-2 lam^2 / q)."""
    if q <= 0:
        raise ValueError(f"q must be > 0, got {q}")
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    return math.exp(-2.0 * lam * lam / q)


# ---------------------------------------------------------------------------
# Centering and barrier curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CenteringSet:
    """Deterministic centering values for depth n, all in local-time units
    except delta (a height).  pre_asymptotic is set when a squared value had
    a negative inner expression, i.e. the correction terms dominate at this
    depth and the value is not meaningful as a location."""

    n: int
    t_plus: float
    t_minus: float
    t_first_order: float
    s_prop: float
    delta: float
    pre_asymptotic: bool


def centering(n: int) -> CenteringSet:
    """Centering set at depth n >= 3 (log log n must be positive).

    With inner = sqrt(log 2)*n - log(n)/(2 sqrt(log 2)):
      t_first_order = inner^2
      t_plus  = (inner + 100*log log n)^2
      t_minus = (inner - 100*(log log n)^8)^2
      s_prop  = (inner + log^4 n)^2
      delta   = inner + log^4 n
    """
    if n < 3:
        raise ValueError(f"centering requires n >= 3, got {n}")
    ln = math.log(n)
    inner = SQRT_LOG2 * n - ln / (2.0 * SQRT_LOG2)
    ll = math.log(ln)
    in_plus = inner + 100.0 * ll
    in_minus = inner - 100.0 * ll**8
    in_s = inner + ln**4
    return CenteringSet(
        n=n,
        t_plus=in_plus**2,
        t_minus=in_minus**2,
        t_first_order=inner**2,
        s_prop=in_s**2,
        delta=in_s,
        pre_asymptotic=min(inner, in_plus, in_minus, in_s) < 0,
    )


@dataclass(frozen=True)
class BarrierCurve:
    """Level-indexed diagnostic curves for k in [1, n].

    gamma(k) = min(sqrt(k) log k, sqrt(n-k) log(n-k)) + 2  (x log x read as 0
    at x = 0), psi(k) = log(min(k, n-k)) / (2 sqrt(log 2)) for interior k
    (NaN at k = n, where it is undefined), and
    a(k) = (k/n)(sqrt(log 2) n - log(n)/(2 sqrt(log 2))) - psi(k) + 2 for
    k < n with the exact endpoint a(n) = sqrt(log 2) n - log(n)/(2 sqrt(log 2)).
    delta = a(n) + log^4 n.
    """

    n: int
    levels: np.ndarray
    a_values: np.ndarray
    psi_values: np.ndarray
    gamma_values: np.ndarray
    delta: float

    def _at(self, values: np.ndarray, k: int) -> float:
        if not 1 <= k <= self.n:
            raise ValueError(f"level {k} outside [1, {self.n}]")
        return float(values[k - 1])

    def a(self, k: int) -> float:
        return self._at(self.a_values, k)

    def psi(self, k: int) -> float:
        return self._at(self.psi_values, k)

    def gamma(self, k: int) -> float:
        return self._at(self.gamma_values, k)


def _sqrt_x_log_x(m: np.ndarray) -> np.ndarray:
    out = np.zeros_like(m, dtype=float)
    pos = m > 1
    out[pos] = np.sqrt(m[pos]) * np.log(m[pos])
    return out


def barrier(n: int) -> BarrierCurve:
    """Barrier curves a, psi, gamma on levels 1..n for depth n >= 4."""
    if n < 4:
        raise ValueError(f"barrier requires n >= 4, got {n}")
    ks = np.arange(1, n + 1)
    comp = n - ks
    gamma = np.minimum(_sqrt_x_log_x(ks), _sqrt_x_log_x(comp)) + 2.0
    psi = np.full(n, math.nan)
    interior = ks < n
    psi[interior] = np.log(np.minimum(ks[interior], comp[interior])) / (2.0 * SQRT_LOG2)
    inner = SQRT_LOG2 * n - math.log(n) / (2.0 * SQRT_LOG2)
    a = (ks / n) * inner - psi + 2.0
    a[-1] = inner
    return BarrierCurve(
        n=n,
        levels=ks,
        a_values=a,
        psi_values=psi,
        gamma_values=gamma,
        delta=inner + math.log(n) ** 4,
    )
