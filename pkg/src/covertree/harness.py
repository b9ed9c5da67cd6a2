"""Estimation and inference layer: goodness of fit, coverage-threshold
scans, and centering fits of the form A*n + B*log(n) + C.

Scans work in sqrt(t) rather than t because the coverage transition is
asymptotically linear in sqrt(t), which keeps bisection behaving linearly.
The scan target probability (1/2 by default at call sites) defines the
threshold t_star; each probe uses a fresh sub-seed so probes are independent
and the whole scan is reproducible from one master seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import backend
from .analytic import SQRT_LOG2, centering
from .replicas import (
    ReplicaSummary,
    replica_rng,
    run_replica_records,
    run_replicas,
    summarize_values,
)
from .tree import TreeParams

__all__ = [
    "ReplicaSummary",
    "run_replicas",
    "run_replica_records",
    "ks_statistic",
    "ks_critical_1pct",
    "ScanResult",
    "threshold_scan",
    "FitResult",
    "fit_centering",
]

KS_CRIT_1PCT_COEF = 1.63


def ks_critical_1pct(n: int) -> float:
    """Large-sample 1% critical value 1.63/sqrt(n) (suites use n >= 1e4)."""
    return KS_CRIT_1PCT_COEF / math.sqrt(n)


def ks_statistic(samples, cdf: Callable) -> float:
    """Sup distance between the empirical CDF and an analytic CDF.

    Both distribution functions are evaluated right-continuously at the
    sample points, which handles an atom at 0 (or any atom the samples
    share) exactly; for purely continuous CDFs this is within 1/n of the
    classical two-sided statistic.  cdf may be vectorized or scalar.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 10:
        raise ValueError(f"need at least 10 samples, got {n}")
    try:
        f = np.asarray(cdf(x), dtype=float)
        if f.shape != x.shape:
            raise TypeError
    except TypeError:
        f = np.array([float(cdf(v)) for v in x])
    emp = np.searchsorted(x, x, side="right") / n
    return float(np.max(np.abs(f - emp)))


def _crossing_estimate(
    history: list[tuple[float, ReplicaSummary]], target: float, lo: float, hi: float
) -> float:
    """Locate the target crossing inside the final bracket.

    Coverage is near-linear in sqrt(t) on the bisection scale, so a
    stderr-weighted line through the probes near the bracket pools their
    replicas instead of discarding all but the last two; falls back to the
    bracket midpoint when the local slope is not usable.
    """
    width = max(hi - lo, 1e-12)
    center = 0.5 * (lo + hi)
    near = [(sq, est) for sq, est in history if abs(sq - center) <= 2.0 * width]
    if len(near) >= 2:
        x = np.array([sq for sq, _ in near])
        y = np.array([est.estimate for _, est in near])
        w = np.array([1.0 / max(est.stderr, 1e-9) ** 2 for _, est in near])
        design = np.column_stack([x, np.ones_like(x)])
        sw = np.sqrt(w)
        coef, *_ = np.linalg.lstsq(design * sw[:, None], y * sw, rcond=None)
        slope, intercept = float(coef[0]), float(coef[1])
        if slope > 0:
            crossing = (target - intercept) / slope
            return min(max(crossing, lo), hi)
    return center


@dataclass(frozen=True)
class ScanResult:
    """Bisection result for the coverage threshold at one depth.

    flagged marks a scan whose bracket did not converge within budget or
    whose endpoints do not straddle the target beyond 3 standard errors.
    """

    depth: int
    target: float
    t_star: float
    sqrt_t_star: float
    sqrt_lo: float
    sqrt_hi: float
    probes: int
    replicas_per_probe: int
    converged: bool
    bracket_ok: bool
    flagged: bool


def threshold_scan(
    p: TreeParams,
    target: float,
    tolerance: float,
    seed: int,
    budget: int = 40,
    replicas_per_probe: int = 2000,
    workers: int | None = None,
) -> ScanResult:
    """Bisection in sqrt(t) for the t where P(all leaves touched at tau(t))
    crosses target.

    Coverage probabilities are estimated with the fast field sampler; each
    probe consumes one fresh sub-seed.  The initial bracket is seeded from
    the first-order centering and expanded geometrically until it straddles
    the target.  Stops once the sqrt(t) bracket is within the given relative
    tolerance, or flags a partial result when the probe budget runs out.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must be in (0, 1), got {target}")
    if tolerance <= 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    n = p.depth

    def covered(rng: np.random.Generator, t: float) -> float:
        min_leaf, _, _ = backend.kernels.rk_field(
            rng.bit_generator, n, t, True, None, None, None
        )
        return 1.0 if min_leaf > 0.0 else 0.0

    probes = 0
    low_certified = False
    high_certified = False
    history: list[tuple[float, ReplicaSummary]] = []

    def probe(sq: float) -> ReplicaSummary:
        nonlocal probes, low_certified, high_certified
        t = sq * sq
        est = run_replicas(
            lambda rng: covered(rng, t),
            replicas_per_probe,
            seed,
            workers=workers,
            key=(n, probes),  # fresh sub-seed per probe, disjoint across depths
        )
        probes += 1
        if est.estimate < target - 3.0 * est.stderr:
            low_certified = True
        if est.estimate > target + 3.0 * est.stderr:
            high_certified = True
        history.append((sq, est))
        return est

    sqrt0 = math.sqrt(centering(n).t_first_order) if n >= 3 else max(SQRT_LOG2 * n, 1.0)
    eps = 1e-6
    lo, hi = max(sqrt0 - 1.0, eps), sqrt0 + 1.0
    p_lo = probe(lo)
    p_hi = None
    step = 1.0
    while p_lo.estimate >= target and lo > eps and probes < budget:
        hi, p_hi = lo, p_lo
        step *= 2.0
        lo = max(lo - step, eps)
        p_lo = probe(lo)
    if p_hi is None:
        p_hi = probe(hi)
    step = 1.0
    while p_hi.estimate <= target and probes < budget:
        lo, p_lo = hi, p_hi
        step *= 2.0
        hi += step
        p_hi = probe(hi)

    def width_ok() -> bool:
        return (hi - lo) <= tolerance * 0.5 * (hi + lo)

    while not width_ok() and probes < budget:
        mid = 0.5 * (lo + hi)
        pm = probe(mid)
        if pm.estimate < target:
            lo, p_lo = mid, pm
        else:
            hi, p_hi = mid, pm

    converged = width_ok()
    # a sign change beyond noise must have been certified somewhere along the
    # probe history (the tight final bracket is within noise by construction)
    bracket_ok = low_certified and high_certified
    mid = _crossing_estimate(history, target, lo, hi)
    return ScanResult(
        depth=n,
        target=target,
        t_star=mid * mid,
        sqrt_t_star=mid,
        sqrt_lo=lo,
        sqrt_hi=hi,
        probes=probes,
        replicas_per_probe=replicas_per_probe,
        converged=converged,
        bracket_ok=bracket_ok,
        flagged=not (converged and bracket_ok),
    )


@dataclass(frozen=True)
class FitResult:
    """Least-squares coefficients of value ~ A*n + B*log(n) + C."""

    A: float
    B: float
    C: float
    residual_rms: float
    n_range: tuple[int, int]

    def predict(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        return self.A * n + self.B * np.log(n) + self.C


def fit_centering(points: Sequence[tuple[float, float]]) -> FitResult:
    """Ordinary least squares of value against (n, log n, 1).

    Needs at least 4 distinct n values; raises on a rank-deficient design.
    """
    pts = [(float(n), float(v)) for n, v in points]
    ns = np.array([q[0] for q in pts])
    vals = np.array([q[1] for q in pts])
    if np.unique(ns).size < 4:
        raise ValueError("fit needs at least 4 distinct n values")
    design = np.column_stack([ns, np.log(ns), np.ones_like(ns)])
    coef, _, rank, _ = np.linalg.lstsq(design, vals, rcond=None)
    if rank < 3:
        raise ValueError("rank-deficient design; n values too clustered")
    resid = vals - design @ coef
    return FitResult(
        A=float(coef[0]),
        B=float(coef[1]),
        C=float(coef[2]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_range=(int(ns.min()), int(ns.max())),
    )
