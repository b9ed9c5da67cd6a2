"""Invariant suite for the analytic layer, shared by the verify-analytic CLI
subcommand and the acceptance tests.

Each check returns one row; the suite is deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import analytic
from .harness import ks_critical_1pct, ks_statistic
from .replicas import replica_rng


@dataclass(frozen=True)
class CheckRow:
    check: str
    passed: bool
    statistic: float
    threshold: float
    detail: str


def _normalization_rows() -> list[CheckRow]:
    rows = []
    for l in (0.5, 2.0, 10.0):
        atom = math.exp(-l * l)
        integral, _ = integrate.quad(
            lambda y: analytic.sqrt_poigamma_density(l, y), 1e-300, l + 40.0, limit=200
        )
        err = abs(atom + integral - 1.0)
        rows.append(CheckRow(
            check=f"normalization_l={l:g}",
            passed=err <= 1e-6,
            statistic=err,
            threshold=1e-6,
            detail="atom + adaptive quadrature of the continuous density",
        ))
    return rows


def _bessel_overlap_row() -> CheckRow:
    xs = np.linspace(25.0, 40.0, 151)
    series = analytic._i1_series(xs)
    asym = np.exp(xs) / np.sqrt(2.0 * math.pi * xs) * analytic._i1_asym_factor(xs)
    gap = float(np.max(np.abs(series / asym - 1.0)))
    return CheckRow(
        check="bessel_series_vs_asymptotic",
        passed=gap <= 1e-6,
        statistic=gap,
        threshold=1e-6,
        detail="max relative gap on x in [25, 40]",
    )


def _envelope_row() -> CheckRow:
    l = 30.0
    ws = np.linspace(-3.0, 3.0, 61)
    ratio = analytic.sqrt_poigamma_density(l, l + ws) / analytic.gaussian_half_density(ws)
    lhs = np.abs(ratio - (1.0 - ws / (2.0 * l)))
    rhs = 10.0 * (ws * ws + 1.0) / (l * l)
    worst = float(np.max(lhs / rhs))
    return CheckRow(
        check="density_ratio_envelope_l=30",
        passed=bool(np.all(lhs <= rhs)),
        statistic=worst,
        threshold=1.0,
        detail="|f(l+w)/g(w) - (1 - w/2l)| vs 10(w^2+1)/l^2 on w in [-3, 3]",
    )


_LOWER_FRACS = (0.2, 0.4, 0.6, 0.8, 0.95)
_UPPER_FRACS = (0.2, 0.5, 1.0, 2.0, 4.0)
_BETAS = (0.1, 0.25, 0.5, 0.75, 1.0)


def _tail_bound_rows(seed: int, draws: int = 100_000) -> list[CheckRow]:
    rows = []
    for ci, (r, lam) in enumerate((r, lam) for r in (1.0, 4.0, 16.0) for lam in (0.5, 1.0, 3.0)):
        params = analytic.PoiGammaParams(r, lam)
        z = analytic.poigamma_sample_many(params, draws, replica_rng(seed, 70, ci))
        mean = lam * r
        worst = -math.inf
        violations = 0

        def score(emp: float, bound: float) -> None:
            nonlocal worst, violations
            b = min(bound, 1.0)
            se = math.sqrt(b * (1.0 - b) / draws) if 0.0 < b < 1.0 else 0.0
            excess = (emp - b) / se if se > 0 else (0.0 if emp <= b else math.inf)
            worst = max(worst, excess)
            if emp > b + 3.0 * se:
                violations += 1

        for frac in _LOWER_FRACS:
            alpha = frac * mean
            bounds = analytic.poigamma_tail_bounds(params, alpha)
            score(float(np.mean(z <= mean - alpha)), bounds.lower)
        for frac in _UPPER_FRACS:
            alpha = frac * mean
            bounds = analytic.poigamma_tail_bounds(params, alpha)
            score(float(np.mean(z >= mean + alpha)), bounds.upper)
        sq = np.sqrt(z)
        root = math.sqrt(mean)
        for beta in _BETAS:
            bound = analytic.sqrt_tail_bound(r, beta)
            score(float(np.mean(sq <= (1.0 - beta) * root)), bound)
            score(float(np.mean(sq >= (1.0 + beta) * root)), bound)
        rows.append(CheckRow(
            check=f"tail_bounds_r={r:g}_lam={lam:g}",
            passed=violations == 0,
            statistic=worst,
            threshold=3.0,
            detail="max excess over bound in binomial-SE units, 20 tail events",
        ))
    return rows


def _sampler_density_ks_row(seed: int, draws: int = 100_000) -> CheckRow:
    l = 5.0
    z = analytic.poigamma_sample_many(analytic.PoiGammaParams(l * l, 1.0), draws,
                                      replica_rng(seed, 71))
    sq = np.sqrt(z[z > 0.0])
    atom = math.exp(-l * l)

    def cond_cdf(y):
        return (analytic.sqrt_poigamma_cdf(l, y) - atom) / (1.0 - atom)

    stat = ks_statistic(sq, cond_cdf)
    crit = ks_critical_1pct(sq.size)
    return CheckRow(
        check="sampler_vs_density_ks_l=5",
        passed=stat < crit,
        statistic=stat,
        threshold=crit,
        detail=f"KS of sqrt(Z) | Z>0 against normalized continuous CDF, N={sq.size}",
    )


def _mgf_rows(seed: int, draws: int = 100_000) -> list[CheckRow]:
    rows = []
    for ci, (r, theta) in enumerate((r, th) for r in (1.0, 9.0) for th in (0.25, 1.0, 4.0)):
        params = analytic.PoiGammaParams(r, 1.0)
        z = analytic.poigamma_sample_many(params, draws, replica_rng(seed, 72, ci))
        vals = np.exp(-theta * z)
        emp = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(draws))
        exact = analytic.poigamma_mgf_neg(theta, params)
        gap = abs(emp - exact)
        rows.append(CheckRow(
            check=f"mgf_r={r:g}_theta={theta:g}",
            passed=gap <= 3.0 * se,
            statistic=gap / se if se > 0 else 0.0,
            threshold=3.0,
            detail=f"|empirical - exp(-theta r/(1+theta))| in SE units, exact={exact:.6g}",
        ))
    return rows


def verify_analytic(seed: int) -> list[CheckRow]:
    """Run the full analytic invariant suite; deterministic given seed."""
    rows = []
    rows.extend(_normalization_rows())
    rows.append(_bessel_overlap_row())
    rows.append(_envelope_row())
    rows.extend(_tail_bound_rows(seed))
    rows.append(_sampler_density_ks_row(seed))
    rows.extend(_mgf_rows(seed))
    return rows
