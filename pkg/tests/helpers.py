"""Shared oracles for the test suite (independent of the code they check)."""

import math

import numpy as np


def lca_level(u: int, v: int) -> int:
    """Level of the lowest common ancestor of two heap indices."""
    while u != v:
        if u > v:
            u = (u - 1) >> 1
        else:
            v = (v - 1) >> 1
    return (u + 1).bit_length() - 1


def exact_tau_variance(n: int, t: float) -> float:
    """Var of tau(t) from the closed covariance structure of the field.

    Cov(L_u, L_v) equals Var(L_w) = 2 * level(w) * t at the common ancestor w
    (given L_w, the branches are independent with conditional mean L_w), so
    Var(sum_v d_v L_v) = 2t * sum_{u,v} d_u d_v level(lca(u, v)).
    """
    nv = (1 << (n + 1)) - 1
    first_leaf = (1 << n) - 1
    deg = np.full(nv, 3.0)
    deg[0] = 2.0
    deg[first_leaf:] = 1.0
    total = 0.0
    for u in range(nv):
        for v in range(nv):
            total += deg[u] * deg[v] * lca_level(u, v)
    return 2.0 * t * total


def variance_stderr(x: np.ndarray) -> float:
    """Standard error of the sample variance (fourth-moment formula)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    m = x.mean()
    m2 = np.mean((x - m) ** 2)
    m4 = np.mean((x - m) ** 4)
    return math.sqrt(max(m4 - (n - 3) / (n - 1) * m2 * m2, 0.0) / n)


def mean_diff_within(a: np.ndarray, b: np.ndarray, k: float) -> bool:
    """|mean(a) - mean(b)| <= k combined standard errors."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    se = math.hypot(a.std(ddof=1) / math.sqrt(a.size), b.std(ddof=1) / math.sqrt(b.size))
    return abs(a.mean() - b.mean()) <= k * se


def var_diff_within(a: np.ndarray, b: np.ndarray, k: float) -> bool:
    """|var(a) - var(b)| <= k combined standard errors of the variances."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    se = math.hypot(variance_stderr(a), variance_stderr(b))
    return abs(a.var(ddof=1) - b.var(ddof=1)) <= k * se
