import math

import numpy as np
import pytest

from covertree import (
    PoiGammaParams,
    TreeParams,
    fit_centering,
    ks_critical_1pct,
    ks_statistic,
    poigamma_cdf,
    poigamma_sample_many,
    replica_rng,
    run_replicas,
    sample_field_values,
    threshold_scan,
)
from covertree.replicas import run_replica_records, summarize_values

SEED = 1234321


def test_constant_estimator():
    s = run_replicas(lambda rng: 2.5, 100, SEED)
    assert s.estimate == 2.5 and s.stderr == 0.0 and s.replicas == 100


def test_worker_count_does_not_change_bits():
    est = lambda rng: rng.standard_normal() + rng.standard_gamma(3.0)
    s1 = run_replicas(est, 5_000, SEED, workers=1)
    s8 = run_replicas(est, 5_000, SEED, workers=8)
    assert s1 == s8


def test_merge_matches_sequential_reference():
    # any batching must reproduce the canonical replica-ordered reduction
    est = lambda rng: rng.random()
    values = np.array([est(replica_rng(SEED, i)) for i in range(1_000)])
    ref = summarize_values(values, SEED)
    assert run_replicas(est, 1_000, SEED, workers=4) == ref


def test_leaf_zero_bernoulli_estimator():
    p = TreeParams(1)

    def leaf_zero(rng):
        return 1.0 if sample_field_values(p, 1.0, rng)[1] == 0.0 else 0.0

    s = run_replicas(leaf_zero, 10_000, SEED)
    target = math.exp(-1.0)
    assert abs(s.estimate - target) <= 3 * math.sqrt(target * (1 - target) / s.replicas)


def test_record_runner_orders_and_fingerprints():
    recs = run_replica_records(
        lambda i, rng, fp: {"replica": i, "seed": fp, "u": rng.random()},
        50, SEED, workers=4,
    )
    assert [r["replica"] for r in recs] == list(range(50))
    assert len({r["seed"] for r in recs}) == 50
    assert run_replica_records(lambda i, rng, fp: {"replica": i}, 0, SEED) == []


# ---------------------------------------------------------------------------
# KS statistic
# ---------------------------------------------------------------------------


def test_ks_calibration_under_the_null():
    # samples drawn from the very CDF under test: stat below the 1% critical
    # value in at least 95 of 100 repetitions
    p = PoiGammaParams(2.0, 1.0)
    cdf = lambda z: poigamma_cdf(p, z)
    n = 10_000
    below = sum(
        ks_statistic(poigamma_sample_many(p, n, replica_rng(SEED, 10, rep)), cdf)
        < ks_critical_1pct(n)
        for rep in range(100)
    )
    assert below >= 95


def test_ks_atom_gap():
    # all mass at 0 against a CDF with atom exp(-2) there
    samples = np.zeros(1_000)
    cdf = lambda z: poigamma_cdf(PoiGammaParams(2.0, 1.0), z)
    assert ks_statistic(samples, cdf) == pytest.approx(1.0 - math.exp(-2.0), abs=1e-12)


def test_ks_empirical_cdf_against_itself_is_zero():
    samples = replica_rng(SEED, 11).random(500)
    sorted_samples = np.sort(samples)
    ecdf = lambda x: np.searchsorted(sorted_samples, x, side="right") / sorted_samples.size
    assert ks_statistic(samples, ecdf) == 0.0


def test_ks_needs_enough_samples():
    with pytest.raises(ValueError):
        ks_statistic(np.arange(5), lambda x: x)


# ---------------------------------------------------------------------------
# threshold scan
# ---------------------------------------------------------------------------


def test_scan_depth1_closed_form():
    # P(covered) = (1 - e^{-t})^2, so the half-coverage point solves
    # 1 - e^{-t} = sqrt(1/2)
    res = threshold_scan(TreeParams(1), target=0.5, tolerance=0.02, seed=SEED,
                         replicas_per_probe=30_000)
    exact = -math.log(1.0 - math.sqrt(0.5))
    assert exact == pytest.approx(1.2279, abs=1e-4)
    assert abs(res.t_star - exact) <= 0.02 * exact
    assert not res.flagged


def test_scan_coverage_monotone_in_t():
    p = TreeParams(6)
    res = threshold_scan(p, target=0.5, tolerance=0.05, seed=SEED, replicas_per_probe=1_000)

    def coverage(t, key):
        from covertree import backend

        def est(rng):
            min_leaf, _, _ = backend.kernels.rk_field(rng.bit_generator, 6, t, True,
                                                      None, None, None)
            return 1.0 if min_leaf > 0 else 0.0

        return run_replicas(est, 4_000, SEED, key=(key,))

    low = coverage(res.t_star / 1.5, 100)
    high = coverage(res.t_star * 1.5, 101)
    assert high.estimate > low.estimate


def test_scan_flags_exhausted_budget():
    res = threshold_scan(TreeParams(4), target=0.5, tolerance=0.001, seed=SEED,
                         budget=3, replicas_per_probe=200)
    assert res.flagged and not res.converged
    assert res.probes == 3


def test_scan_validation():
    with pytest.raises(ValueError):
        threshold_scan(TreeParams(3), target=1.5, tolerance=0.02, seed=SEED)
    with pytest.raises(ValueError):
        threshold_scan(TreeParams(3), target=0.5, tolerance=0.0, seed=SEED)


# ---------------------------------------------------------------------------
# centering fit
# ---------------------------------------------------------------------------


def test_fit_exact_recovery():
    ns = np.arange(5, 15)
    vals = 2.0 * ns - 0.7 * np.log(ns) + 1.0
    fit = fit_centering(list(zip(ns, vals)))
    assert fit.A == pytest.approx(2.0, abs=1e-9)
    assert fit.B == pytest.approx(-0.7, abs=1e-9)
    assert fit.C == pytest.approx(1.0, abs=1e-9)
    assert fit.residual_rms <= 1e-9
    assert fit.n_range == (5, 14)
    # refitting the model's own predictions returns the same coefficients
    refit = fit_centering(list(zip(ns, fit.predict(ns))))
    assert refit.A == pytest.approx(fit.A, abs=1e-9)
    assert refit.B == pytest.approx(fit.B, abs=1e-9)
    assert refit.C == pytest.approx(fit.C, abs=1e-9)


def test_fit_requires_four_distinct_depths():
    with pytest.raises(ValueError):
        fit_centering([(8, 1.0), (8, 1.1), (9, 1.2), (10, 1.3)])
