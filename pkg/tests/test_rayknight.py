import math

import numpy as np
import pytest

from covertree import (
    PoiGammaParams,
    TreeParams,
    conditional_zero_prob,
    ks_critical_1pct,
    ks_statistic,
    poigamma_cdf,
    replica_rng,
    sample_field,
    sample_field_values,
    uncover_probability,
)
from covertree.rayknight import field_summaries
from covertree.tree import VertexRef, heap_index
from covertree.walk import run_until_inverse_local_time

SEED = 424242


def test_root_value_pinned():
    p = TreeParams(3)
    for t in (0.01, 1.0, 7.5):
        vals = sample_field_values(p, t, replica_rng(SEED, 0))
        assert vals[0] == t


def test_fixed_leaf_zero_probability():
    # P(a fixed leaf untouched) = exp(-t/depth), here exp(-1/2)
    p = TreeParams(4)
    reps = 100_000
    leaf = heap_index(VertexRef(4, 0))
    hits = 0
    any_zero = 0
    for i in range(reps):
        vals = sample_field_values(p, 2.0, replica_rng(SEED, 1, i))
        hits += vals[leaf] == 0.0
        any_zero += np.min(vals[(1 << 4) - 1 :]) == 0.0
    target = math.exp(-0.5)
    se = math.sqrt(target * (1 - target) / reps)
    assert abs(hits / reps - target) <= 3 * se
    assert any_zero >= hits  # min over leaves dominates any fixed leaf


def test_level3_marginal_law():
    p = TreeParams(6)
    reps = 20_000
    idx = heap_index(VertexRef(3, 0))
    samples = np.empty(reps)
    for i in range(reps):
        samples[i] = sample_field_values(p, 4.0, replica_rng(SEED, 2, i))[idx]
    stat = ks_statistic(samples, lambda z: poigamma_cdf(PoiGammaParams(4.0 / 3.0, 3.0), z))
    assert stat < ks_critical_1pct(reps)


def test_conditional_zero_prob_values():
    assert conditional_zero_prob(0.0, 5) == 1.0
    assert conditional_zero_prob(2.0, 3) == pytest.approx(math.exp(-2.0 / 3.0), rel=1e-12)
    assert conditional_zero_prob(2.0, 3) == pytest.approx(0.51342, abs=1e-5)
    with pytest.raises(ValueError):
        conditional_zero_prob(1.0, 0)
    with pytest.raises(ValueError):
        conditional_zero_prob(-1.0, 2)


def test_conditional_zero_prob_matches_chained_sampler():
    # two PoiGamma(., 1) steps from 3; terminal-zero frequency vs exp(-3/2)
    rng = replica_rng(SEED, 3)
    reps = 100_000
    n1 = rng.poisson(3.0, reps)
    v1 = rng.standard_gamma(n1)
    v2 = rng.standard_gamma(rng.poisson(v1))
    freq = np.mean(v2 == 0.0)
    target = conditional_zero_prob(3.0, 2)
    assert abs(freq - target) <= 3 * math.sqrt(target * (1 - target) / reps)


def test_uncover_probability_tiny_t():
    est = uncover_probability(TreeParams(3), 1e-9, 1_000, SEED)
    assert est.estimate >= 0.999


def test_uncover_probability_depth1_closed_form():
    # two independent PoiGamma(1,1) leaves; inclusion-exclusion
    est = uncover_probability(TreeParams(1), 1.0, 10_000, SEED)
    target = 1.0 - (1.0 - math.exp(-1.0)) ** 2
    assert target == pytest.approx(0.6004, abs=2e-4)
    se = math.sqrt(target * (1 - target) / est.replicas)
    assert abs(est.estimate - target) <= 3 * se


def test_engines_agree_on_uncover_probability():
    p, t, reps = TreeParams(3), 2.0, 10_000
    rk = uncover_probability(p, t, reps, SEED)
    walk_zero = np.empty(reps)
    for i in range(reps):
        o = run_until_inverse_local_time(p, t, replica_rng(SEED, 4, i), include_field=True)
        walk_zero[i] = np.min(o.field[(1 << 3) - 1 :]) == 0.0
    walk_est = walk_zero.mean()
    walk_se = walk_zero.std(ddof=1) / math.sqrt(reps)
    assert abs(rk.estimate - walk_est) <= 3 * math.hypot(rk.stderr, walk_se)


def test_composition_matches_one_shot_marginal():
    # chaining d unit steps from 6 vs PoiGamma(6/d, d): mean 6, variance 12d
    rng = replica_rng(SEED, 5)
    reps = 20_000
    for d in (2, 3, 5):
        vals = np.full(reps, 6.0)
        for _ in range(d):
            vals = rng.standard_gamma(rng.poisson(vals))
        ref = PoiGammaParams(6.0 / d, float(d))
        se_mean = math.sqrt(ref.variance / reps)
        assert abs(vals.mean() - 6.0) <= 4 * se_mean
        assert abs(vals.var(ddof=1) - ref.variance) <= 4 * ref.variance * math.sqrt(8.0 / reps)


def test_pruning_is_stream_neutral():
    p = TreeParams(5)
    a = sample_field_values(p, 0.05, replica_rng(SEED, 6), prune=True)
    b = sample_field_values(p, 0.05, replica_rng(SEED, 6), prune=False)
    assert np.array_equal(a, b)
    assert np.any(a == 0.0)  # tiny t so pruning actually triggered


def test_determinism_across_worker_counts():
    p = TreeParams(4)
    one = field_summaries(p, 2.0, 300, SEED, emit_levels=True, workers=1)
    eight = field_summaries(p, 2.0, 300, SEED, emit_levels=True, workers=8)
    for a, b in zip(one, eight):
        assert a.min_leaf == b.min_leaf
        assert a.zero_leaf_count == b.zero_leaf_count
        assert np.array_equal(a.level_min, b.level_min)
        assert np.array_equal(a.level_mean, b.level_mean)
    u1 = uncover_probability(p, 2.0, 2_000, SEED, workers=1)
    u8 = uncover_probability(p, 2.0, 2_000, SEED, workers=8)
    assert u1 == u8


def test_sibling_values_uncorrelated():
    reps = 100_000
    pairs = np.empty((reps, 2))
    p = TreeParams(2)
    for i in range(reps):
        vals = sample_field_values(p, 3.0, replica_rng(SEED, 7, i))
        pairs[i] = vals[1], vals[2]
    corr = np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]
    assert abs(corr) <= 3.0 / math.sqrt(reps)


def test_summary_fields_consistent():
    p = TreeParams(5)
    s = sample_field(p, 1.0, replica_rng(SEED, 8), emit_levels=True)
    assert s.level_min[0] == 1.0 and s.level_mean[0] == 1.0
    assert s.level_min[-1] == s.min_leaf
    assert s.covered == (s.min_leaf > 0.0)
    assert (s.zero_leaf_count == 0) == (s.min_leaf > 0.0)
    if s.covered:
        assert not s.zero_vertex_exists


def test_visitor_reports_every_vertex():
    p = TreeParams(4)
    seen = {}
    s = sample_field(p, 2.0, replica_rng(SEED, 9),
                     visitor=lambda lev, idx, val: seen.__setitem__((lev, idx), val))
    assert len(seen) == p.vertex_count
    assert seen[(0, 0)] == 2.0
    assert min(seen[(4, i)] for i in range(16)) == s.min_leaf


def test_validation():
    with pytest.raises(ValueError):
        sample_field(TreeParams(0), 1.0, replica_rng(SEED, 10))
    with pytest.raises(ValueError):
        sample_field(TreeParams(3), 0.0, replica_rng(SEED, 10))
    with pytest.raises(ValueError):
        sample_field_values(TreeParams(27), 1.0, replica_rng(SEED, 10))
