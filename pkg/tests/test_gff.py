import math

import numpy as np
import pytest

from covertree import (
    TreeParams,
    gff_leaf_variance_check,
    ks_critical_1pct,
    ks_statistic,
    replica_rng,
    sample_gff_max,
    sample_gff_values,
)
from covertree.gff import gff_summaries, sample_root_leaf_path

SEED = 991199


def test_depth1_max_closed_form():
    # E max of two independent standard Gaussians = 1/sqrt(pi)
    reps = 100_000
    vals = np.array([s.max_leaf for s in gff_summaries(TreeParams(1), reps, SEED)])
    target = 1.0 / math.sqrt(math.pi)
    se = vals.std(ddof=1) / math.sqrt(reps)
    assert abs(vals.mean() - target) <= 3 * se


def test_max_all_nonnegative_and_dominates_leaf():
    p = TreeParams(5)
    for i in range(500):
        s = sample_gff_max(p, replica_rng(SEED, 1, i))
        assert s.max_all >= 0.0  # the root value 0 is included
        assert s.max_all >= s.max_leaf
        assert 0 <= s.argmax_level <= p.depth


def test_path_variance_grows_linearly():
    variances = gff_leaf_variance_check(TreeParams(7), 10_000, SEED)
    assert variances[0] == 0.0
    se7 = 7.0 * math.sqrt(2.0 / (10_000 - 1))
    assert abs(variances[7] - 7.0) <= 4 * se7


def test_path_increments_standard_gaussian():
    reps, depth = 2_000, 7
    incs = np.concatenate([
        np.diff(sample_root_leaf_path(TreeParams(depth), replica_rng(SEED, 2, i)))
        for i in range(reps)
    ])
    phi = lambda x: 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))
    stat = ks_statistic(incs, phi)
    assert stat < ks_critical_1pct(incs.size)


def test_leaf_covariances_match_ancestry_depth2():
    reps = 100_000
    leaves = np.empty((reps, 4))
    p = TreeParams(2)
    for i in range(reps):
        leaves[i] = sample_gff_values(p, replica_rng(SEED, 3, i))[3:]
    cov = np.cov(leaves, rowvar=False)
    # siblings share one edge (cov 1); cousins only the root (cov 0)
    for (a, b), target in (((0, 1), 1.0), ((2, 3), 1.0), ((0, 2), 0.0),
                            ((0, 3), 0.0), ((1, 2), 0.0), ((1, 3), 0.0)):
        se = math.sqrt((cov[a, a] * cov[b, b] + target**2) / reps)
        assert abs(cov[a, b] - target) <= 4 * se
    for a in range(4):
        assert abs(cov[a, a] - 2.0) <= 4 * 2.0 * math.sqrt(2.0 / reps)


def test_determinism_across_worker_counts():
    p = TreeParams(6)
    one = gff_summaries(p, 200, SEED, workers=1)
    eight = gff_summaries(p, 200, SEED, workers=8)
    assert one == eight


def test_validation():
    with pytest.raises(ValueError):
        sample_gff_max(TreeParams(0), replica_rng(SEED, 4))
    with pytest.raises(ValueError):
        sample_gff_values(TreeParams(27), replica_rng(SEED, 4))
    with pytest.raises(ValueError):
        gff_leaf_variance_check(TreeParams(3), 1, SEED)
