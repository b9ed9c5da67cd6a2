"""Streaming sampler of the Gaussian free field on the tree and its maxima.

The field puts an independent standard Gaussian on every edge and assigns
each vertex the sum along its root path, so variances grow linearly with
level and covariances equal the level of the common ancestor.  Sampled by
the same O(depth)-memory depth-first traversal as the local-time field, with
the same per-replica stream contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .replicas import _run_indexed, replica_rng
from .tree import TreeParams


@dataclass(frozen=True)
class GffSummary:
    """Maxima of one field replica; max_all includes internal vertices
    (and the root value 0), max_leaf only the bottom level."""

    max_all: float
    max_leaf: float
    argmax_level: int


def sample_gff_max(p: TreeParams, rng: np.random.Generator) -> GffSummary:
    if p.depth < 1:
        raise ValueError(f"gff sampling requires depth >= 1, got {p.depth}")
    max_all, max_leaf, argmax_level = backend.kernels.gff_max(rng.bit_generator, p.depth, None)
    return GffSummary(float(max_all), float(max_leaf), int(argmax_level))


def sample_gff_values(p: TreeParams, rng: np.random.Generator) -> np.ndarray:
    """One replica materialized as a heap-ordered array (small depths)."""
    if p.depth < 1:
        raise ValueError(f"gff sampling requires depth >= 1, got {p.depth}")
    if p.depth > 26:
        raise ValueError(f"depth {p.depth} too large to materialize; use sample_gff_max")
    out = np.empty(p.vertex_count)
    backend.kernels.gff_max(rng.bit_generator, p.depth, out)
    return out


def sample_root_leaf_path(p: TreeParams, rng: np.random.Generator) -> np.ndarray:
    """Field values along one fixed root-to-leaf path: cumulative sum of
    depth independent standard Gaussians, entry k having variance k."""
    steps = rng.standard_normal(p.depth)
    return np.concatenate(([0.0], np.cumsum(steps)))


def gff_leaf_variance_check(p: TreeParams, replicas: int, seed: int) -> np.ndarray:
    """Empirical variance of the path field per level over independent
    replicas; entry k should sit near k."""
    if replicas < 2:
        raise ValueError(f"variance check needs >= 2 replicas, got {replicas}")
    paths = np.empty((replicas, p.depth + 1))

    def one(i: int) -> None:
        paths[i] = sample_root_leaf_path(p, replica_rng(seed, i))

    _run_indexed(one, replicas, None)
    return paths.var(axis=0, ddof=1)


def gff_summaries(
    p: TreeParams, replicas: int, seed: int, workers: int | None = None
) -> list[GffSummary]:
    """Replica-indexed list of GffSummary, deterministic in (seed, replicas)."""
    out: list = [None] * replicas

    def one(i: int) -> None:
        out[i] = sample_gff_max(p, replica_rng(seed, i))

    _run_indexed(one, replicas, workers)
    return out
