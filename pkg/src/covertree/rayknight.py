"""Fast exact sampler of the local-time field at an inverse local time.

The field has a Markov branching structure down the tree: the root value is
pinned to t, each child's value given its parent's value l is an independent
PoiGamma(l, 1) draw, and the two subtrees below a vertex are conditionally
independent.  A depth-first traversal with an O(depth) value stack streams
the 2^n-vertex field without materializing it; subtrees under a zero are
pruned (a rate-0 Poisson consumes no random bits, so pruning does not move
the stream).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import backend
from .replicas import ReplicaSummary, replica_rng, run_replicas
from .tree import TreeParams


@dataclass(frozen=True)
class FieldSummary:
    """Per-replica field digest.

    covered means no vertex has zero local time; because an untouched vertex
    shields its whole subtree, this is equivalent to min_leaf > 0.
    """

    min_leaf: float
    zero_leaf_count: int
    zero_vertex_exists: bool
    covered: bool
    level_min: np.ndarray | None = None
    level_mean: np.ndarray | None = None


def sample_field(
    p: TreeParams,
    t: float,
    rng: np.random.Generator,
    visitor: Callable[[int, int, float], None] | None = None,
    emit_levels: bool = False,
    prune: bool = True,
) -> FieldSummary:
    """One field replica; optional visitor(level, index, value) per vertex.

    The visitor path runs the pure-Python kernel (identical stream), so
    supplying one never changes the sampled values.
    """
    if p.depth < 1:
        raise ValueError(f"field sampling requires depth >= 1, got {p.depth}")
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    level_min = np.empty(p.depth + 1) if emit_levels else None
    level_sum = np.empty(p.depth + 1) if emit_levels else None
    if visitor is not None:
        res = backend.pykernels.rk_field(
            rng.bit_generator, p.depth, t, prune, None, level_min, level_sum, visitor
        )
    else:
        res = backend.kernels.rk_field(
            rng.bit_generator, p.depth, t, prune, None, level_min, level_sum
        )
    min_leaf, zero_leaves, zero_vertex = res
    level_mean = None
    if emit_levels:
        level_mean = level_sum / (1 << np.arange(p.depth + 1))
    return FieldSummary(
        min_leaf=float(min_leaf),
        zero_leaf_count=int(zero_leaves),
        zero_vertex_exists=bool(zero_vertex),
        covered=min_leaf > 0.0,
        level_min=level_min,
        level_mean=level_mean,
    )


def sample_field_values(
    p: TreeParams, t: float, rng: np.random.Generator, prune: bool = True
) -> np.ndarray:
    """One field replica materialized as a heap-ordered array (small depths)."""
    if p.depth < 1:
        raise ValueError(f"field sampling requires depth >= 1, got {p.depth}")
    if p.depth > 26:
        raise ValueError(f"depth {p.depth} too large to materialize; use sample_field")
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    out = np.empty(p.vertex_count)
    backend.kernels.rk_field(rng.bit_generator, p.depth, t, prune, out, None, None)
    return out


def conditional_zero_prob(l: float, d: int) -> float:
    """P(a vertex at distance d below an ancestor with local time l is
    untouched) = exp(-l / d)."""
    if l < 0:
        raise ValueError(f"l must be >= 0, got {l}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return math.exp(-l / d)


def uncover_probability(
    p: TreeParams, t: float, replicas: int, seed: int, workers: int | None = None
) -> ReplicaSummary:
    """Monte Carlo estimate of P(some leaf has zero local time at tau(t))."""

    def estimator(rng: np.random.Generator) -> float:
        min_leaf, _, _ = backend.kernels.rk_field(
            rng.bit_generator, p.depth, t, True, None, None, None
        )
        return 1.0 if min_leaf == 0.0 else 0.0

    return run_replicas(estimator, replicas, seed, workers=workers)


def field_summaries(
    p: TreeParams,
    t: float,
    replicas: int,
    seed: int,
    emit_levels: bool = False,
    workers: int | None = None,
) -> list[FieldSummary]:
    """Replica-indexed list of FieldSummary, deterministic in (seed, replicas)."""
    out: list = [None] * replicas

    def one(i: int) -> None:
        out[i] = sample_field(p, t, replica_rng(seed, i), emit_levels=emit_levels)

    from .replicas import _run_indexed

    _run_indexed(one, replicas, workers)
    return out
