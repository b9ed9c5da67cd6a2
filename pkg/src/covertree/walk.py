"""Event-driven continuous-time random walk on the tree: the exact oracle.

Clock convention: unit-mean exponential holding time at every vertex,
uniformly random neighbor jumps, local time = occupation time / degree.
This is the unique convention under which every vertex's local time at the
inverse local time has mean t (the stationary measure of the embedded chain
is proportional to degree), and it is what the fast field sampler is
validated against.  Plain event loop, no shortcuts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .tree import TreeParams


@dataclass(frozen=True)
class WalkOutcome:
    """One replica: stopping time, cover information, and optional field.

    tau_t is the wall-clock inverse local time (None for cover-only runs);
    cover_time is None when the walk stopped before visiting every vertex;
    covered says whether all vertices were visited by the stopping time.
    field, when requested, is the heap-ordered array of degree-normalized
    local times at tau_t (root entry exactly t).
    """

    tau_t: float | None
    cover_time: float | None
    covered: bool
    jump_count: int
    field: np.ndarray | None = None


def run_until_inverse_local_time(
    p: TreeParams,
    t: float,
    rng: np.random.Generator,
    include_field: bool = False,
) -> WalkOutcome:
    """Simulate until the root's local time reaches t exactly.

    The final holding interval at the root is truncated, so the stopping
    rule is exact rather than aligned to a jump.
    """
    if p.depth < 1:
        raise ValueError(f"walk requires depth >= 1, got {p.depth}")
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    tau, cover_time, covered, jumps, field = backend.kernels.walk_inverse_local_time(
        rng.bit_generator, p.depth, t, include_field
    )
    return WalkOutcome(
        tau_t=tau,
        cover_time=None if math.isnan(cover_time) else cover_time,
        covered=bool(covered),
        jump_count=int(jumps),
        field=field,
    )


def run_until_cover(p: TreeParams, rng: np.random.Generator) -> WalkOutcome:
    """Simulate until every vertex has been visited."""
    if p.depth < 1:
        raise ValueError(f"walk requires depth >= 1, got {p.depth}")
    cover_time, jumps = backend.kernels.walk_cover(rng.bit_generator, p.depth)
    return WalkOutcome(
        tau_t=None,
        cover_time=cover_time,
        covered=True,
        jump_count=int(jumps),
        field=None,
    )
