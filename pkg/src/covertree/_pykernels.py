"""Pure-Python kernels: reference implementations of the hot loops.

Each function here consumes random variates from the supplied BitGenerator in
exactly the same order as its compiled twin in ``_kernels.pyx``, so the two
backends produce bit-identical output for equal seeds.  The draw order is the
contract; keep both files in sync.

PoiGamma(r, lam) is the compound Poisson-exponential law: a Poisson(r) number
of independent exponentials with mean lam (atom exp(-r) at zero).  A single
gamma variate replaces the explicit exponential sum once the count exceeds 32;
the two are identical in law.  Poisson draws with rate 0 consume no random
bits, which makes subtree pruning in ``rk_field`` stream-neutral.
"""

from __future__ import annotations

import math

import numpy as np

COMPILED = False

_GAMMA_CUTOFF = 32


def poigamma_draw(bit_generator, r: float, lam: float) -> float:
    """One PoiGamma(r, lam) variate from the given bit generator."""
    gen = np.random.Generator(bit_generator)
    n = int(gen.poisson(r))
    if n == 0:
        return 0.0
    if n <= _GAMMA_CUTOFF:
        s = 0.0
        for _ in range(n):
            s += gen.standard_exponential()
    else:
        s = float(gen.standard_gamma(n))
    return lam * s


def walk_inverse_local_time(bit_generator, depth: int, t: float, collect_field: bool):
    """Continuous-time walk from the root until the root's local time hits t.

    Unit-mean exponential holding at every vertex, uniformly random neighbor
    jumps, occupation divided by degree.  The final holding interval at the
    root is truncated so the root's occupation equals ``t * degree(root)``
    exactly.  Returns (tau_t, cover_time, covered, jumps, field) with
    cover_time = nan when some vertex was never visited; field is the
    heap-ordered array of degree-normalized local times or None.
    """
    gen = np.random.Generator(bit_generator)
    nv = (1 << (depth + 1)) - 1
    first_leaf = (1 << depth) - 1
    occ = np.zeros(nv)
    visited = np.zeros(nv, dtype=np.uint8)
    visited[0] = 1
    remaining = nv - 1
    target = 2.0 * t  # degree(root) = 2 for depth >= 1
    pos = 0
    now = 0.0
    jumps = 0
    cover_time = math.nan
    while True:
        h = gen.standard_exponential()
        if pos == 0 and occ[0] + h >= target:
            now += target - occ[0]
            occ[0] = target
            break
        occ[pos] += h
        now += h
        if pos >= first_leaf:
            pos = (pos - 1) >> 1
        elif pos == 0:
            pos = 1 + int(gen.random() * 2.0)
        else:
            k = int(gen.random() * 3.0)
            pos = (pos - 1) >> 1 if k == 0 else 2 * pos + k
        jumps += 1
        if not visited[pos]:
            visited[pos] = 1
            remaining -= 1
            if remaining == 0:
                cover_time = now
    field = None
    if collect_field:
        field = occ.copy()
        field[0] /= 2.0
        field[1:first_leaf] /= 3.0
    return now, cover_time, remaining == 0, jumps, field


def walk_cover(bit_generator, depth: int):
    """Run the walk until every vertex has been visited.

    Same holding/jump draws as ``walk_inverse_local_time``; returns
    (cover_time, jumps).
    """
    gen = np.random.Generator(bit_generator)
    nv = (1 << (depth + 1)) - 1
    first_leaf = (1 << depth) - 1
    visited = np.zeros(nv, dtype=np.uint8)
    visited[0] = 1
    remaining = nv - 1
    pos = 0
    now = 0.0
    jumps = 0
    while remaining:
        now += gen.standard_exponential()
        if pos >= first_leaf:
            pos = (pos - 1) >> 1
        elif pos == 0:
            pos = 1 + int(gen.random() * 2.0)
        else:
            k = int(gen.random() * 3.0)
            pos = (pos - 1) >> 1 if k == 0 else 2 * pos + k
        jumps += 1
        if not visited[pos]:
            visited[pos] = 1
            remaining -= 1
    return now, jumps


def rk_field(bit_generator, depth: int, t: float, prune: bool,
             out_values=None, level_min=None, level_sum=None, visitor=None):
    """Depth-first sample of the local-time field at inverse local time t.

    Root value t; each child value is an independent PoiGamma(parent, 1)
    draw; subtrees rooted at a zero are all-zero (skipped entirely when
    ``prune``, which changes no random draws since a rate-0 Poisson consumes
    no bits).  Preorder traversal with left child before right; the explicit
    stack stays below depth + 2 entries.

    Optional outputs: ``out_values`` (heap-ordered array of length 2^(d+1)-1),
    ``level_min`` / ``level_sum`` (length depth + 1), and a
    ``visitor(level, index, value)`` callback invoked per vertex.
    Returns (min_leaf, zero_leaf_count, zero_vertex_exists).
    """
    gen = np.random.Generator(bit_generator)
    min_leaf = math.inf
    zero_leaves = 0
    zero_vertex = False
    if level_min is not None:
        level_min[:] = math.inf
    if level_sum is not None:
        level_sum[:] = 0.0
    # stack entries: (level, index-within-level, value)
    stack = [(0, 0, t)]
    while stack:
        lev, idx, val = stack.pop()
        if out_values is not None:
            out_values[((1 << lev) - 1) + idx] = val
        if level_min is not None and val < level_min[lev]:
            level_min[lev] = val
        if level_sum is not None:
            level_sum[lev] += val
        if visitor is not None:
            visitor(lev, idx, val)
        if val == 0.0:
            zero_vertex = True
        if lev == depth:
            if val < min_leaf:
                min_leaf = val
            if val == 0.0:
                zero_leaves += 1
        else:
            if val == 0.0 and prune:
                left = right = 0.0
            else:
                left = _poigamma_from(gen, val)
                right = _poigamma_from(gen, val)
            stack.append((lev + 1, 2 * idx + 1, right))
            stack.append((lev + 1, 2 * idx, left))
    return min_leaf, zero_leaves, zero_vertex


def _poigamma_from(gen, r: float) -> float:
    n = int(gen.poisson(r))
    if n == 0:
        return 0.0
    if n <= _GAMMA_CUTOFF:
        s = 0.0
        for _ in range(n):
            s += gen.standard_exponential()
        return s
    return float(gen.standard_gamma(n))


def gff_max(bit_generator, depth: int, out_values=None):
    """Depth-first sample of the Gaussian free field; returns its maxima.

    One standard Gaussian per edge, summed along root paths (root value 0,
    no draw).  Same preorder/stack discipline as ``rk_field``.  Returns
    (max_all, max_leaf, argmax_level) where argmax_level is the level of the
    first preorder vertex attaining max_all.
    """
    gen = np.random.Generator(bit_generator)
    max_all = -math.inf
    max_leaf = -math.inf
    argmax_level = 0
    stack = [(0, 0, 0.0)]
    while stack:
        lev, idx, val = stack.pop()
        if out_values is not None:
            out_values[((1 << lev) - 1) + idx] = val
        if val > max_all:
            max_all = val
            argmax_level = lev
        if lev == depth:
            if val > max_leaf:
                max_leaf = val
        else:
            left = val + gen.standard_normal()
            right = val + gen.standard_normal()
            stack.append((lev + 1, 2 * idx + 1, right))
            stack.append((lev + 1, 2 * idx, left))
    return max_all, max_leaf, argmax_level
