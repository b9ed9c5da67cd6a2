"""Complete rooted binary tree of depth n: indexing, ancestry, degrees, counts.

Vertices are addressed by (level, index within level); the children of
(k, i) are (k + 1, 2i) and (k + 1, 2i + 1), so ancestor lookup is a bit
shift and nothing is ever stored.  Level 0 is the root, level n the leaves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple


@dataclass(frozen=True)
class TreeParams:
    """Depth of the complete rooted binary tree (levels 0..depth)."""

    depth: int

    def __post_init__(self):
        if not isinstance(self.depth, int) or self.depth < 0:
            raise ValueError(f"depth must be a nonnegative integer, got {self.depth!r}")

    @property
    def vertex_count(self) -> int:
        return (1 << (self.depth + 1)) - 1

    @property
    def edge_count(self) -> int:
        return (1 << (self.depth + 1)) - 2

    @property
    def leaf_count(self) -> int:
        return 1 << self.depth


class TreeCounts(NamedTuple):
    vertices: int
    edges: int
    leaves: int


@dataclass(frozen=True, order=True)
class VertexRef:
    """Vertex at (level, index), 0 <= index < 2^level."""

    level: int
    index: int


ROOT = VertexRef(0, 0)


def is_valid(v: VertexRef, p: TreeParams) -> bool:
    return 0 <= v.level <= p.depth and 0 <= v.index < (1 << v.level)


def _check(v: VertexRef, p: TreeParams) -> None:
    if not is_valid(v, p):
        raise ValueError(f"vertex {v} is not in the depth-{p.depth} tree")


def counts(p: TreeParams) -> TreeCounts:
    """Vertex, edge and leaf counts: 2^(n+1)-1, 2^(n+1)-2, 2^n."""
    return TreeCounts(p.vertex_count, p.edge_count, p.leaf_count)


def degree(v: VertexRef, p: TreeParams) -> int:
    """Graph degree: 2 at the root, 1 at leaves, 3 inside (0 for the depth-0 tree)."""
    _check(v, p)
    children = 2 if v.level < p.depth else 0
    return children + (0 if v.level == 0 else 1)


def parent(v: VertexRef) -> VertexRef:
    if v.level == 0:
        raise ValueError("the root has no parent")
    return VertexRef(v.level - 1, v.index >> 1)


def child(v: VertexRef, side: int, p: TreeParams) -> VertexRef:
    """Child of v; side 0 = left, 1 = right."""
    _check(v, p)
    if side not in (0, 1):
        raise ValueError(f"side must be 0 or 1, got {side!r}")
    if v.level >= p.depth:
        raise ValueError(f"vertex {v} is a leaf")
    return VertexRef(v.level + 1, 2 * v.index + side)


def ancestor_at_level(v: VertexRef, k: int) -> VertexRef:
    """The unique vertex at level k on the root-to-v path (k <= level of v)."""
    if not 0 <= k <= v.level:
        raise ValueError(f"level {k} is not an ancestor level of {v}")
    return VertexRef(k, v.index >> (v.level - k))


def leaves(p: TreeParams) -> Iterator[VertexRef]:
    for i in range(p.leaf_count):
        yield VertexRef(p.depth, i)


def heap_index(v: VertexRef) -> int:
    """Position of v in the level-order (heap) array used by the engines."""
    return ((1 << v.level) - 1) + v.index


def vertex_at_heap(i: int) -> VertexRef:
    if i < 0:
        raise ValueError(f"heap index must be nonnegative, got {i}")
    level = (i + 1).bit_length() - 1
    return VertexRef(level, i - ((1 << level) - 1))
