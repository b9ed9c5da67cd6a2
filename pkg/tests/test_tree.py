import pytest

from covertree import tree
from covertree.tree import TreeParams, VertexRef


def test_counts_small():
    assert tree.counts(TreeParams(1)) == (3, 2, 2)
    assert tree.counts(TreeParams(0)) == (1, 0, 1)


def test_counts_depth5():
    # |E| = 2^(n+1) - 2, pinned by the inverse-local-time mean identity
    c = tree.counts(TreeParams(5))
    assert c.vertices == 63 and c.edges == 62 and c.leaves == 32


def test_degree_examples():
    p = TreeParams(3)
    assert tree.degree(VertexRef(0, 0), p) == 2
    assert tree.degree(VertexRef(3, 5), p) == 1
    assert tree.degree(VertexRef(1, 0), p) == 3


def test_degree_depth0_isolated_root():
    assert tree.degree(VertexRef(0, 0), TreeParams(0)) == 0


def test_degree_invalid_vertex():
    with pytest.raises(ValueError):
        tree.degree(VertexRef(4, 0), TreeParams(3))
    with pytest.raises(ValueError):
        tree.degree(VertexRef(2, 4), TreeParams(3))


def test_ancestor_identity_and_root():
    v = VertexRef(3, 5)
    assert tree.ancestor_at_level(v, 3) == v
    assert tree.ancestor_at_level(v, 0) == tree.ROOT


def test_ancestor_by_path_enumeration():
    # oracle: walk the explicit parent chain from leaf 5 in the 8-leaf tree
    v = VertexRef(3, 5)
    chain = [v]
    while chain[-1].level > 0:
        chain.append(tree.parent(chain[-1]))
    by_level = {u.level: u for u in chain}
    assert by_level[2] == VertexRef(2, 2)
    for k in range(4):
        assert tree.ancestor_at_level(v, k) == by_level[k]


def test_ancestor_rejects_descendant_level():
    with pytest.raises(ValueError):
        tree.ancestor_at_level(VertexRef(2, 1), 3)


def test_parent_child_roundtrip():
    p = TreeParams(6)
    for level in range(p.depth):
        for index in (0, (1 << level) - 1):
            v = VertexRef(level, index)
            for side in (0, 1):
                assert tree.parent(tree.child(v, side, p)) == v


@pytest.mark.parametrize("n", range(1, 11))
def test_ancestor_sequences_are_paths(n):
    p = TreeParams(n)
    for leaf in tree.leaves(p):
        seq = [tree.ancestor_at_level(leaf, k) for k in range(n + 1)]
        assert seq[0] == tree.ROOT and seq[-1] == leaf
        for a, b in zip(seq, seq[1:]):
            assert tree.parent(b) == a


@pytest.mark.parametrize("n", range(21))
def test_degree_sum_is_twice_edges(n):
    p = TreeParams(n)
    if n <= 8:
        total = sum(
            tree.degree(VertexRef(level, index), p)
            for level in range(n + 1)
            for index in range(1 << level)
        )
    else:
        # degree is constant within a level; spot-check that, then sum by level
        for level in range(n + 1):
            first = tree.degree(VertexRef(level, 0), p)
            assert tree.degree(VertexRef(level, (1 << level) - 1), p) == first
        total = sum(
            tree.degree(VertexRef(level, 0), p) * (1 << level) for level in range(n + 1)
        )
    assert total == 2 * p.edge_count


def test_heap_index_roundtrip():
    p = TreeParams(5)
    seen = set()
    for level in range(p.depth + 1):
        for index in range(1 << level):
            v = VertexRef(level, index)
            h = tree.heap_index(v)
            assert tree.vertex_at_heap(h) == v
            seen.add(h)
    assert seen == set(range(p.vertex_count))


def test_invalid_params():
    with pytest.raises(ValueError):
        TreeParams(-1)
    with pytest.raises(ValueError):
        tree.child(VertexRef(3, 0), 0, TreeParams(3))
    with pytest.raises(ValueError):
        tree.parent(tree.ROOT)
