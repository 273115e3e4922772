import numpy as np
import pytest

from gossipsim.topology import (
    SpanningTree,
    Topology,
    TopologyError,
    bfs_tree,
    build_graph,
    center_vertex,
    diameter,
    format_adjacency,
    parse_graph_spec,
)

SUITE = [
    build_graph("ring", 6),
    build_graph("ring", 7),
    build_graph("path", 8),
    build_graph("complete", 10),
    build_graph("star", 9),
    build_graph("grid2d", 12, rows=3, cols=4),
    build_graph("dumbbell", 14, clique_a=5, bridge=4, clique_b=5),
    build_graph("dumbbell", 9, clique_a=3, bridge=3, clique_b=3),
]


def floyd_warshall(g: Topology) -> np.ndarray:
    # independent all-pairs shortest path oracle
    dist = np.full((g.n, g.n), np.inf)
    np.fill_diagonal(dist, 0)
    for i, j in g.edges:
        dist[i, j] = dist[j, i] = 1
    for k in range(g.n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def test_ring_diameter():
    assert build_graph("ring", 6).diameter == 3  # floor(n/2)
    assert build_graph("ring", 7).diameter == 3


def test_path_and_complete_diameter():
    assert build_graph("path", 8).diameter == 7
    assert build_graph("path", 5).diameter == 4
    assert build_graph("complete", 10).diameter == 1


def test_dumbbell_diameter():
    g = build_graph("dumbbell", 14, clique_a=5, bridge=4, clique_b=5)
    # deepest clique members: 1 hop into the clique + 5 along the bridge chain + 1 out
    assert g.diameter == 7
    oracle = floyd_warshall(g)
    assert g.diameter == int(oracle.max())


def test_dumbbell_default_cliques():
    g = build_graph("dumbbell", 9)
    assert g.n == 9
    # default ceil(n/3)=3 vertices per clique
    assert (0, 1) in g.edges and (1, 2) in g.edges and (0, 2) in g.edges
    assert (6, 7) in g.edges and (7, 8) in g.edges and (6, 8) in g.edges


@pytest.mark.parametrize("g", SUITE)
def test_invariants_against_oracle(g):
    for v in range(g.n):
        for u in g.neighbor_lists[v]:
            assert v in g.neighbor_lists[u]  # symmetry
        assert v not in g.neighbor_lists[v]  # no self-loops
    oracle = floyd_warshall(g)
    assert np.isfinite(oracle).all()  # connected
    assert g.diameter == int(oracle.max())
    assert diameter(g) == g.diameter


@pytest.mark.parametrize("g", SUITE)
def test_center_and_bfs_depth(g):
    c = center_vertex(g)
    oracle = floyd_warshall(g)
    eccs = oracle.max(axis=1).astype(int)
    assert eccs[c] == eccs.min()
    assert c == int(np.argmin(eccs))  # lowest index on ties
    tree = bfs_tree(g, c)
    assert tree.depth <= g.diameter
    assert tree.depth >= -(-g.diameter // 2)
    assert tree.subtree_count[c] == g.n
    assert sum(1 for p in tree.parent if p is not None) == g.n - 1
    for v in range(g.n):
        assert tree.level[v] == int(oracle[c, v])
        if tree.parent[v] is not None:
            assert tree.level[v] == tree.level[tree.parent[v]] + 1
            e = (min(v, tree.parent[v]), max(v, tree.parent[v]))
            assert e in g.edges
        assert tree.subtree_count[v] == 1 + sum(
            tree.subtree_count[u] for u in tree.children(v)
        )


def test_bfs_tree_examples():
    path3 = build_graph("path", 3)
    tree = bfs_tree(path3, 1)
    assert tree.level == (1, 0, 1)
    assert tree.subtree_count == (1, 3, 1)

    star = build_graph("star", 5)
    tree = bfs_tree(star, 0)
    assert tree.depth == 1
    assert tree.subtree_count[0] == 5

    ring = build_graph("ring", 6)
    tree = bfs_tree(ring, 0)
    assert tree.depth == 3
    sub = [tree.subtree_count[u] for u in tree.children(0)]
    assert sum(sub) == 5


def test_center_examples():
    assert center_vertex(build_graph("path", 5)) == 2
    assert center_vertex(build_graph("complete", 4)) == 0
    c = center_vertex(build_graph("dumbbell", 14, clique_a=5, bridge=4, clique_b=5))
    assert c in (5, 6, 7, 8)  # a bridge vertex
    assert c == 6  # lowest-index vertex of minimum eccentricity


def test_determinism():
    a = build_graph("grid2d", 12, rows=3, cols=4)
    b = build_graph("grid2d", 12, rows=3, cols=4)
    assert a == b
    assert bfs_tree(a, center_vertex(a)) == bfs_tree(b, center_vertex(b))


def test_errors():
    with pytest.raises(TopologyError):
        build_graph("ring", 1)
    with pytest.raises(TopologyError):
        build_graph("grid2d", 12, rows=3, cols=5)
    with pytest.raises(TopologyError):
        build_graph("dumbbell", 10, clique_a=4, bridge=4, clique_b=4)
    with pytest.raises(TopologyError):
        build_graph("mystery", 5)
    with pytest.raises(TopologyError):
        bfs_tree(build_graph("ring", 4), 7)


def test_parse_graph_spec():
    assert parse_graph_spec("ring:16").n == 16
    assert parse_graph_spec("grid2d:4x4").n == 16
    g = parse_graph_spec("dumbbell:5-4-5")
    assert g.n == 14 and g.diameter == 7
    for bad in ("ring", "ring:", "grid2d:4y4", "dumbbell:5-4", "blob:3", "ring:x"):
        with pytest.raises(TopologyError):
            parse_graph_spec(bad)


def test_format_adjacency():
    text = format_adjacency(build_graph("path", 3))
    assert text == "0: 1\n1: 0,2\n2: 1"
