"""Connectivity graphs for the simulated worker network.

Graphs are small (desk scale), undirected, connected and immutable. All
tie-breaking is by lowest vertex index so that every derived structure
(BFS trees, consensus plans, mixing matrices) is bit-reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

__all__ = [
    "Topology",
    "SpanningTree",
    "TopologyError",
    "build_graph",
    "diameter",
    "bfs_tree",
    "center_vertex",
    "parse_graph_spec",
    "format_adjacency",
]


class TopologyError(ValueError):
    """Raised for invalid graph parameters or malformed graph specs."""


@dataclass(frozen=True)
class Topology:
    """Undirected connected graph over ``n`` workers.

    Attributes:
        n: Number of vertices (workers).
        edges: Sorted tuple of unordered vertex pairs ``(i, j)`` with ``i < j``.
        neighbor_lists: Per-vertex sorted adjacency.
        diameter: Maximum over vertex pairs of the shortest-path hop count.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    neighbor_lists: tuple[tuple[int, ...], ...]
    diameter: int

    def degree(self, v: int) -> int:
        return len(self.neighbor_lists[v])

    def is_complete(self) -> bool:
        return self.diameter == 1


@dataclass(frozen=True)
class SpanningTree:
    """BFS spanning tree of a Topology.

    Attributes:
        root: Root vertex.
        parent: Per-vertex parent; ``parent[root]`` is ``None``.
        level: Per-vertex hop distance from the root.
        subtree_count: Per-vertex number of descendants including itself.
    """

    root: int
    parent: tuple[int | None, ...]
    level: tuple[int, ...]
    subtree_count: tuple[int, ...]

    @property
    def depth(self) -> int:
        return max(self.level)

    def children(self, v: int) -> list[int]:
        return [u for u, p in enumerate(self.parent) if p == v]


def _bfs_levels(neighbors: tuple[tuple[int, ...], ...], root: int) -> list[int]:
    """Hop distances from root; -1 marks unreachable vertices."""
    level = [-1] * len(neighbors)
    level[root] = 0
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in neighbors[v]:
            if level[u] < 0:
                level[u] = level[v] + 1
                queue.append(u)
    return level


def _finalize(n: int, edge_set: set[tuple[int, int]]) -> Topology:
    """Build the immutable Topology, checking connectivity and the diameter."""
    for i, j in edge_set:
        if i == j:
            raise TopologyError(f"self-loop on vertex {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise TopologyError(f"edge ({i},{j}) out of range for n={n}")
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edge_set:
        adj[i].append(j)
        adj[j].append(i)
    neighbors = tuple(tuple(sorted(a)) for a in adj)
    ecc = []
    for v in range(n):
        level = _bfs_levels(neighbors, v)
        if min(level) < 0:
            raise TopologyError("graph is not connected")
        ecc.append(max(level))
    return Topology(
        n=n,
        edges=tuple(sorted(edge_set)),
        neighbor_lists=neighbors,
        diameter=max(ecc),
    )


def build_graph(kind: str, n: int, **params) -> Topology:
    """Construct one of the supported graph shapes.

    Supported kinds: ``ring``, ``path``, ``complete``, ``star``, ``grid2d``
    (requires ``rows`` and ``cols`` with rows*cols == n) and ``dumbbell``
    (two cliques joined by a bridge path; params ``clique_a``, ``bridge``,
    ``clique_b`` with clique_a + bridge + clique_b == n, defaulting to
    cliques of ceil(n/3) on each side).
    """
    if n < 2:
        raise TopologyError(f"need n >= 2 workers, got {n}")
    edges: set[tuple[int, int]] = set()
    if kind == "ring":
        for i in range(n):
            j = (i + 1) % n
            edges.add((min(i, j), max(i, j)))
    elif kind == "path":
        edges = {(i, i + 1) for i in range(n - 1)}
    elif kind == "complete":
        edges = {(i, j) for i in range(n) for j in range(i + 1, n)}
    elif kind == "star":
        edges = {(0, j) for j in range(1, n)}
    elif kind == "grid2d":
        rows, cols = params.get("rows"), params.get("cols")
        if not rows or not cols or rows * cols != n:
            raise TopologyError(f"grid2d needs rows*cols == n, got {rows}x{cols} for n={n}")
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.add((v, v + 1))
                if r + 1 < rows:
                    edges.add((v, v + cols))
    elif kind == "dumbbell":
        a = params.get("clique_a", -(-n // 3))
        b = params.get("clique_b", -(-n // 3))
        bridge = params.get("bridge", n - a - b)
        if a < 1 or b < 1 or bridge < 0 or a + bridge + b != n:
            raise TopologyError(
                f"dumbbell needs clique_a + bridge + clique_b == n, got {a}+{bridge}+{b} != {n}"
            )
        for i in range(a):
            for j in range(i + 1, a):
                edges.add((i, j))
        off = a + bridge
        for i in range(b):
            for j in range(i + 1, b):
                edges.add((off + i, off + j))
        # chain: last clique-A vertex, the bridge vertices, first clique-B vertex
        chain = [a - 1] + list(range(a, a + bridge)) + [off]
        for u, v in zip(chain, chain[1:]):
            edges.add((min(u, v), max(u, v)))
    else:
        raise TopologyError(f"unknown graph kind {kind!r}")
    return _finalize(n, edges)


def diameter(g: Topology) -> int:
    """Exact hop diameter (recomputed by all-pairs BFS)."""
    return max(max(_bfs_levels(g.neighbor_lists, v)) for v in range(g.n))


def bfs_tree(g: Topology, root: int) -> SpanningTree:
    """BFS spanning tree rooted at ``root``, visiting neighbors in ascending order."""
    if not 0 <= root < g.n:
        raise TopologyError(f"root {root} out of range for n={g.n}")
    parent: list[int | None] = [None] * g.n
    level = [-1] * g.n
    level[root] = 0
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in g.neighbor_lists[v]:
            if level[u] < 0:
                level[u] = level[v] + 1
                parent[u] = v
                queue.append(u)
    count = [1] * g.n
    for v in sorted(range(g.n), key=lambda v: level[v], reverse=True):
        p = parent[v]
        if p is not None:
            count[p] += count[v]
    return SpanningTree(
        root=root,
        parent=tuple(parent),
        level=tuple(level),
        subtree_count=tuple(count),
    )


def center_vertex(g: Topology) -> int:
    """Vertex of minimum eccentricity (lowest index on ties).

    Rooting BFS trees here keeps consensus-plan length at twice the graph
    radius, which never exceeds twice the diameter.
    """
    best, best_ecc = 0, g.n + 1
    for v in range(g.n):
        ecc = max(_bfs_levels(g.neighbor_lists, v))
        if ecc < best_ecc:
            best, best_ecc = v, ecc
    return best


def parse_graph_spec(spec: str) -> Topology:
    """Parse a graph spec string such as ``ring:16``, ``grid2d:4x4``, ``dumbbell:5-4-5``."""
    kind, sep, arg = spec.strip().partition(":")
    if not sep or not arg:
        raise TopologyError(f"malformed graph spec {spec!r} (expected kind:params)")
    try:
        if kind == "grid2d":
            rows_s, _, cols_s = arg.partition("x")
            rows, cols = int(rows_s), int(cols_s)
            return build_graph("grid2d", rows * cols, rows=rows, cols=cols)
        if kind == "dumbbell":
            parts = [int(p) for p in arg.split("-")]
            if len(parts) != 3:
                raise TopologyError(f"dumbbell spec needs a-b-c sizes, got {arg!r}")
            a, bridge, b = parts
            return build_graph("dumbbell", a + bridge + b, clique_a=a, bridge=bridge, clique_b=b)
        return build_graph(kind, int(arg))
    except ValueError as exc:
        if isinstance(exc, TopologyError):
            raise
        raise TopologyError(f"malformed graph spec {spec!r}: {exc}") from exc


def format_adjacency(g: Topology) -> str:
    """Text dump, one ``vertex: neighbor,neighbor,...`` line per vertex."""
    return "\n".join(
        f"{v}: {','.join(str(u) for u in g.neighbor_lists[v])}" for v in range(g.n)
    )
