"""Undirected graph model for privacy-topology analysis.

Simple graphs on integer nodes with the machinery the rest of the
package leans on: neighbourhood queries, extraction of the bipartite
view a colluding set has of its surroundings, exact girth and shortest
cycles via per-root BFS, random generation, iterative stretching to a
target girth, and the reduction that turns a node with changing
neighbourhoods into several static ones.

Graphs are immutable after construction and hold no hidden state, so
values can be shared freely across threads.  Functions that need
randomness take an explicit `numpy.random.Generator` owned by the
caller.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "Graph",
    "AdversaryView",
    "adversary_view",
    "girth",
    "shortest_cycle",
    "stretch_to_girth",
    "erdos_renyi",
    "split_dynamic_node",
    "read_edge_list",
    "write_edge_list",
]


class Graph:
    """Simple undirected graph on nodes ``0 .. node_count - 1``.

    Edges are stored canonically as sorted ``(u, v)`` pairs with
    ``u < v``; self-loops are rejected and duplicates collapse.
    Adjacency lists are materialised eagerly and sorted, which makes
    every traversal in this module deterministic.
    """

    __slots__ = ("node_count", "edges", "_adj")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]] = ()):
        node_count = int(node_count)
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            canon.add((u, v) if u < v else (v, u))
        self.node_count = node_count
        self.edges = tuple(sorted(canon))
        adj: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = tuple(tuple(sorted(a)) for a in adj)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbours(self, v: int) -> set:
        """Adjacency set of node v; out-of-range nodes are rejected."""
        if not 0 <= v < self.node_count:
            raise ValueError(f"node {v} out of range for {self.node_count} nodes")
        return set(self._adj[v])

    def degree(self, v: int) -> int:
        if not 0 <= v < self.node_count:
            raise ValueError(f"node {v} out of range for {self.node_count} nodes")
        return len(self._adj[v])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges))

    def __repr__(self) -> str:
        return f"Graph(node_count={self.node_count}, edges={len(self.edges)})"


@dataclass(frozen=True, eq=False)
class AdversaryView:
    """Bipartite view a colluding node set has of its surroundings.

    Rows of `biadjacency` are the colluders in label order, columns the
    union of their outside neighbourhoods in label order.  Entry (c, v)
    is 1 iff the source graph had that edge.  Edges inside the
    colluding set and edges among the neighbours are dropped; nodes
    adjacent to no colluder do not appear at all.
    """

    adversary_count: int
    neighbour_count: int
    biadjacency: np.ndarray
    adversary_labels: tuple
    neighbour_labels: tuple


def adversary_view(graph: Graph, adversaries: Iterable[int]) -> AdversaryView:
    """Extract the bipartite view of `adversaries` in `graph`."""
    cset = set(int(a) for a in adversaries)
    for a in cset:
        if not 0 <= a < graph.node_count:
            raise ValueError(f"adversary {a} out of range")
    labels = tuple(sorted(cset))
    nbrs = sorted({u for a in labels for u in graph._adj[a]} - cset)
    index = {u: j for j, u in enumerate(nbrs)}
    bi = np.zeros((len(labels), len(nbrs)), dtype=np.uint8)
    for i, a in enumerate(labels):
        for u in graph._adj[a]:
            j = index.get(u)
            if j is not None:
                bi[i, j] = 1
    return AdversaryView(
        adversary_count=len(labels),
        neighbour_count=len(nbrs),
        biadjacency=bi,
        adversary_labels=labels,
        neighbour_labels=tuple(nbrs),
    )


def _cycle_nodes(parent: dict, dist: dict, u: int, w: int) -> list[int]:
    """Nodes of the cycle closed by tree paths to u and w plus edge (u, w).

    Climbs both endpoints to their lowest common ancestor; above it the
    two tree paths coincide and contribute nothing to the cycle.
    """
    path_u = [u]
    path_w = [w]
    while u != w:
        if dist[u] >= dist[w]:
            u = parent[u]
            path_u.append(u)
        else:
            w = parent[w]
            path_w.append(w)
    # path_u ends at the common ancestor, which path_w also contains
    return path_u + path_w[-2::-1]


def _shortest_cycle_adj(
    adj: Sequence[Iterable[int]], stop_at: Optional[int] = None
) -> Optional[list[int]]:
    """Node sequence of a shortest cycle in an adjacency structure.

    Runs a BFS from every node, closing a cycle whenever a non-tree
    edge joins two visited nodes; the closed cycle is reconstructed
    through the lowest common ancestor, so its length never exceeds the
    naive distance sum and is exact for roots lying on a shortest
    cycle.  Roots are scanned in index order and a root's search is cut
    off at depth where it could no longer improve the best cycle, which
    keeps the scan near-linear once a short cycle is known.

    `stop_at` is an optional proven lower bound on the girth: the scan
    returns the first cycle found that meets it.  Returns None when the
    graph is acyclic.
    """
    n = len(adj)
    best: Optional[list[int]] = None
    for root in range(n):
        if len(adj[root]) < 2:
            continue
        dist = {root: 0}
        parent = {root: root}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if best is not None and 2 * du + 1 >= len(best):
                break
            pu = parent[u]
            for w in adj[u]:
                dw = dist.get(w)
                if dw is None:
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                elif w != pu and dw >= du:
                    cycle = _cycle_nodes(parent, dist, u, w)
                    if best is None or len(cycle) < len(best):
                        best = cycle
                        if len(best) == 3 or (
                            stop_at is not None and len(best) <= stop_at
                        ):
                            return best
    return best


def shortest_cycle(graph: Graph) -> Optional[list[tuple[int, int]]]:
    """Edge list of one shortest cycle, or None when acyclic.

    Deterministic for a given graph: node order fixes both the BFS
    schedule and the returned cycle.
    """
    nodes = _shortest_cycle_adj(graph._adj)
    if nodes is None:
        return None
    return [
        (a, b) if a < b else (b, a)
        for a, b in zip(nodes, nodes[1:] + nodes[:1])
    ]


def girth(graph: Graph) -> Optional[int]:
    """Length of a shortest cycle; None marks an acyclic graph.

    None is the explicit acyclic marker (infinite girth), so callers
    comparing against a finite bound must treat it as larger than any
    number rather than as zero.
    """
    nodes = _shortest_cycle_adj(graph._adj)
    return None if nodes is None else len(nodes)


def stretch_to_girth(graph: Graph, g: int, rng: np.random.Generator) -> Graph:
    """Remove cycle edges at random until the girth reaches `g`.

    While a cycle shorter than `g` exists, one shortest cycle is
    located and a uniformly random edge of it is deleted.  A deleted
    edge always lies on a cycle, so connected components never change.
    The result has girth >= g or is acyclic.
    """
    if g < 3:
        raise ValueError("target girth must be at least 3")
    adj = [set(a) for a in graph._adj]
    # Girth never decreases when edges are removed, so the last certified
    # value is a valid lower bound; a scan can stop early as soon as it
    # finds a cycle that short.
    lower = 3
    while True:
        cycle = _shortest_cycle_adj(adj, stop_at=lower)
        if cycle is None:
            break
        lower = len(cycle)
        if lower >= g:
            break
        i = int(rng.integers(len(cycle)))
        u, v = cycle[i], cycle[(i + 1) % len(cycle)]
        adj[u].discard(v)
        adj[v].discard(u)
    edges = [(u, v) for u in range(graph.node_count) for v in adj[u] if u < v]
    return Graph(graph.node_count, edges)


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Random graph: each unordered pair is an edge with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    if n < 2 or p == 0.0:
        return Graph(n)
    us, vs = np.triu_indices(n, k=1)
    mask = rng.random(len(us)) < p
    return Graph(n, zip(us[mask].tolist(), vs[mask].tolist()))


def split_dynamic_node(
    graph: Graph, v: int, neighbour_sets: Sequence[Iterable[int]]
) -> Graph:
    """Replace node v by one fresh node per historical neighbourhood.

    A participant that summed over several different neighbour sets
    learns exactly what that many static participants would learn over
    the same sets, so analyses of static graphs carry over.  Node v is
    removed, nodes above it shift down by one, and the replacements are
    appended at the tail in the order their neighbour sets are given:
    with ``m = node_count - 1``, replacement j gets index ``m + j``.

    Each neighbour set must be a subset of the other nodes; an empty
    list of sets is rejected.
    """
    if not 0 <= v < graph.node_count:
        raise ValueError(f"node {v} out of range")
    sets = [set(int(u) for u in s) for s in neighbour_sets]
    if not sets:
        raise ValueError("at least one neighbour set is required")
    for s in sets:
        for u in s:
            if not 0 <= u < graph.node_count or u == v:
                raise ValueError(f"invalid neighbour {u} for split of node {v}")

    def relabel(u: int) -> int:
        return u if u < v else u - 1

    edges = [
        (relabel(a), relabel(b)) for a, b in graph.edges if a != v and b != v
    ]
    base = graph.node_count - 1
    for j, s in enumerate(sets):
        edges.extend((base + j, relabel(u)) for u in s)
    return Graph(base + len(sets), edges)


def read_edge_list(path) -> Graph:
    """Parse a graph from edge-list text.

    Format: a header line ``n <node_count>``, then one ``u v`` pair per
    line, whitespace-separated, 0-indexed.  Anything after ``#`` on a
    line is a comment; blank lines are skipped.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    node_count = None
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        if node_count is None:
            if len(tokens) != 2 or tokens[0] != "n":
                raise ValueError(f"line {lineno}: expected header 'n <node_count>'")
            node_count = int(tokens[1])
            continue
        if len(tokens) != 2:
            raise ValueError(f"line {lineno}: expected 'u v'")
        edges.append((int(tokens[0]), int(tokens[1])))
    if node_count is None:
        raise ValueError("missing 'n <node_count>' header")
    return Graph(node_count, edges)


def write_edge_list(graph: Graph, path) -> None:
    """Write a graph in the edge-list text format read_edge_list parses."""
    lines = [f"n {graph.node_count}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
