"""Girth-based resistance to collusion.

A graph whose shortest cycle is longer than twice the colluding-set
size admits no recoverable values, no matter how many summations the
colluders observe.  This module certifies that bound for a given
graph, verifies it empirically with randomised attack simulations, and
raises the girth of a graph by letting each node break the short
cycles it sits on, the way a deployed network would: flooding a token
with a hop budget and cutting the edge the token returns on.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .attacks import rounds_until_success
from .graphs import Graph, adversary_view, girth

__all__ = [
    "FloodMessage",
    "ResistanceCertificate",
    "VerificationReport",
    "break_short_cycles",
    "certify",
    "flood_cycle_probe",
    "graph_fingerprint",
    "verify_no_partial_solutions",
]

_PLACEMENT_LIMIT = 10**5


@dataclass(frozen=True)
class ResistanceCertificate:
    """Collusion bound for a concrete graph.

    `girth` is None for acyclic graphs, where `max_safe_k` is also
    None: no collusion size admits reconstruction.  Otherwise
    `max_safe_k` is the largest k with 2*k < girth.  The fingerprint
    pins the exact graph the certificate was computed for.
    """

    girth: Optional[int]
    max_safe_k: Optional[int]
    node_count: int
    edge_count: int
    fingerprint: str


def graph_fingerprint(graph: Graph) -> str:
    """Content hash of a graph's node count and canonical edge list."""
    blob = "\n".join(
        [str(graph.node_count)] + [f"{u} {v}" for u, v in graph.edges]
    )
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


def certify(graph: Graph) -> ResistanceCertificate:
    """Compute the graph's girth and the collusion size it resists."""
    g = girth(graph)
    max_safe = None if g is None else (g + 1) // 2 - 1
    return ResistanceCertificate(
        girth=g,
        max_safe_k=max_safe,
        node_count=graph.node_count,
        edge_count=graph.edge_count,
        fingerprint=graph_fingerprint(graph),
    )


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of randomised attack trials against one graph."""

    adversaries: int
    trials: int
    rounds: int
    solution_trials: int
    certified_safe: bool


def _sample_adversaries(
    graph: Graph, k: int, rng: np.random.Generator
) -> list[int]:
    """Uniform adversary placement with no near-isolated colluder.

    A colluder with exactly one neighbour outside the set could read
    that neighbour's value straight off its own summations, so such
    placements are not meaningful attacks and are redrawn.
    """
    for _ in range(_PLACEMENT_LIMIT):
        chosen = rng.choice(graph.node_count, size=k, replace=False)
        cset = set(int(c) for c in chosen)
        if all(
            len(set(graph.neighbours(c)) - cset) != 1 for c in cset
        ):
            return sorted(cset)
    raise RuntimeError(
        f"no adversary placement of size {k} with all colluders having "
        f"zero or at least two outside neighbours"
    )


def verify_no_partial_solutions(
    graph: Graph,
    k: int,
    trials: int,
    rounds: int,
    rng: np.random.Generator,
) -> VerificationReport:
    """Randomised empirical check of the girth bound.

    Samples `trials` colluding sets of size k, runs the asynchronous
    wake-up simulation for `rounds` rounds each, and counts the trials
    in which some value became recoverable.  The count must be zero
    whenever the certificate covers k.
    """
    if not 1 <= k <= graph.node_count:
        raise ValueError(f"cannot place {k} adversaries")
    cert = certify(graph)
    safe = cert.max_safe_k is None or k <= cert.max_safe_k
    found = 0
    for _ in range(trials):
        view = adversary_view(graph, _sample_adversaries(graph, k, rng))
        if rounds_until_success(view, rng, max_rounds=rounds) is not None:
            found += 1
    return VerificationReport(
        adversaries=k,
        trials=trials,
        rounds=rounds,
        solution_trials=found,
        certified_safe=safe,
    )


@dataclass(frozen=True)
class FloodMessage:
    """One in-flight copy of a node's cycle-probe token.

    The copy walks a simple path away from its origin; `path` starts
    at the origin and ends at the current holder.  Every forward costs
    exactly one hop from the budget, and a copy with no hops left is
    dropped rather than forwarded.
    """

    origin: int
    token: int
    hops_left: int
    path: tuple[int, ...]

    @property
    def at(self) -> int:
        return self.path[-1]

    @property
    def incoming_edge(self) -> tuple[int, int]:
        u, v = self.path[-2], self.path[-1]
        return (u, v) if u < v else (v, u)

    def forwarded(self, to: int) -> "FloodMessage":
        if self.hops_left <= 0:
            raise ValueError("no hops left")
        return FloodMessage(
            origin=self.origin,
            token=self.token,
            hops_left=self.hops_left - 1,
            path=self.path + (to,),
        )


def flood_cycle_probe(
    graph: Graph, origin: int, max_len: int, token: int = 0
) -> Optional[FloodMessage]:
    """Flood `origin`'s token and report the first copy to return.

    Copies spread one hop per round to all neighbours they have not
    visited, so a copy reaches the origin again exactly when the
    origin lies on a cycle no longer than the hop budget.  Of the
    copies returning first, the one arriving from the lowest-numbered
    neighbour wins.  Returns None when no copy makes it back.
    """
    if not 0 <= origin < graph.node_count:
        raise ValueError(f"origin {origin} out of range")
    frontier = [FloodMessage(origin, token, max_len, (origin,))]
    while frontier:
        returned = []
        successors = []
        for msg in frontier:
            if msg.hops_left == 0:
                continue
            for w in graph.neighbours(msg.at):
                if w == origin:
                    if len(msg.path) >= 3:
                        returned.append(msg.forwarded(w))
                elif w not in msg.path:
                    successors.append(msg.forwarded(w))
        if returned:
            return min(returned, key=lambda m: (m.path[-2], m.path))
        frontier = successors
    return None


def _bounded_distance(
    adj: list[set[int]], start: int, goal: int, bound: int
) -> Optional[int]:
    """BFS distance from start to goal, ignoring the direct edge."""
    if bound < 1:
        return None
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        node, d = queue.popleft()
        if d == bound:
            continue
        for w in adj[node]:
            if node == start and w == goal:
                continue
            if w == goal:
                return d + 1
            if w not in seen:
                seen.add(w)
                queue.append((w, d + 1))
    return None


def _shortest_cycle_through(
    adj: list[set[int]], origin: int, limit: int
) -> Optional[tuple[int, int]]:
    """Shortest cycle of length <= limit through origin.

    Returns (length, closing neighbour) where the cycle's final hop is
    the edge from that neighbour back to the origin; ties go to the
    lowest neighbour, matching the flood's arrival order.  Equivalent
    to flood_cycle_probe because BFS explores the same simple paths in
    the same length order.
    """
    best = None
    for u in sorted(adj[origin]):
        d = _bounded_distance(adj, origin, u, limit - 1)
        if d is not None and (best is None or d + 1 < best[0]):
            best = (d + 1, u)
    return best


def break_short_cycles(
    graph: Graph, max_len: int, rng: np.random.Generator
) -> Graph:
    """Raise the girth above `max_len` by node-local edge removal.

    Nodes act in random order; an acting node probes for a cycle of
    length at most `max_len` through itself and cuts the edge the
    probe returns on.  Full passes repeat until one finds no cycle
    anywhere, at which point every cycle is longer than `max_len`.
    Connected graphs stay connected: only cycle edges are cut.
    """
    if max_len < 3:
        raise ValueError("no cycle is shorter than 3")
    adj = [set(nbrs) for nbrs in graph._adj]
    while True:
        removed = False
        for origin in rng.permutation(graph.node_count):
            origin = int(origin)
            hit = _shortest_cycle_through(adj, origin, max_len)
            if hit is not None:
                _, u = hit
                adj[origin].discard(u)
                adj[u].discard(origin)
                removed = True
        if not removed:
            break
    edges = [(u, v) for u in range(graph.node_count) for v in adj[u] if u < v]
    return Graph(graph.node_count, edges)
