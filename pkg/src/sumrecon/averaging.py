"""Convergence cost of gossip averaging on girth-stretched graphs.

Raising a graph's girth defends summation against colluders, but the
removed edges slow down everything else running on the network.  This
module measures that price on the simplest workload: asynchronous
distributed averaging, where one random node per round replaces its
value with the mean of its own and its neighbours' values, until all
values agree to within a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .attacks import _cell_field, _run_jobs
from .graphs import Graph, erdos_renyi, stretch_to_girth

__all__ = [
    "CONVERGE_CSV_HEADER",
    "AveragingState",
    "ConvergenceRecord",
    "init_state",
    "run_convergence_study",
    "run_to_convergence",
    "step",
    "value_gap",
    "write_converge_csv",
    "write_plot_data",
]


@dataclass
class AveragingState:
    """Mutable per-node values plus a wake counter.

    Values are double-precision floats: convergence is a threshold
    question, so exact arithmetic buys nothing here, and each update
    stays inside the hull of the current values, which keeps the
    computation well-conditioned.
    """

    graph: Graph
    values: list[float]
    rounds: int = 0

    def __post_init__(self):
        if len(self.values) != self.graph.node_count:
            raise ValueError(
                f"{len(self.values)} values for "
                f"{self.graph.node_count} nodes"
            )


def init_state(
    graph: Graph, rng: np.random.Generator, low: int = 0, high: int = 50
) -> AveragingState:
    """Fresh state with integer values uniform on low..high inclusive."""
    draws = rng.integers(low, high + 1, size=graph.node_count)
    return AveragingState(graph, [float(x) for x in draws])


def value_gap(state: AveragingState) -> float:
    """Spread between the largest and smallest value; 0 when empty."""
    if not state.values:
        return 0.0
    return max(state.values) - min(state.values)


def _update(state: AveragingState, node: int) -> None:
    """Apply one wake: self-inclusive unweighted mean, counter +1."""
    nbrs = state.graph._adj[node]
    if nbrs:
        total = state.values[node] + sum(state.values[u] for u in nbrs)
        state.values[node] = total / (len(nbrs) + 1)
    state.rounds += 1


def step(state: AveragingState, rng: np.random.Generator) -> int:
    """Wake one uniform node and return its index.

    The woken node averages itself with its neighbourhood; an isolated
    node changes nothing.  Either way the round counter advances.
    """
    node = int(rng.integers(state.graph.node_count))
    _update(state, node)
    return node


def run_to_convergence(
    state: AveragingState,
    rng: np.random.Generator,
    threshold: float = 1.0,
    cap: int = 10**6,
) -> Optional[int]:
    """Steps taken until the value spread is at most `threshold`.

    Returns the number of rounds this call performed, 0 if already
    converged, or None when `cap` rounds pass without convergence
    (which a disconnected graph can force).  The spread is tracked
    incrementally: an update writes a value inside the current hull,
    so the extremes only need a rescan when an extreme value was
    overwritten.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    values = state.values
    lo, hi = min(values), max(values)
    if hi - lo <= threshold:
        return 0
    n = state.graph.node_count
    for count in range(1, cap + 1):
        node = int(rng.integers(n))
        before = values[node]
        _update(state, node)
        if values[node] != before and (before == lo or before == hi):
            lo, hi = min(values), max(values)
        if hi - lo <= threshold:
            return count
    return None


@dataclass(frozen=True)
class ConvergenceRecord:
    """Rounds-to-convergence outcomes for one (p, girth) cell.

    One entry per repetition, None where the round cap was exceeded;
    capped runs are never averaged in, only counted.  `resamples`
    counts graph redraws needed to obtain connected samples.
    """

    edge_probability: float
    girth: int
    rounds: tuple[Optional[int], ...] = field(default=())
    resamples: int = 0
    seed: int = 0

    @property
    def reps(self) -> int:
        return len(self.rounds)

    @property
    def cap_exceeded(self) -> int:
        return sum(1 for r in self.rounds if r is None)

    @property
    def mean_rounds(self) -> Optional[float]:
        done = [r for r in self.rounds if r is not None]
        return float(np.mean(done)) if done else None

    @property
    def stddev_rounds(self) -> Optional[float]:
        done = [r for r in self.rounds if r is not None]
        return float(np.std(done, ddof=1)) if len(done) > 1 else None


def _connected_sample(
    node_count: int, p: float, rng: np.random.Generator
) -> tuple[Graph, int]:
    """Erdos-Renyi sample, redrawn until connected; counts redraws."""
    resamples = 0
    while True:
        graph = erdos_renyi(node_count, p, rng)
        if _connected(graph):
            return graph, resamples
        resamples += 1


def _connected(graph: Graph) -> bool:
    n = graph.node_count
    if n == 0:
        return True
    seen = {0}
    stack = [0]
    while stack:
        for w in graph._adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _study_job(args) -> tuple[int, int, int, list[Optional[int]]]:
    (node_count, p, p_index, girth_list, rep, cap, threshold, seed) = args
    rng = np.random.default_rng(np.random.SeedSequence([seed, p_index, rep]))
    graph, resamples = _connected_sample(node_count, p, rng)
    outcomes = []
    for g in girth_list:
        if g > 3:
            # stretching is cumulative: continuing to a higher target
            # consumes the generator exactly as a single longer run
            graph = stretch_to_girth(graph, g, rng)
        run_rng = np.random.default_rng(
            np.random.SeedSequence([seed, p_index, rep, g])
        )
        state = init_state(graph, run_rng)
        outcomes.append(
            run_to_convergence(state, run_rng, threshold=threshold, cap=cap)
        )
    return p_index, rep, resamples, outcomes


def run_convergence_study(
    node_count: int = 50,
    edge_probabilities: Sequence[float] = (0.1, 0.5, 0.9),
    girths: Iterable[int] = range(3, 26),
    reps: int = 1000,
    cap: int = 10**6,
    threshold: float = 1.0,
    seed: int = 0,
    workers: Optional[int] = None,
) -> list[ConvergenceRecord]:
    """Mean convergence cost per (edge probability, target girth).

    Each repetition draws one connected graph, stretches it through
    the girth targets in ascending order, and runs averaging to
    convergence at every stage; girth 3 is the unstretched baseline.
    Results are keyed by cell, so worker count never affects output.
    """
    girth_list = sorted(set(int(g) for g in girths))
    if girth_list and girth_list[0] < 3:
        raise ValueError("girth targets start at 3")
    jobs = [
        (node_count, p, pi, girth_list, rep, cap, threshold, seed)
        for pi, p in enumerate(edge_probabilities)
        for rep in range(reps)
    ]
    outcomes = {}
    resamples = dict.fromkeys(range(len(edge_probabilities)), 0)
    for p_index, rep, redraws, runs in _run_jobs(_study_job, jobs, workers):
        outcomes[p_index, rep] = runs
        resamples[p_index] += redraws
    records = []
    for pi, p in enumerate(edge_probabilities):
        for gi, g in enumerate(girth_list):
            records.append(
                ConvergenceRecord(
                    edge_probability=p,
                    girth=g,
                    rounds=tuple(
                        outcomes[pi, rep][gi] for rep in range(reps)
                    ),
                    resamples=resamples[pi],
                    seed=seed,
                )
            )
    return records


CONVERGE_CSV_HEADER = "p,girth,reps,mean_rounds,stddev_rounds,cap_exceeded,seed"


def write_converge_csv(records: Iterable[ConvergenceRecord], path) -> None:
    """One row per (p, girth) cell, capped runs reported separately."""
    lines = [CONVERGE_CSV_HEADER]
    for rec in records:
        lines.append(
            ",".join(
                [
                    repr(rec.edge_probability),
                    str(rec.girth),
                    str(rec.reps),
                    _cell_field(rec.mean_rounds),
                    _cell_field(rec.stddev_rounds),
                    str(rec.cap_exceeded),
                    str(rec.seed),
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_plot_data(records: Iterable[ConvergenceRecord], path) -> None:
    """Wide table for plotting: one girth column, one column per p."""
    cells = {}
    probabilities = []
    girth_values = []
    for rec in records:
        if rec.edge_probability not in probabilities:
            probabilities.append(rec.edge_probability)
        if rec.girth not in girth_values:
            girth_values.append(rec.girth)
        cells[rec.edge_probability, rec.girth] = rec.mean_rounds
    girth_values.sort()
    header = ["girth"] + [f"rounds_p{repr(p)}" for p in probabilities]
    lines = [",".join(header)]
    for g in girth_values:
        row = [str(g)]
        for p in probabilities:
            row.append(_cell_field(cells.get((p, g))))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
