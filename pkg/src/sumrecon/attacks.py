"""Monte Carlo studies of reconstruction in random adversary views.

Views are bipartite: a fixed set of colluding observers on one side,
their direct neighbours on the other.  The studies measure how much
private data the colluders can recover from summations alone, first
when values never change (the strongest attack), then under an
asynchronous schedule where neighbours keep updating.

All experiments derive per-cell RNG streams from (seed, k, n, m), so a
grid produces identical results regardless of execution order or the
number of worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .graphs import AdversaryView
from .knowledge import AdversarialKnowledge
from .linalg import IncrementalRref

__all__ = [
    "BipartiteParams",
    "ExperimentRecord",
    "NoValidGraphError",
    "REJECTION_LIMIT",
    "admissible_edge_range",
    "sample_view",
    "reconstructed_count",
    "rounds_until_success",
    "run_fraction_grid",
    "run_rounds_grid",
    "marginal_distribution",
    "write_grid_csv",
    "write_marginal_csv",
    "GRID_CSV_HEADER",
    "MARGINAL_CSV_HEADER",
]

REJECTION_LIMIT = 10**6


class NoValidGraphError(RuntimeError):
    """Rejection sampling exhausted its candidate budget."""


@dataclass(frozen=True)
class BipartiteParams:
    """One experiment cell: view shape, sample count, and master seed."""

    adversaries: int
    neighbours: int
    edges: int
    samples: int
    seed: int

    def __post_init__(self):
        if self.adversaries < 1:
            raise ValueError("need at least one adversary")
        if self.neighbours < 1:
            raise ValueError("need at least one neighbour")
        if self.edges < 0:
            raise ValueError("edge count cannot be negative")
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def admissible(self) -> bool:
        """Whether any view with these counts exists at all.

        Every neighbour needs an edge and each observer-neighbour pair
        supports at most one, so n <= m <= k*n.
        """
        return self.neighbours <= self.edges <= self.adversaries * self.neighbours


def admissible_edge_range(k: int, n: int) -> range:
    """All edge counts for which a (k, n) view can exist."""
    return range(n, k * n + 1)


def sample_view(params: BipartiteParams, rng: np.random.Generator) -> AdversaryView:
    """Draw one uniform random view passing the triviality filters.

    The view is a uniform m-subset of the k*n possible edges, redrawn
    until no observer has exactly one edge (that neighbour's value
    would be read off directly) and no neighbour is isolated (it would
    not really be a neighbour).  Observers without edges, neighbours
    with a single edge, and disconnected views all stay in.

    Raises NoValidGraphError when REJECTION_LIMIT candidates fail.
    """
    if not params.admissible:
        raise ValueError(
            f"no bipartite view has k={params.adversaries}, "
            f"n={params.neighbours}, m={params.edges}"
        )
    k, n, m = params.adversaries, params.neighbours, params.edges
    cells = k * n
    batch = 16
    attempts = 0
    while attempts < REJECTION_LIMIT:
        subsets = np.argsort(rng.random((batch, cells)), axis=1)[:, :m]
        rows = np.repeat(np.arange(batch), m)
        deg_adv = np.bincount(
            rows * k + (subsets // n).ravel(), minlength=batch * k
        ).reshape(batch, k)
        deg_nbr = np.bincount(
            rows * n + (subsets % n).ravel(), minlength=batch * n
        ).reshape(batch, n)
        ok = ~np.any(deg_adv == 1, axis=1) & np.all(deg_nbr >= 1, axis=1)
        attempts += batch
        hits = np.flatnonzero(ok)
        if hits.size:
            flat = np.zeros(cells, dtype=np.uint8)
            flat[subsets[hits[0]]] = 1
            return AdversaryView(
                adversary_count=k,
                neighbour_count=n,
                biadjacency=flat.reshape(k, n),
                adversary_labels=tuple(range(k)),
                neighbour_labels=tuple(range(k, k + n)),
            )
        batch = min(batch * 2, 1024)
    raise NoValidGraphError(
        f"no valid graph found for k={k}, n={n}, m={m} "
        f"after {attempts} candidates"
    )


def reconstructed_count(view: AdversaryView) -> int:
    """How many neighbour values fall to colluders watching static data.

    With values never changing, each observer contributes one row (its
    neighbourhood indicator) and the recoverable values are exactly the
    unit columns reachable from those rows.
    """
    tracker = IncrementalRref()
    for c in range(view.adversary_count):
        nbrs = np.flatnonzero(view.biadjacency[c])
        if nbrs.size:
            tracker.add_row(nbrs.tolist())
    return tracker.solved_count


def _simulate(
    view: AdversaryView, rng: np.random.Generator, max_rounds: int
) -> tuple[Optional[int], Optional[int]]:
    """One asynchronous attack run.

    Each round a uniform participant wakes: an observer records the
    current sum over its neighbours, a neighbour updates its value.
    Returns (first round with a recoverable value, observer summations
    up to then), or (None, None) if `max_rounds` pass without one.
    """
    know = AdversarialKnowledge(view)
    tracker = IncrementalRref()
    k = view.adversary_count
    wakes = rng.integers(0, k + view.neighbour_count, size=max_rounds)
    summations = 0
    for rnd, w in enumerate(wakes, start=1):
        w = int(w)
        if w < k:
            if know.neighbours_of(w):
                tracker.add_row(know.record_summation(w).terms)
                summations += 1
        else:
            know.record_update(w - k)
        if tracker.has_solution():
            return rnd, summations
    return None, None


def rounds_until_success(
    view: AdversaryView, rng: np.random.Generator, max_rounds: int = 250
) -> Optional[int]:
    """Rounds until the first value becomes recoverable, None if never."""
    rounds, _ = _simulate(view, rng, max_rounds)
    return rounds


@dataclass(frozen=True)
class ExperimentRecord:
    """Per-cell outcomes; every aggregate recomputes from them.

    `counts` holds reconstructed-value counts, one per sampled view.
    `rounds` and `summations` hold one entry per attack run, aligned,
    with None marking truncation.  A cell with no admissible or
    sampleable view is kept with feasible=False and empty outcomes.
    """

    params: BipartiteParams
    feasible: bool = True
    counts: tuple[int, ...] = ()
    rounds: tuple[Optional[int], ...] = ()
    summations: tuple[Optional[int], ...] = ()

    @property
    def mean_fraction(self) -> Optional[float]:
        if not self.counts:
            return None
        return sum(self.counts) / (len(self.counts) * self.params.neighbours)

    @property
    def p_ge_1(self) -> Optional[float]:
        if not self.counts:
            return None
        return sum(1 for c in self.counts if c >= 1) / len(self.counts)

    @property
    def mean_rounds(self) -> Optional[float]:
        done = [r for r in self.rounds if r is not None]
        if not done:
            return None
        return sum(done) / len(done)

    @property
    def truncation_rate(self) -> Optional[float]:
        if not self.rounds:
            return None
        return sum(1 for r in self.rounds if r is None) / len(self.rounds)

    @property
    def mean_summations(self) -> Optional[float]:
        done = [s for s in self.summations if s is not None]
        if not done:
            return None
        return sum(done) / len(done)

    @property
    def summations_per_adversary(self) -> Optional[float]:
        mean = self.mean_summations
        if mean is None:
            return None
        return mean / self.params.adversaries


def _view_rng(params: BipartiteParams) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(
            [params.seed, params.adversaries, params.neighbours, params.edges, 0]
        )
    )


def _play_rng(params: BipartiteParams) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(
            [params.seed, params.adversaries, params.neighbours, params.edges, 1]
        )
    )


def _sample_cell(params: BipartiteParams) -> Optional[list[AdversaryView]]:
    """The cell's fixed view sample, or None when none can exist."""
    if not params.admissible:
        return None
    rng = _view_rng(params)
    try:
        return [sample_view(params, rng) for _ in range(params.samples)]
    except NoValidGraphError:
        return None


def _fraction_cell(params: BipartiteParams) -> ExperimentRecord:
    views = _sample_cell(params)
    if views is None:
        return ExperimentRecord(params, feasible=False)
    return ExperimentRecord(
        params, counts=tuple(reconstructed_count(v) for v in views)
    )


def _rounds_cell(job: tuple[BipartiteParams, int, int]) -> ExperimentRecord:
    params, reps, max_rounds = job
    views = _sample_cell(params)
    if views is None:
        return ExperimentRecord(params, feasible=False)
    counts = tuple(reconstructed_count(v) for v in views)
    rng = _play_rng(params)
    rounds: list[Optional[int]] = []
    summations: list[Optional[int]] = []
    for view, count in zip(views, counts):
        if count == 0:
            continue
        for _ in range(reps):
            r, s = _simulate(view, rng, max_rounds)
            rounds.append(r)
            summations.append(s)
    return ExperimentRecord(
        params,
        counts=counts,
        rounds=tuple(rounds),
        summations=tuple(summations),
    )


def _cell_params(
    k: int,
    n_values: Iterable[int],
    m_values: Optional[Iterable[int]],
    samples: int,
    seed: int,
) -> list[BipartiteParams]:
    out = []
    for n in n_values:
        ms = admissible_edge_range(k, n) if m_values is None else m_values
        for m in ms:
            out.append(BipartiteParams(k, n, m, samples, seed))
    return out


def _run_jobs(fn, jobs: Sequence, workers: Optional[int]) -> list:
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def run_fraction_grid(
    k: int,
    n_values: Iterable[int],
    samples: int = 1000,
    seed: int = 0,
    m_values: Optional[Iterable[int]] = None,
    workers: Optional[int] = None,
) -> list[ExperimentRecord]:
    """Static reconstruction study over all (n, m) cells.

    Each cell samples `samples` filtered views and counts recoverable
    values per view.  Cells where no view exists come back with
    feasible=False rather than being dropped or zeroed.
    """
    params = _cell_params(k, n_values, m_values, samples, seed)
    return _run_jobs(_fraction_cell, params, workers)


def run_rounds_grid(
    k: int,
    n_values: Iterable[int],
    samples: int = 1000,
    reps: int = 100,
    max_rounds: int = 250,
    seed: int = 0,
    m_values: Optional[Iterable[int]] = None,
    workers: Optional[int] = None,
) -> list[ExperimentRecord]:
    """Asynchronous attack study over all (n, m) cells.

    Regenerates each cell's view sample from the same seeds as
    run_fraction_grid, keeps the views with at least one recoverable
    value, and attacks each `reps` times under random wake-up orders,
    truncating at `max_rounds`.
    """
    cells = _cell_params(k, n_values, m_values, samples, seed)
    jobs = [(p, reps, max_rounds) for p in cells]
    return _run_jobs(_rounds_cell, jobs, workers)


def marginal_distribution(
    records: Sequence[ExperimentRecord],
) -> list[tuple[int, int, int, float]]:
    """Distribution of recoverable-value counts per n, pooled over m.

    Every feasible cell contributes its full equally-sized sample, so
    each admissible edge count carries the same weight.  Rows are
    (k, n, count, probability) with counts 0..min(k, n); probabilities
    for fixed n sum to 1.
    """
    ks = {r.params.adversaries for r in records}
    if len(ks) > 1:
        raise ValueError("records mix adversary counts")
    out = []
    by_n: dict[int, list[int]] = {}
    for rec in records:
        if rec.feasible:
            by_n.setdefault(rec.params.neighbours, []).extend(rec.counts)
    (k,) = ks
    for n in sorted(by_n):
        pooled = by_n[n]
        for c in range(min(k, n) + 1):
            out.append((k, n, c, pooled.count(c) / len(pooled)))
    return out


GRID_CSV_HEADER = "k,n,m,samples,mean_fraction,p_ge_1,mean_rounds,truncation_rate,seed"
MARGINAL_CSV_HEADER = "k,n,count_reconstructed,probability"


def _cell_field(value: Optional[float]) -> str:
    return "NA" if value is None else repr(value)


def write_grid_csv(records: Sequence[ExperimentRecord], path) -> None:
    lines = [GRID_CSV_HEADER]
    for rec in records:
        p = rec.params
        lines.append(
            f"{p.adversaries},{p.neighbours},{p.edges},{p.samples},"
            f"{_cell_field(rec.mean_fraction)},{_cell_field(rec.p_ge_1)},"
            f"{_cell_field(rec.mean_rounds)},{_cell_field(rec.truncation_rate)},"
            f"{p.seed}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_marginal_csv(
    rows: Sequence[tuple[int, int, int, float]], path
) -> None:
    lines = [MARGINAL_CSV_HEADER]
    for k, n, count, probability in rows:
        lines.append(f"{k},{n},{count},{repr(probability)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
