"""Observation ledger colluding nodes accumulate about their neighbours.

Each time a colluder runs a summation it learns one linear equation: the
sum of the current values of its outside neighbours.  Neighbours change
their values over time, and every change a colluder can notice turns
into a fresh unknown.  This module maintains that growing system,
renders it as an exact binary matrix with one column block per
neighbour, and extracts the values that the system pins down uniquely.

The ledger is single-writer: one simulation loop appends observations.
Snapshots produced by `to_matrix` are immutable and freely shareable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .graphs import AdversaryView
from .linalg import RationalMatrix, partial_solutions

__all__ = [
    "Observation",
    "AdversarialKnowledge",
    "GroundTruth",
    "ReconstructedValue",
    "augment_with_self_knowledge",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class Observation:
    """One summation: who ran it, which value versions it covered, the sum.

    `terms` holds (neighbour, version) pairs; `total` is None when the
    run only tracks structure.
    """

    adversary: int
    terms: tuple[tuple[int, int], ...]
    total: Optional[Fraction]


@dataclass(frozen=True)
class ReconstructedValue:
    """A pinned-down private value: neighbour, version, exact value."""

    neighbour: int
    version: int
    value: Fraction


class AdversarialKnowledge:
    """Versioned equation system built from observed summations.

    Wraps an `AdversaryView` and appends one row per summation.  Value
    changes are tracked per neighbour with a dirty flag: the version
    counter increments lazily at the next observation that includes the
    neighbour, so any number of changes between observations collapses
    into a single new unknown.
    """

    def __init__(self, view: AdversaryView):
        self._view = view
        bi = view.biadjacency
        self._nbrs_of = tuple(
            tuple(int(j) for j in np.flatnonzero(bi[c]))
            for c in range(view.adversary_count)
        )
        self._version = [0] * view.neighbour_count
        self._dirty = [False] * view.neighbour_count
        self._seen = [False] * view.neighbour_count
        self._rows: list[Observation] = []

    @property
    def view(self) -> AdversaryView:
        return self._view

    @property
    def observation_count(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> tuple[Observation, ...]:
        return tuple(self._rows)

    def neighbours_of(self, adversary: int) -> tuple[int, ...]:
        """View-column indices adjacent to the given adversary."""
        self._check_adversary(adversary)
        return self._nbrs_of[adversary]

    def _check_adversary(self, adversary: int) -> None:
        if not 0 <= adversary < self._view.adversary_count:
            raise ValueError(f"adversary {adversary} out of range")

    def _check_neighbour(self, neighbour: int) -> None:
        if not 0 <= neighbour < self._view.neighbour_count:
            raise ValueError(f"neighbour {neighbour} out of range")

    def record_update(self, neighbour: int) -> None:
        """Note that a neighbour changed its value.

        Marks the neighbour dirty; the version increments at the next
        observation including it, so repeated changes coalesce.  Only
        observed values are unknowns, so changes before a neighbour's
        first observation add nothing: version 0 is whatever value the
        first observation happens to see.
        """
        self._check_neighbour(neighbour)
        self._dirty[neighbour] = True

    def _next_version(self, v: int) -> int:
        if self._dirty[v] and self._seen[v]:
            return self._version[v] + 1
        return self._version[v]

    def pending_terms(self, adversary: int) -> tuple[tuple[int, int], ...]:
        """The (neighbour, version) pairs the adversary's next summation
        would cover, without recording anything."""
        self._check_adversary(adversary)
        return tuple((v, self._next_version(v)) for v in self._nbrs_of[adversary])

    def record_summation(
        self,
        adversary: int,
        total: Optional[Fraction] = None,
        neighbours: Optional[Iterable[int]] = None,
    ) -> Observation:
        """Append the equation learned by one summation.

        The summation covers the adversary's neighbours in the view;
        dirty ones get a fresh version first.  A neighbour-less
        adversary cannot sum and is rejected.  `neighbours` overrides
        the covered set, which models an adversary whose neighbourhood
        differs between rounds; the static-graph invariants only hold
        without overrides.
        """
        self._check_adversary(adversary)
        if neighbours is None:
            covered = self._nbrs_of[adversary]
        else:
            covered = tuple(sorted(set(int(v) for v in neighbours)))
            for v in covered:
                self._check_neighbour(v)
        if not covered:
            raise ValueError(f"adversary {adversary} has no neighbours to sum over")
        terms = []
        for v in covered:
            self._version[v] = self._next_version(v)
            self._dirty[v] = False
            self._seen[v] = True
            terms.append((v, self._version[v]))
        if total is not None and not isinstance(total, Fraction):
            total = Fraction(total)
        obs = Observation(adversary=adversary, terms=tuple(terms), total=total)
        self._rows.append(obs)
        return obs

    def to_matrix(self) -> RationalMatrix:
        """The binary system over all observations.

        With t observations and n neighbours the matrix is t x (n*t);
        the value version i of neighbour v occupies column v*t + i.
        Every neighbour gets the same column budget t, so versions that
        never materialised leave all-zero columns.
        """
        t = len(self._rows)
        n = self._view.neighbour_count
        grid = [[_ZERO] * (n * t) for _ in range(t)]
        for r, obs in enumerate(self._rows):
            row = grid[r]
            for v, i in obs.terms:
                row[v * t + i] = _ONE
        return RationalMatrix(grid, cols=n * t)

    def totals(self) -> tuple[Optional[Fraction], ...]:
        return tuple(obs.total for obs in self._rows)

    def reconstruct(self) -> list[ReconstructedValue]:
        """All private values the recorded sums pin down exactly.

        Each witness row y isolating one variable gives its value as
        y . totals.  Requires every observation to carry a total.
        """
        missing = [r for r, obs in enumerate(self._rows) if obs.total is None]
        if missing:
            raise ValueError(f"observations without sums: {missing}")
        t = len(self._rows)
        totals = [obs.total for obs in self._rows]
        out = []
        for sol in partial_solutions(self.to_matrix()):
            value = sum(
                (c * s for c, s in zip(sol.coefficients, totals)), _ZERO
            )
            out.append(
                ReconstructedValue(
                    neighbour=sol.variable_index // t,
                    version=sol.variable_index % t,
                    value=value,
                )
            )
        return out


class GroundTruth:
    """Lazily drawn private values, one per (neighbour, version).

    Values are uniform integers in [low, high], drawn on first access
    from the generator handed in, so the mapping covers exactly the
    pairs a run ever references while staying reproducible per seed.
    """

    def __init__(self, rng: np.random.Generator, low: int = 0, high: int = 100):
        if low > high:
            raise ValueError("empty value range")
        self._rng = rng
        self._low = low
        self._high = high
        self._values: dict[tuple[int, int], Fraction] = {}

    def value(self, neighbour: int, version: int) -> Fraction:
        key = (neighbour, version)
        got = self._values.get(key)
        if got is None:
            got = Fraction(int(self._rng.integers(self._low, self._high + 1)))
            self._values[key] = got
        return got

    def total_for(self, terms: Iterable[tuple[int, int]]) -> Fraction:
        return sum((self.value(v, i) for v, i in terms), _ZERO)

    def known_pairs(self) -> set[tuple[int, int]]:
        return set(self._values)


def augment_with_self_knowledge(
    a: RationalMatrix, r: RationalMatrix, t: int, k: int
) -> RationalMatrix:
    """Extend a system with the colluders' own values.

    Builds the block matrix [[a, r], [0, I]]: `a` is the t x (n*t)
    outside-neighbour system, `r` (t x (t*k)) marks which colluder
    values each summation included, and the t*k identity rows say the
    colluders know their own values.  Adding these rows never changes
    which outside values are recoverable.
    """
    if a.rows != t:
        raise ValueError(f"expected {t} rows, got {a.rows}")
    if r.rows != t or r.cols != t * k:
        raise ValueError(
            f"self-knowledge block must be {t}x{t * k}, got {r.rows}x{r.cols}"
        )
    top = [list(a.row(i)) + list(r.row(i)) for i in range(t)]
    eye = RationalMatrix.identity(t * k)
    bottom = [[_ZERO] * a.cols + list(eye.row(i)) for i in range(t * k)]
    return RationalMatrix(top + bottom, cols=a.cols + t * k)
