"""Exact rational matrix algebra for reconstruction analysis.

Dense matrices over arbitrary-precision rationals, reduced row echelon
form with transformation tracking, detection of variables whose value is
forced by a linear system of sums, and the column-merge / row-dedup
reductions used to reason about such systems.

Everything here is exact: whether a variable is recoverable is a rank
question, and any epsilon-based test can mis-classify.  Scalars are
`fractions.Fraction` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "RationalMatrix",
    "PartialSolution",
    "rref",
    "partial_solutions",
    "solvable_set_oracle",
    "bareiss_rank",
    "merge_columns",
    "dedup_rows",
    "IncrementalRref",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_fraction_row(row: Iterable) -> tuple[Fraction, ...]:
    return tuple(x if isinstance(x, Fraction) else Fraction(x) for x in row)


class RationalMatrix:
    """Immutable dense matrix of `fractions.Fraction` entries.

    Row-major; rows and cols may be zero.  Instances hash and compare by
    value, so they can be frozen into expected test fixtures directly.
    """

    __slots__ = ("_rows", "rows", "cols")

    def __init__(self, entries: Iterable[Iterable], cols: int | None = None):
        grid = tuple(_as_fraction_row(r) for r in entries)
        if grid:
            widths = {len(r) for r in grid}
            if len(widths) != 1:
                raise ValueError("ragged rows: %s" % sorted(widths))
            ncols = widths.pop()
            if cols is not None and cols != ncols:
                raise ValueError(f"expected {cols} columns, got {ncols}")
        else:
            ncols = 0 if cols is None else cols
        self._rows = grid
        self.rows = len(grid)
        self.cols = ncols

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[_ZERO] * cols for _ in range(rows)], cols=cols)

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def row_list(self) -> list[list[Fraction]]:
        """Mutable copy of the entry grid."""
        return [list(r) for r in self._rows]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        return self._rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.cols == other.cols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.cols, self._rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"RationalMatrix({self.rows}x{self.cols}, [{body}])"

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ocols = [other.column(j) for j in range(other.cols)]
        return RationalMatrix(
            [[sum((a * b for a, b in zip(r, c)), _ZERO) for c in ocols] for r in self._rows],
            cols=other.cols,
        )

    def stack(self, other: "RationalMatrix") -> "RationalMatrix":
        """Vertical concatenation."""
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return RationalMatrix(self._rows + other._rows, cols=self.cols)

    def scaled_integer_rows(self) -> list[list[int]]:
        """Each row multiplied by its denominators' lcm: integer rows, same row space."""
        out = []
        for r in self._rows:
            scale = math.lcm(*(x.denominator for x in r)) if r else 1
            out.append([int(x * scale) for x in r])
        return out


@dataclass(frozen=True)
class PartialSolution:
    """A row-combination that pins down exactly one variable.

    `coefficients` is a vector y over the rows of the source system A such
    that y·A has a single non-zero entry, located at `variable_index`; the
    variable's value is then y·Θ over the observed sums (scaled by that
    entry, which is 1 for rows taken from the reduced echelon form).
    """

    variable_index: int
    coefficients: tuple[Fraction, ...]


def rref(a: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix]:
    """Reduced row echelon form with its transformation witness.

    Standard Gauss-Jordan elimination: pivots are the first non-zero entry
    scanning left-to-right, top-to-bottom; pivot rows are normalised to a
    leading 1 and eliminated above and below.

    Args:
        a: any matrix, including empty ones.

    Returns:
        (R, B) where R = rref(a) and B is the square invertible matrix of
        accumulated row operations with B @ a == R, exactly.
    """
    m = a.row_list()
    t = [list(r) for r in RationalMatrix.identity(a.rows).row_list()]
    nrows, ncols = a.rows, a.cols
    piv = 0
    for col in range(ncols):
        if piv == nrows:
            break
        hit = next((r for r in range(piv, nrows) if m[r][col] != 0), None)
        if hit is None:
            continue
        if hit != piv:
            m[piv], m[hit] = m[hit], m[piv]
            t[piv], t[hit] = t[hit], t[piv]
        lead = m[piv][col]
        if lead != 1:
            inv = _ONE / lead
            m[piv] = [x * inv for x in m[piv]]
            t[piv] = [x * inv for x in t[piv]]
        for r in range(nrows):
            if r == piv:
                continue
            f = m[r][col]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[piv])]
                t[r] = [x - f * y for x, y in zip(t[r], t[piv])]
        piv += 1
    return RationalMatrix(m, cols=ncols), RationalMatrix(t, cols=nrows)


def partial_solutions(a: RationalMatrix) -> list[PartialSolution]:
    """All variables whose value is forced by the system, with witnesses.

    A variable i is recoverable iff some row of rref(a) has exactly one
    non-zero entry, at column i; the witness coefficients are the matching
    row of the transformation matrix B (so that value = y·Θ).

    Returns:
        PartialSolutions sorted by variable index, at most one per
        variable (rows of the reduced form have distinct pivots).
    """
    r, b = rref(a)
    found = []
    for i in range(r.rows):
        row = r.row(i)
        support = [j for j, x in enumerate(row) if x != 0]
        if len(support) == 1:
            found.append(PartialSolution(support[0], b.row(i)))
    found.sort(key=lambda p: p.variable_index)
    return found


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free Bareiss elimination.

    Exact over the integers: every division in the update
    m[i][j] <- (m[i][j]*pivot - m[i][c]*m[p][j]) / previous_pivot
    is known to be exact, so no rationals appear.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    rank = 0
    prev = 1
    col = 0
    while rank < nrows and col < ncols:
        hit = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if hit is None:
            col += 1
            continue
        if hit != rank:
            m[rank], m[hit] = m[hit], m[rank]
        pivot = m[rank][col]
        for r in range(rank + 1, nrows):
            f = m[r][col]
            m[r] = [(pivot * m[r][j] - f * m[rank][j]) // prev for j in range(ncols)]
        prev = pivot
        rank += 1
        col += 1
    return rank


def solvable_set_oracle(a: RationalMatrix) -> set[int]:
    """Independent recoverability oracle: which unit vectors lie in the row space.

    Computes { i : rank(stack(a, e_i)) == rank(a) } with Bareiss
    elimination, a different algorithm from the Gauss-Jordan route used by
    `partial_solutions`; the two must agree on every input.
    """
    base = a.scaled_integer_rows()
    r0 = bareiss_rank(base) if base else 0
    out = set()
    for i in range(a.cols):
        unit = [0] * a.cols
        unit[i] = 1
        if bareiss_rank(base + [unit]) == r0:
            out.add(i)
    return out


def merge_columns(a: RationalMatrix, n: int, t: int) -> RationalMatrix:
    """Collapse each neighbour's t version columns into one column.

    Entry (row, neighbour) of the result is the sum of that row's entries
    over the neighbour's column block [neighbour*t, (neighbour+1)*t).  For
    systems where each row observes at most one version per neighbour the
    result is binary.

    Args:
        a: matrix with exactly n*t columns (row count is free).
        n: neighbour count.
        t: versions per neighbour block.

    Raises:
        ValueError: column count is not n*t.
    """
    if n < 0 or t < 0 or a.cols != n * t:
        raise ValueError(f"expected {n}*{t}={n * t} columns, got {a.cols}")
    merged = [
        [sum(row[v * t : (v + 1) * t], _ZERO) for v in range(n)]
        for row in (a.row(i) for i in range(a.rows))
    ]
    return RationalMatrix(merged, cols=n)


def dedup_rows(
    a1: RationalMatrix, y1: Sequence
) -> tuple[RationalMatrix, tuple[Fraction, ...]]:
    """Merge duplicate rows, summing their coefficients; drop unused rows.

    Rows equal as vectors are pooled; a pooled row is kept only when its
    summed coefficient is non-zero.  The defining identity y2·A2 == y1·A1
    holds exactly.  Kept rows appear in order of first occurrence.

    Args:
        a1: source matrix.
        y1: one coefficient per row of a1.

    Returns:
        (A2, y2): deduplicated matrix and the pooled coefficients.
    """
    y = _as_fraction_row(y1)
    if len(y) != a1.rows:
        raise ValueError(f"expected {a1.rows} coefficients, got {len(y)}")
    totals: dict[tuple[Fraction, ...], Fraction] = {}
    order: list[tuple[Fraction, ...]] = []
    for i in range(a1.rows):
        row = a1.row(i)
        if row not in totals:
            totals[row] = _ZERO
            order.append(row)
        totals[row] += y[i]
    kept = [row for row in order if totals[row] != 0]
    return (
        RationalMatrix(kept, cols=a1.cols),
        tuple(totals[row] for row in kept),
    )


# Growth bound for the int64 fast path of IncrementalRref; beyond it rows
# are renormalised by their gcd, and the cross-multiply guard escalates to
# arbitrary precision.  Bounds are tracked in float64, so the guard sits
# 8x below the int64 range to absorb rounding slack.
_NORM_LIMIT = float(1 << 40)
_GUARD_LIMIT = float(1 << 60)


class IncrementalRref:
    """Reduced row echelon form of a growing binary system, maintained online.

    Rows arrive as sets of column keys (each key an opaque hashable naming
    one variable) with implicit coefficient 1.  The basis is kept fully
    reduced at integer scale: each stored row is a primitive-integer
    multiple of the corresponding reduced-form row, which leaves the
    single-non-zero test (and hence the recoverable-variable set) intact.

    Full reduction buys a vectorised hot path: every stored row is zero at
    every other row's pivot column, so eliminating an incoming row against
    all pivots is one coefficient gather plus one vector-matrix product,
    with no data dependency between pivots.

    Arithmetic runs on an int64 numpy block with per-row magnitude bounds
    propagated arithmetically; if a bound ever approaches the int64 range
    the whole basis escalates to Python-integer (object dtype) rows, which
    keeps results exact at any size.  Appending rows only grows the row
    space, so the recoverable set grows monotonically; `has_solution` is
    O(1) per query.
    """

    def __init__(self):
        self._col_index: dict = {}
        self._col_keys: list = []
        self._row_cap = 32
        self._col_cap = 64
        self._ncols = 0
        self._rank = 0
        self._m = np.zeros((self._row_cap, self._col_cap), dtype=np.int64)
        self._pivots: list[int] = []  # pivot column position per basis row
        self._pivot_of_col: list[int] = [-1] * self._col_cap
        # Per-row upper bound on |entries|; pinned at the guard once exact,
        # which makes every later touch renormalise that row.
        self._rmax = np.zeros(self._row_cap, dtype=np.float64)
        self._nnz = np.zeros(self._row_cap, dtype=np.int64)
        self._n_single = 0
        self._exact = False  # True once escalated to object dtype

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def solved_count(self) -> int:
        """Number of basis rows pinning a single variable."""
        return self._n_single

    def has_solution(self) -> bool:
        return self._n_single > 0

    def solved_keys(self) -> set:
        """Column keys of all currently recoverable variables."""
        return {
            self._col_keys[self._pivots[i]]
            for i in range(self._rank)
            if self._nnz[i] == 1
        }

    def _position(self, key) -> int:
        pos = self._col_index.get(key)
        if pos is None:
            pos = self._ncols
            self._col_index[key] = pos
            self._col_keys.append(key)
            self._ncols += 1
            if pos >= self._col_cap:
                self._col_cap *= 2
                grown = np.zeros((self._row_cap, self._col_cap), dtype=self._m.dtype)
                grown[:, : self._m.shape[1]] = self._m
                self._m = grown
                self._pivot_of_col.extend([-1] * (self._col_cap - len(self._pivot_of_col)))
        return pos

    def _escalate(self) -> None:
        if not self._exact:
            self._m = self._m.astype(object)
            self._rmax[: self._rank] = _GUARD_LIMIT
            self._exact = True

    def _gcd_normalise(self, i: int, width: int) -> None:
        """Divide basis row i by its content gcd; refresh its bound."""
        row = self._m[i, :width]
        nz = row[row != 0]
        if len(nz) == 0:
            self._rmax[i] = 0.0
            return
        if self._exact:
            g = 0
            for v in nz:
                g = math.gcd(g, abs(int(v)))
                if g == 1:
                    break
            if g > 1:
                row //= g
            self._rmax[i] = _GUARD_LIMIT
        else:
            g = int(np.gcd.reduce(np.abs(nz)))
            if g > 1:
                row //= g
            self._rmax[i] = float(max(row.max(), -row.min()))

    def add_row(self, keys: Iterable) -> bool:
        """Reduce a binary row (given by its support) into the basis.

        Returns True when the row was independent (rank grew).
        """
        positions = list({self._position(k) for k in keys})
        width = self._ncols
        # Pivot hits among the support; all eliminations are independent
        # because stored rows vanish at each other's pivot columns.
        hits = [self._pivot_of_col[p] for p in positions]
        hit_rows = [r for r in hits if r >= 0]
        # Scale by the lcm of the hit leads (not their product) to keep
        # intermediate magnitudes down, and reduce content right after.
        leads_in = [int(self._m[r, self._pivots[r]]) for r in hit_rows]
        scale = 1
        for v in leads_in:
            scale = scale * v // math.gcd(scale, v)
        coeffs = [scale // v for v in leads_in]
        if not self._exact:
            bound = float(scale)
            for c, r in zip(coeffs, hit_rows):
                bound += c * self._rmax[r]
            if bound >= _GUARD_LIMIT:
                self._escalate()
        dtype = object if self._exact else np.int64
        work = np.zeros(self._col_cap, dtype=dtype)
        for p in positions:
            work[p] = scale
        if hit_rows:
            cvec = np.array(coeffs, dtype=dtype)
            work[:width] -= cvec.dot(self._m[hit_rows, :width])
        support = np.flatnonzero(work[:width])
        if len(support) == 0:
            return False
        # Normalise content and pivot sign before storing.
        row = work[:width]
        if self._exact or scale > 1 or bound > _NORM_LIMIT:
            if self._exact:
                g = 0
                for p in support:
                    g = math.gcd(g, abs(int(row[p])))
                    if g == 1:
                        break
            else:
                g = int(np.gcd.reduce(np.abs(row[support])))
            if g > 1:
                row //= g
        pivot = int(support[0])
        if row[pivot] < 0:
            np.negative(row, out=row)
        lead = int(row[pivot])
        if self._exact:
            rowmax = 0
            rmax_new = _GUARD_LIMIT
        else:
            rowmax = int(max(row.max(), -row.min()))
            rmax_new = float(rowmax)
        # Back-eliminate the new pivot column from the stored basis.
        if self._rank:
            col = self._m[: self._rank, pivot]
            sel = np.flatnonzero(col)
            if len(sel):
                if self._exact:
                    bounds = None
                else:
                    fa = np.abs(col[sel]).astype(np.float64)
                    bounds = lead * self._rmax[sel] + fa * rmax_new
                    if float(bounds.max()) >= _GUARD_LIMIT:
                        self._escalate()
                        work = work.astype(object)
                        row = work[:width]
                        bounds = None
                f = self._m[sel, pivot].copy()
                block = self._m[sel, :width]
                if lead != 1:
                    block *= lead
                block -= np.outer(f, row)
                self._m[sel, :width] = block
                if bounds is None:
                    self._rmax[sel] = _GUARD_LIMIT
                    need = sel
                else:
                    self._rmax[sel] = bounds
                    need = sel[bounds > _NORM_LIMIT]
                for i in need.tolist():
                    self._gcd_normalise(i, width)
                counts = np.count_nonzero(self._m[sel, :width], axis=1)
                olds = self._nnz[sel]
                self._nnz[sel] = counts
                self._n_single += int((counts == 1).sum()) - int((olds == 1).sum())
        # Store the new basis row.
        if self._rank == self._row_cap:
            self._row_cap *= 2
            grown = np.zeros((self._row_cap, self._col_cap), dtype=self._m.dtype)
            grown[: self._rank] = self._m
            self._m = grown
            for arr_name in ("_rmax", "_nnz"):
                old = getattr(self, arr_name)
                fresh = np.zeros(self._row_cap, dtype=old.dtype)
                fresh[: self._rank] = old
                setattr(self, arr_name, fresh)
        self._m[self._rank, :width] = row
        self._pivots.append(pivot)
        self._pivot_of_col[pivot] = self._rank
        self._rmax[self._rank] = rmax_new
        self._nnz[self._rank] = len(support)
        self._n_single += int(len(support) == 1)
        self._rank += 1
        return True
