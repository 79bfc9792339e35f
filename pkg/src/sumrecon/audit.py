"""Parsing and analysis of summation audit logs.

A log records, line by line, what a set of colluding observers saw:

    update <neighbour-id>
    sum <observer-id> <neighbour>:<version> ... [= <total>]

`update` notes that a neighbour changed its value; `sum` records one
observed summation with the value versions it covered and, optionally,
the observed total as an exact rational.  `#` starts a comment and
blank lines are ignored.

Analysis replays the log, checks it against the versioning rules
(coalesced updates, versions counted from a neighbour's first
observation), verifies that supplied totals are mutually consistent,
and reports every private value the log pins down, with the row
combination that exposes it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import RationalMatrix, bareiss_rank, partial_solutions

__all__ = [
    "AuditError",
    "AuditLeak",
    "AuditResult",
    "parse_audit_text",
    "analyse_audit_text",
    "analyse_audit_file",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class AuditError(ValueError):
    """Malformed or internally inconsistent audit log."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class AuditLeak:
    """One exposed private value.

    `coefficients` is the per-summation row combination whose weighted
    sum isolates the value; `value` is present when every summation the
    combination draws on carried a total.
    """

    neighbour: int
    version: int
    coefficients: tuple[Fraction, ...]
    value: Optional[Fraction]


@dataclass(frozen=True)
class AuditResult:
    neighbour_ids: tuple[int, ...]
    summation_count: int
    leaks: tuple[AuditLeak, ...]

    @property
    def leak_count(self) -> int:
        return len(self.leaks)


@dataclass(frozen=True)
class _SumLine:
    observer: int
    terms: tuple[tuple[int, int], ...]
    total: Optional[Fraction]
    line: int


def _parse_rational(token: str, line: int) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise AuditError(f"bad rational {token!r}", line) from None


def parse_audit_text(text: str) -> list[_SumLine]:
    """Parse and replay-validate a log; returns its summation lines.

    Versions are checked against the replay state: a neighbour's
    version starts at 0 on first observation and increments exactly
    when the neighbour was updated since its previous observation.
    """
    sums: list[_SumLine] = []
    version: dict[int, int] = {}
    dirty: dict[int, bool] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        tokens = stripped.split()
        kind = tokens[0]
        if kind == "update":
            if len(tokens) != 2:
                raise AuditError("expected 'update <neighbour-id>'", lineno)
            try:
                v = int(tokens[1])
            except ValueError:
                raise AuditError(f"bad neighbour id {tokens[1]!r}", lineno) from None
            if v < 0:
                raise AuditError(f"bad neighbour id {v}", lineno)
            dirty[v] = True
        elif kind == "sum":
            if len(tokens) < 3:
                raise AuditError(
                    "expected 'sum <observer-id> <neighbour:version> ...'", lineno
                )
            try:
                observer = int(tokens[1])
            except ValueError:
                raise AuditError(f"bad observer id {tokens[1]!r}", lineno) from None
            body = tokens[2:]
            total = None
            if "=" in body:
                eq = body.index("=")
                if eq != len(body) - 2:
                    raise AuditError("expected '= <total>' at end of line", lineno)
                total = _parse_rational(body[-1], lineno)
                body = body[:eq]
            if not body:
                raise AuditError("summation covers no neighbours", lineno)
            terms = []
            covered = set()
            for tok in body:
                head, sep, tail = tok.partition(":")
                if not sep:
                    raise AuditError(f"expected '<neighbour>:<version>', got {tok!r}", lineno)
                try:
                    v, i = int(head), int(tail)
                except ValueError:
                    raise AuditError(f"bad term {tok!r}", lineno) from None
                if v < 0 or i < 0:
                    raise AuditError(f"bad term {tok!r}", lineno)
                if v in covered:
                    raise AuditError(f"neighbour {v} listed twice", lineno)
                covered.add(v)
                expected = version[v] + 1 if dirty.get(v) and v in version else version.get(v, 0)
                if i != expected:
                    raise AuditError(
                        f"neighbour {v} should be at version {expected}, log says {i}",
                        lineno,
                    )
                version[v] = expected
                dirty[v] = False
                terms.append((v, i))
            sums.append(
                _SumLine(observer=observer, terms=tuple(terms), total=total, line=lineno)
            )
        else:
            raise AuditError(f"unknown directive {kind!r}", lineno)
    return sums


def _check_consistency(matrix: RationalMatrix, sums: Sequence[_SumLine]) -> None:
    """Reject logs whose totals cannot come from any value assignment.

    Only rows with totals participate: the system restricted to them
    must have the same rank with and without the totals column.
    """
    idx = [r for r, s in enumerate(sums) if s.total is not None]
    if len(idx) < 2:
        return
    plain = [list(matrix.row(r)) for r in idx]
    augmented = [list(matrix.row(r)) + [sums[r].total] for r in idx]
    a = RationalMatrix(plain, cols=matrix.cols)
    b = RationalMatrix(augmented, cols=matrix.cols + 1)
    if bareiss_rank(a.scaled_integer_rows()) != bareiss_rank(b.scaled_integer_rows()):
        lines = ", ".join(str(sums[r].line) for r in idx)
        raise AuditError(f"totals on lines {lines} are mutually inconsistent")


def analyse_audit_text(text: str) -> AuditResult:
    """Full analysis: parse, validate, and extract every exposed value."""
    sums = parse_audit_text(text)
    t = len(sums)
    ids = sorted({v for s in sums for v, _ in s.terms})
    col_of = {v: j for j, v in enumerate(ids)}
    n = len(ids)
    grid = [[_ZERO] * (n * t) for _ in range(t)]
    for r, s in enumerate(sums):
        for v, i in s.terms:
            grid[r][col_of[v] * t + i] = _ONE
    matrix = RationalMatrix(grid, cols=n * t)
    _check_consistency(matrix, sums)
    leaks = []
    for sol in partial_solutions(matrix):
        value: Optional[Fraction] = _ZERO
        for c, s in zip(sol.coefficients, sums):
            if c == 0:
                continue
            if s.total is None:
                value = None
                break
            value += c * s.total
        leaks.append(
            AuditLeak(
                neighbour=ids[sol.variable_index // t],
                version=sol.variable_index % t,
                coefficients=sol.coefficients,
                value=value,
            )
        )
    return AuditResult(
        neighbour_ids=tuple(ids), summation_count=t, leaks=tuple(leaks)
    )


def analyse_audit_file(path) -> AuditResult:
    with open(path, "r", encoding="utf-8") as fh:
        return analyse_audit_text(fh.read())
