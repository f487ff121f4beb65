"""Domain types and exact evaluation for multicampaign assignment.

A problem instance assigns each of ``n`` customers to some subset of ``k``
campaigns.  Customer ``i`` carries an integer preference ``p[i][j]`` for each
campaign ``j`` and a response suppression table ``r_i``: when the customer
receives ``h`` recommendations in total, every one of their preferences is
scaled by ``r_i(h)``.  Campaign ``j`` has an integer weight ``w[j]`` and its
column sum in the assignment matrix must lie in ``[lower_bounds[j],
upper_bounds[j]]``.

The fitness of an assignment matrix ``M`` is

    F(M) = sum_j sum_i  w[j] * r_i(h_i) * p[i][j] * M[i][j],
    h_i  = sum_j M[i][j].

All arithmetic here is exact: preferences and weights are arbitrary-precision
integers, suppression values and fitness are ``fractions.Fraction``.  There is
deliberately no floating point in this module; downstream solvers compare
fitness values for exact equality against thresholds with dozens of digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


class McapError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(McapError):
    """Input data breaks a structural invariant (instance, matrix, or file)."""


class InfeasibleError(McapError):
    """A matrix violates capacity bounds where feasibility is required."""


class GuardExceededError(McapError):
    """A size guard was hit; the requested computation would be too large."""


class PreconditionError(McapError):
    """An operation was invoked outside its supported input class."""


class InternalCheckError(McapError):
    """A self-check that should be impossible to fail has failed."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class SuppressionTable:
    """Response multipliers ``r(0), r(1), ..., r(max_h)`` for one customer.

    ``r(h)`` scales the customer's preferences when they receive ``h``
    recommendations; ``r(0) = 0`` by convention (an unrecommended customer
    contributes nothing) and every value lies in ``[0, 1]``.
    """

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(_as_fraction(v) for v in self.values))

    def __getitem__(self, h: int) -> Fraction:
        return self.values[h]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def max_h(self) -> int:
        return len(self.values) - 1

    def is_constant_above_zero(self) -> bool:
        """True when r(1) = r(2) = ... = r(max_h)."""
        tail = self.values[1:]
        return all(v == tail[0] for v in tail)

    @classmethod
    def constant(cls, value, max_h: int) -> "SuppressionTable":
        v = _as_fraction(value)
        return cls((Fraction(0),) + (v,) * max_h)

    @classmethod
    def indicator(cls, active_h: int, max_h: int) -> "SuppressionTable":
        """Table that is 1 exactly at ``active_h`` and 0 elsewhere."""
        if not 1 <= active_h <= max_h:
            raise ValidationError(f"indicator position {active_h} outside 1..{max_h}")
        return cls(tuple(Fraction(1 if h == active_h else 0) for h in range(max_h + 1)))


@dataclass(frozen=True)
class Instance:
    """A full multicampaign assignment instance.

    Construction only coerces containers; call :func:`validate_instance` to
    enforce the invariants.  Instances are immutable and safe to share across
    concurrent solver invocations.
    """

    n: int
    k: int
    weights: tuple[int, ...]
    preferences: tuple[tuple[int, ...], ...]
    suppression: tuple[SuppressionTable, ...]
    lower_bounds: tuple[int, ...]
    upper_bounds: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(
            self, "preferences", tuple(tuple(int(p) for p in row) for row in self.preferences)
        )
        tables = tuple(
            t if isinstance(t, SuppressionTable) else SuppressionTable(tuple(t))
            for t in self.suppression
        )
        object.__setattr__(self, "suppression", tables)
        object.__setattr__(self, "lower_bounds", tuple(int(b) for b in self.lower_bounds))
        object.__setattr__(self, "upper_bounds", tuple(int(b) for b in self.upper_bounds))


@dataclass(frozen=True)
class AssignmentMatrix:
    """An n-by-k binary matrix; ``entries[i][j] = 1`` assigns campaign j to customer i."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", tuple(tuple(int(m) for m in row) for row in self.entries)
        )

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def k(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.entries)

    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.entries)) if self.entries else ()

    @classmethod
    def zero(cls, n: int, k: int) -> "AssignmentMatrix":
        return cls(tuple((0,) * k for _ in range(n)))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "AssignmentMatrix":
        return cls(tuple(tuple(row) for row in rows))


@dataclass(frozen=True)
class FeasibilityReport:
    """Column-sum check of a matrix against an instance's capacity bounds."""

    feasible: bool
    column_sums: tuple[int, ...]
    violations: tuple[tuple[int, int, str], ...]  # (campaign, sum, "lower" | "upper")


def validate_instance(inst: Instance) -> Instance:
    """Return ``inst`` unchanged iff every instance invariant holds.

    Raises :class:`ValidationError` naming the first violated invariant, in
    the order: sizes, weights, preferences, suppression tables, bounds.
    """
    if inst.n < 1:
        raise ValidationError(f"n must be >= 1, got {inst.n}")
    if inst.k < 1:
        raise ValidationError(f"k must be >= 1, got {inst.k}")
    if len(inst.weights) != inst.k:
        raise ValidationError(f"expected {inst.k} weights, got {len(inst.weights)}")
    for j, w in enumerate(inst.weights):
        if w <= 0:
            raise ValidationError(f"campaign {j}: weight must be positive, got {w}")
    if len(inst.preferences) != inst.n:
        raise ValidationError(f"expected {inst.n} preference rows, got {len(inst.preferences)}")
    for i, row in enumerate(inst.preferences):
        if len(row) != inst.k:
            raise ValidationError(f"customer {i}: expected {inst.k} preferences, got {len(row)}")
        for j, p in enumerate(row):
            if p < 0:
                raise ValidationError(f"customer {i}: preference for campaign {j} is negative")
    if len(inst.suppression) != inst.n:
        raise ValidationError(
            f"expected {inst.n} suppression tables, got {len(inst.suppression)}"
        )
    for i, table in enumerate(inst.suppression):
        if len(table) != inst.k + 1:
            raise ValidationError(
                f"customer {i}: suppression table must have {inst.k + 1} entries, "
                f"got {len(table)}"
            )
        if table[0] != 0:
            raise ValidationError(f"customer {i}: r(0) must be 0, got {table[0]}")
        for h, v in enumerate(table.values):
            if not 0 <= v <= 1:
                raise ValidationError(
                    f"customer {i}: suppression value r({h}) = {v} outside [0, 1]"
                )
    if len(inst.lower_bounds) != inst.k or len(inst.upper_bounds) != inst.k:
        raise ValidationError("bound vectors must have one entry per campaign")
    for j in range(inst.k):
        lo, up = inst.lower_bounds[j], inst.upper_bounds[j]
        if lo < 0:
            raise ValidationError(f"campaign {j}: lower bound must be nonnegative, got {lo}")
        if lo > up:
            raise ValidationError(
                f"campaign {j}: lower bound exceeds upper bound ({lo} > {up})"
            )
        if up > inst.n:
            raise ValidationError(
                f"campaign {j}: upper bound exceeds customer count ({up} > {inst.n})"
            )
    return inst


def check_matrix(inst: Instance, matrix: AssignmentMatrix) -> AssignmentMatrix:
    """Validate that ``matrix`` is binary and dimensioned for ``inst``."""
    if matrix.n != inst.n or (matrix.n and matrix.k != inst.k):
        raise ValidationError(
            f"dimension mismatch: instance is {inst.n}x{inst.k}, "
            f"matrix is {matrix.n}x{matrix.k}"
        )
    for i, row in enumerate(matrix.entries):
        for j, m in enumerate(row):
            if m not in (0, 1):
                raise ValidationError(f"matrix entry ({i}, {j}) must be 0 or 1, got {m}")
    return matrix


def recommendation_counts(matrix: AssignmentMatrix) -> tuple[int, ...]:
    """Per-customer recommendation counts ``h_i`` (row sums of the matrix)."""
    return matrix.row_sums()


def evaluate_fitness(inst: Instance, matrix: AssignmentMatrix) -> Fraction:
    """Exact fitness F(M) of the matrix for the instance.

    Runs in O(n * k): each row contributes ``r_i(h_i)`` times the sum of
    ``w[j] * p[i][j]`` over its assigned cells.
    """
    check_matrix(inst, matrix)
    total = Fraction(0)
    weights = inst.weights
    for i, row in enumerate(matrix.entries):
        h = sum(row)
        if h == 0:
            continue
        prefs = inst.preferences[i]
        weighted = 0
        for j, m in enumerate(row):
            if m:
                weighted += weights[j] * prefs[j]
        total += inst.suppression[i][h] * weighted
    return total


def check_feasibility(inst: Instance, matrix: AssignmentMatrix) -> FeasibilityReport:
    """Compare the matrix's column sums against the instance's capacity bounds."""
    check_matrix(inst, matrix)
    sums = matrix.column_sums() if matrix.n else (0,) * inst.k
    violations = []
    for j, s in enumerate(sums):
        if s < inst.lower_bounds[j]:
            violations.append((j, s, "lower"))
        elif s > inst.upper_bounds[j]:
            violations.append((j, s, "upper"))
    return FeasibilityReport(
        feasible=not violations, column_sums=sums, violations=tuple(violations)
    )
