"""Seeded random generation of instances, formulas, and feasible matrices.

There is no published benchmark data for this problem, so test corpora are
generated explicitly.  Everything here is a pure function of its seed: two
calls with equal arguments return equal objects, byte-for-byte once written.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .core import (
    AssignmentMatrix,
    Instance,
    SuppressionTable,
    ValidationError,
    validate_instance,
)
from .reduction import BooleanAssignment, CnfFormula, validate_formula

SUPPRESSION_FAMILIES = ("constant", "indicator", "linear", "grid")
BOUND_STYLES = ("random", "unbounded")


def _random_suppression(
    rng: random.Random, family: str, k: int, grid: int
) -> SuppressionTable:
    if family == "constant":
        return SuppressionTable.constant(Fraction(rng.randint(0, grid), grid), k)
    if family == "indicator":
        return SuppressionTable.indicator(rng.randint(1, k), k)
    if family == "linear":
        # full response for one recommendation, decaying linearly to 1/k
        return SuppressionTable(
            (Fraction(0),) + tuple(Fraction(k - h + 1, k) for h in range(1, k + 1))
        )
    if family == "grid":
        return SuppressionTable(
            (Fraction(0),) + tuple(Fraction(rng.randint(0, grid), grid) for _ in range(k))
        )
    raise ValidationError(
        f"unknown suppression family {family!r}; expected one of {SUPPRESSION_FAMILIES}"
    )


def random_instance(
    seed: int,
    n: int,
    k: int,
    pref_max: int = 9,
    weight_max: int = 5,
    family: str = "grid",
    grid: int = 4,
    bounds: str = "random",
) -> Instance:
    """A validated random instance.

    ``bounds="random"`` draws each campaign's pair uniformly from valid
    ``0 <= lower <= upper <= n``; ``bounds="unbounded"`` fixes them to
    ``[0, n]`` (the class :func:`mcap.solvers.solve_unbounded` accepts).
    """
    if bounds not in BOUND_STYLES:
        raise ValidationError(f"unknown bound style {bounds!r}; expected one of {BOUND_STYLES}")
    rng = random.Random(seed)
    weights = tuple(rng.randint(1, weight_max) for _ in range(k))
    prefs = tuple(tuple(rng.randint(0, pref_max) for _ in range(k)) for _ in range(n))
    suppression = tuple(_random_suppression(rng, family, k, grid) for _ in range(n))
    if bounds == "unbounded":
        lower, upper = (0,) * k, (n,) * k
    else:
        pairs = [sorted((rng.randint(0, n), rng.randint(0, n))) for _ in range(k)]
        lower = tuple(p[0] for p in pairs)
        upper = tuple(p[1] for p in pairs)
    return validate_instance(
        Instance(
            n=n,
            k=k,
            weights=weights,
            preferences=prefs,
            suppression=suppression,
            lower_bounds=tuple(lower),
            upper_bounds=tuple(upper),
        )
    )


def _clause_variables(rng: random.Random, num_vars: int, num_clauses: int) -> list[list[int]]:
    """Variable triples covering every variable at least once."""
    if num_vars < 3:
        raise ValidationError(f"need at least 3 variables for 3-literal clauses, got {num_vars}")
    if 3 * num_clauses < num_vars:
        raise ValidationError(
            f"{num_clauses} clauses cannot mention all {num_vars} variables"
        )
    order = list(range(1, num_vars + 1))
    rng.shuffle(order)
    triples = []
    for start in range(0, num_vars, 3):
        chunk = order[start : start + 3]
        while len(chunk) < 3:
            extra = rng.randint(1, num_vars)
            if extra not in chunk:
                chunk.append(extra)
        triples.append(chunk)
    while len(triples) < num_clauses:
        triples.append(rng.sample(range(1, num_vars + 1), 3))
    return triples[:num_clauses]


def random_formula(seed: int, num_vars: int, num_clauses: int) -> CnfFormula:
    """A valid random 3-CNF formula (not necessarily satisfiable)."""
    rng = random.Random(seed)
    triples = _clause_variables(rng, num_vars, num_clauses)
    clauses = tuple(
        tuple(v if rng.random() < 0.5 else -v for v in triple) for triple in triples
    )
    return validate_formula(CnfFormula(num_vars=num_vars, clauses=clauses))


def random_planted_formula(
    seed: int, num_vars: int, num_clauses: int
) -> tuple[CnfFormula, BooleanAssignment]:
    """A random formula together with an assignment planted to satisfy it.

    One literal per clause is signed to agree with the planted assignment;
    the other two are signed at random.
    """
    rng = random.Random(seed)
    planted = tuple(rng.random() < 0.5 for _ in range(num_vars))
    triples = _clause_variables(rng, num_vars, num_clauses)
    clauses = []
    for triple in triples:
        anchor = rng.randrange(3)
        clause = []
        for pos, v in enumerate(triple):
            if pos == anchor:
                clause.append(v if planted[v - 1] else -v)
            else:
                clause.append(v if rng.random() < 0.5 else -v)
        clauses.append(tuple(clause))
    formula = validate_formula(CnfFormula(num_vars=num_vars, clauses=tuple(clauses)))
    return formula, planted


def random_feasible_matrix(seed: int, inst: Instance) -> AssignmentMatrix:
    """A uniform-ish feasible matrix: per campaign, a random in-bounds column.

    Each campaign independently draws a column sum within its bounds and
    assigns that many distinct customers, so feasibility holds by
    construction.
    """
    rng = random.Random(seed)
    rows = [[0] * inst.k for _ in range(inst.n)]
    for j in range(inst.k):
        count = rng.randint(inst.lower_bounds[j], inst.upper_bounds[j])
        for i in rng.sample(range(inst.n), count):
            rows[i][j] = 1
    return AssignmentMatrix.from_rows(rows)


def assignments_of(formula: CnfFormula) -> Sequence[BooleanAssignment]:
    """All 2^l assignments in lexicographic order (for small formulas)."""
    l = formula.num_vars
    return [
        tuple(bool((code >> (l - 1 - i)) & 1) for i in range(l)) for code in range(1 << l)
    ]
