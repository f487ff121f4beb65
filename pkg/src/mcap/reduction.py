"""From 3-CNF satisfiability to multicampaign assignment, and back.

Given a 3-CNF formula with ``l`` variables and ``m`` clauses (every clause
three distinct variables, every variable used somewhere), :func:`reduce_3sat`
builds an instance whose optimum answers satisfiability:

* customers, in order: ``u_1, u_1', ..., u_l, u_l'`` for the variables, then
  ``s_1, s_1', s_1'', ..., s_m, s_m', s_m''`` for the clauses (``n = 2l+3m``);
* campaigns, in order: one per clause ``C_1..C_m``, then one per variable
  ``x_1..x_l`` (``k = m + l``);
* every campaign weight is 1; preferences are powers of ten chosen so each
  campaign column owns one decimal digit: column ``C_j`` pays ``10^(j-1)``
  (to ``s_j, s_j', s_j''`` and to the ``u``/``u'`` customers of its three
  literals), column ``x_i`` pays ``10^(m+i-1)`` to ``u_i`` and ``u_i'``;
* suppression tables are indicators: the ``s`` customers respond only at
  ``h = 1``, while ``u_i`` responds only at ``h = alpha_i`` — one variable
  campaign plus every clause containing the literal ``x_i`` (``alpha_i'``
  and ``u_i'`` likewise for ``~x_i``);
* both capacity bound vectors equal ``(4, ..., 4, 1, ..., 1)``, and the
  threshold ``t`` is the base-10 number with exactly those digits
  (clause campaigns least significant).

The formula is satisfiable if and only if some feasible matrix reaches
fitness ``t``, and no feasible matrix can exceed ``t``.
:func:`embed_assignment` turns a satisfying assignment into a matrix with
fitness exactly ``t``; :func:`extract_assignment` inverts the construction,
double-checking the structural facts that make the inversion sound (see
:func:`property_failures`).  :func:`sat_brute_force` is the independent
oracle the equivalence is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (
    AssignmentMatrix,
    GuardExceededError,
    Instance,
    InternalCheckError,
    PreconditionError,
    SuppressionTable,
    ValidationError,
    check_feasibility,
    check_matrix,
    evaluate_fitness,
    recommendation_counts,
    validate_instance,
)

BooleanAssignment = tuple[bool, ...]

DEFAULT_SAT_VARS = 24


@dataclass(frozen=True)
class CnfFormula:
    """A 3-CNF formula; clauses hold signed 1-based variable numbers."""

    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "clauses", tuple(tuple(int(x) for x in cl) for cl in self.clauses)
        )


def validate_formula(formula: CnfFormula) -> CnfFormula:
    """Enforce the input class the reduction is defined on.

    Every clause must mention exactly three distinct variables in range, no
    clause may contain a variable and its negation, and every variable must
    appear in at least one clause.
    """
    if formula.num_vars < 1:
        raise ValidationError(f"formula must have at least one variable, got {formula.num_vars}")
    seen = set()
    for idx, clause in enumerate(formula.clauses, start=1):
        if len(clause) != 3:
            raise ValidationError(f"clause {idx} has {len(clause)} literals, expected 3")
        variables = set()
        for lit in clause:
            v = abs(lit)
            if lit == 0 or v > formula.num_vars:
                raise ValidationError(f"clause {idx}: literal {lit} out of range")
            if -lit in clause:
                raise ValidationError(
                    f"clause {idx} is tautological: contains both {v} and its negation"
                )
            variables.add(v)
        if len(variables) != 3:
            raise ValidationError(f"clause {idx} repeats a variable")
        seen |= variables
    for v in range(1, formula.num_vars + 1):
        if v not in seen:
            raise ValidationError(f"variable {v} appears in no clause")
    return formula


def satisfies(formula: CnfFormula, assignment: Sequence[bool]) -> bool:
    if len(assignment) != formula.num_vars:
        raise ValidationError(
            f"assignment has {len(assignment)} values for {formula.num_vars} variables"
        )
    return all(
        any((lit > 0) == bool(assignment[abs(lit) - 1]) for lit in clause)
        for clause in formula.clauses
    )


def parse_dimacs(text: str, sanitize: bool = False) -> CnfFormula:
    """Parse DIMACS CNF ("p cnf <vars> <clauses>", 0-terminated clauses).

    With ``sanitize=True``, tautological clauses are dropped and variables
    left unused are removed with dense renumbering; everything else (wrong
    literal counts, repeated variables, malformed syntax) is still an error,
    because no faithful repair exists for those.
    """
    header: tuple[int, int] | None = None
    tokens: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise ValidationError("multiple header lines")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise ValidationError(f"malformed header line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise ValidationError(f"malformed header line {line!r}") from exc
            continue
        if header is None:
            raise ValidationError("clause data before the 'p cnf' header")
        for tok in line.split():
            try:
                tokens.append(int(tok))
            except ValueError as exc:
                raise ValidationError(f"bad literal token {tok!r}") from exc
    if header is None:
        raise ValidationError("missing 'p cnf' header")
    num_vars, num_clauses = header
    if num_vars < 1 or num_clauses < 1:
        raise ValidationError("header must declare at least one variable and one clause")

    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for tok in tokens:
        if tok == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(tok)
    if current:
        raise ValidationError("last clause is not 0-terminated")
    if len(clauses) != num_clauses:
        raise ValidationError(
            f"header declares {num_clauses} clauses, found {len(clauses)}"
        )

    if sanitize:
        kept = []
        for clause in clauses:
            if any(-lit in clause for lit in clause):
                continue
            kept.append(clause)
        if not kept:
            raise ValidationError("no clauses remain after dropping tautologies")
        used = sorted({abs(lit) for cl in kept for lit in cl})
        for v in used:
            if v > num_vars:
                raise ValidationError(f"literal {v} out of range")
        renumber = {v: i + 1 for i, v in enumerate(used)}
        clauses = [
            tuple((1 if lit > 0 else -1) * renumber[abs(lit)] for lit in cl) for cl in kept
        ]
        num_vars = len(used)

    formula = CnfFormula(num_vars=num_vars, clauses=tuple(clauses))
    return validate_formula(formula)


def format_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines.extend(" ".join(str(lit) for lit in cl) + " 0" for cl in formula.clauses)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReductionLayout:
    """Who is who in a reduced instance.

    Customer order: ``u_1, u_1', ..., u_l, u_l'`` then ``s_1, s_1', s_1'',
    ...``; campaign order: ``C_1..C_m`` then ``x_1..x_l``.  ``alphas[i-1]``
    is the unique recommendation count at which ``u_i`` responds, and
    ``alphas_prime`` the same for ``u_i'``.
    """

    num_vars: int
    num_clauses: int
    customers: tuple[str, ...]
    campaigns: tuple[str, ...]
    alphas: tuple[int, ...]
    alphas_prime: tuple[int, ...]

    @classmethod
    def build(
        cls, num_vars: int, num_clauses: int, alphas: Sequence[int], alphas_prime: Sequence[int]
    ) -> "ReductionLayout":
        customers = []
        for i in range(1, num_vars + 1):
            customers += [f"u{i}", f"u{i}'"]
        for j in range(1, num_clauses + 1):
            customers += [f"s{j}", f"s{j}'", f"s{j}''"]
        campaigns = [f"C{j}" for j in range(1, num_clauses + 1)]
        campaigns += [f"x{i}" for i in range(1, num_vars + 1)]
        return cls(
            num_vars=num_vars,
            num_clauses=num_clauses,
            customers=tuple(customers),
            campaigns=tuple(campaigns),
            alphas=tuple(int(a) for a in alphas),
            alphas_prime=tuple(int(a) for a in alphas_prime),
        )

    # customer indices (variables and clauses are 1-based, copies 0-based)
    def u_index(self, i: int) -> int:
        return 2 * (i - 1)

    def u_prime_index(self, i: int) -> int:
        return 2 * (i - 1) + 1

    def s_index(self, j: int, copy: int) -> int:
        return 2 * self.num_vars + 3 * (j - 1) + copy

    # campaign indices
    def clause_column(self, j: int) -> int:
        return j - 1

    def variable_column(self, i: int) -> int:
        return self.num_clauses + i - 1


@dataclass(frozen=True)
class ReducedInstance:
    instance: Instance
    layout: ReductionLayout
    threshold: int


def reduce_3sat(formula: CnfFormula) -> ReducedInstance:
    """Build the assignment instance whose optimum decides the formula."""
    validate_formula(formula)
    l, m = formula.num_vars, len(formula.clauses)
    n, k = 2 * l + 3 * m, m + l

    alphas = [1] * l
    alphas_prime = [1] * l
    for clause in formula.clauses:
        for lit in clause:
            if lit > 0:
                alphas[lit - 1] += 1
            else:
                alphas_prime[-lit - 1] += 1
    layout = ReductionLayout.build(l, m, alphas, alphas_prime)

    prefs = [[0] * k for _ in range(n)]
    for i in range(1, l + 1):
        col = layout.variable_column(i)
        prefs[layout.u_index(i)][col] = 10 ** col
        prefs[layout.u_prime_index(i)][col] = 10 ** col
    for j, clause in enumerate(formula.clauses, start=1):
        col = layout.clause_column(j)
        pay = 10 ** col
        for lit in clause:
            if lit > 0:
                prefs[layout.u_index(lit)][col] = pay
            else:
                prefs[layout.u_prime_index(-lit)][col] = pay
        for copy in range(3):
            prefs[layout.s_index(j, copy)][col] = pay

    suppression: list[SuppressionTable] = [SuppressionTable.indicator(1, k)] * n
    for i in range(1, l + 1):
        suppression[layout.u_index(i)] = SuppressionTable.indicator(alphas[i - 1], k)
        suppression[layout.u_prime_index(i)] = SuppressionTable.indicator(
            alphas_prime[i - 1], k
        )

    bounds = (4,) * m + (1,) * l
    threshold = sum(4 * 10 ** (j - 1) for j in range(1, m + 1)) + sum(
        10 ** (m + i - 1) for i in range(1, l + 1)
    )
    inst = validate_instance(
        Instance(
            n=n,
            k=k,
            weights=(1,) * k,
            preferences=tuple(tuple(row) for row in prefs),
            suppression=tuple(suppression),
            lower_bounds=bounds,
            upper_bounds=bounds,
        )
    )
    return ReducedInstance(instance=inst, layout=layout, threshold=threshold)


def recover_formula(red: ReducedInstance) -> CnfFormula:
    """Reconstruct the clause list from a reduced instance's preferences.

    Literal ``x_i`` is in clause ``j`` exactly when ``u_i`` has a positive
    preference in column ``C_j`` (and ``~x_i`` via ``u_i'``).
    """
    layout = red.layout
    prefs = red.instance.preferences
    clauses = []
    for j in range(1, layout.num_clauses + 1):
        col = layout.clause_column(j)
        lits = []
        for i in range(1, layout.num_vars + 1):
            if prefs[layout.u_index(i)][col] > 0:
                lits.append(i)
            if prefs[layout.u_prime_index(i)][col] > 0:
                lits.append(-i)
        clauses.append(tuple(lits))
    return CnfFormula(num_vars=layout.num_vars, clauses=tuple(clauses))


def embed_assignment(red: ReducedInstance, assignment: Sequence[bool]) -> AssignmentMatrix:
    """Matrix with fitness exactly ``threshold`` from a satisfying assignment.

    ``u_i`` (or ``u_i'`` when ``x_i`` is false) takes its variable column and
    every clause column where its literal is true; clause columns are then
    topped up to four recommendations using ``s_j, s_j', s_j''`` in that
    order.
    """
    formula = recover_formula(red)
    assignment = tuple(bool(a) for a in assignment)
    if not satisfies(formula, assignment):
        for j, clause in enumerate(formula.clauses, start=1):
            if not any((lit > 0) == assignment[abs(lit) - 1] for lit in clause):
                raise PreconditionError(
                    f"assignment does not satisfy the formula: clause {j} is false"
                )
    layout = red.layout
    n, k = red.instance.n, red.instance.k
    rows = [[0] * k for _ in range(n)]
    for i in range(1, layout.num_vars + 1):
        customer = layout.u_index(i) if assignment[i - 1] else layout.u_prime_index(i)
        rows[customer][layout.variable_column(i)] = 1
    for j, clause in enumerate(formula.clauses, start=1):
        col = layout.clause_column(j)
        true_literals = 0
        for lit in clause:
            if (lit > 0) == assignment[abs(lit) - 1]:
                customer = (
                    layout.u_index(lit) if lit > 0 else layout.u_prime_index(-lit)
                )
                rows[customer][col] = 1
                true_literals += 1
        for copy in range(4 - true_literals):
            rows[layout.s_index(j, copy)][col] = 1
    return AssignmentMatrix.from_rows(rows)


def property_failures(red: ReducedInstance, matrix: AssignmentMatrix) -> list[str]:
    """Structural facts every feasible threshold-reaching matrix must obey.

    Checked: (1) set cells sit on positive preferences only; (2) every
    recommended customer has suppression value exactly 1 at its row count;
    (3) each row takes either all of its positive-preference cells or none;
    and each variable column recommends exactly one of ``u_i``, ``u_i'``.
    Returns human-readable descriptions of any violations.
    """
    layout = red.layout
    inst = red.instance
    failures = []
    counts = recommendation_counts(matrix)
    for i, row in enumerate(matrix.entries):
        name = layout.customers[i]
        positive = {j for j in range(inst.k) if inst.preferences[i][j] > 0}
        chosen = {j for j in range(inst.k) if row[j] == 1}
        if not chosen <= positive:
            bad = min(chosen - positive)
            failures.append(
                f"{name} is recommended in campaign {layout.campaigns[bad]} "
                "but has zero preference there"
            )
        if chosen and inst.suppression[i][counts[i]] != 1:
            failures.append(
                f"{name} is recommended {counts[i]} time(s) where its "
                "suppression value is not 1"
            )
        if chosen and chosen != positive:
            failures.append(
                f"{name} takes only part of its positive-preference cells"
            )
    for i in range(1, layout.num_vars + 1):
        col = layout.variable_column(i)
        u = matrix.entries[layout.u_index(i)][col]
        up = matrix.entries[layout.u_prime_index(i)][col]
        if u + up != 1:
            failures.append(
                f"column x{i} must recommend exactly one of u{i}, u{i}'"
            )
    return failures


def extract_assignment(red: ReducedInstance, matrix: AssignmentMatrix) -> BooleanAssignment:
    """Read a satisfying assignment off a feasible matrix with fitness >= t.

    ``x_i`` is true exactly when ``u_i`` is recommended in its variable
    column.  The preconditions (feasibility, fitness) are enforced; the
    structural checks of :func:`property_failures` and a final clause-level
    verification are run as internal consistency guards, since the
    construction makes them impossible to fail.
    """
    inst = red.instance
    check_matrix(inst, matrix)
    report = check_feasibility(inst, matrix)
    if not report.feasible:
        raise PreconditionError(
            f"matrix is infeasible for the reduced instance: {report.violations}"
        )
    fitness = evaluate_fitness(inst, matrix)
    if fitness < red.threshold:
        raise PreconditionError(
            f"fitness {fitness} is below the threshold {red.threshold}"
        )
    failures = property_failures(red, matrix)
    if failures:
        raise InternalCheckError(
            "matrix reaches the threshold but breaks reduction structure: "
            + "; ".join(failures)
        )
    layout = red.layout
    assignment = tuple(
        matrix.entries[layout.u_index(i)][layout.variable_column(i)] == 1
        for i in range(1, layout.num_vars + 1)
    )
    if not satisfies(recover_formula(red), assignment):
        raise InternalCheckError("extracted assignment fails the formula")
    return assignment


def sat_brute_force(
    formula: CnfFormula, max_vars: int = DEFAULT_SAT_VARS
) -> BooleanAssignment | None:
    """Lexicographically smallest satisfying assignment, or None.

    Guarded at ``num_vars <= max_vars`` (the search is 2^num_vars).
    """
    validate_formula(formula)
    l = formula.num_vars
    if l > max_vars:
        raise GuardExceededError(f"{l} variables exceed the {max_vars}-variable guard")
    for code in range(1 << l):
        assignment = tuple(bool((code >> (l - 1 - i)) & 1) for i in range(l))
        if satisfies(formula, assignment):
            return assignment
    return None


def sidecar_dict(red: ReducedInstance) -> dict:
    """Companion object for a written reduced instance: threshold + layout."""
    layout = red.layout
    return {
        "threshold": str(red.threshold),
        "num_vars": layout.num_vars,
        "num_clauses": layout.num_clauses,
        "customers": list(layout.customers),
        "campaigns": list(layout.campaigns),
        "alphas": list(layout.alphas),
        "alphas_prime": list(layout.alphas_prime),
    }


def sidecar_from_dict(data: dict) -> tuple[int, ReductionLayout]:
    try:
        threshold = int(str(data["threshold"]))
        layout = ReductionLayout(
            num_vars=int(data["num_vars"]),
            num_clauses=int(data["num_clauses"]),
            customers=tuple(str(c) for c in data["customers"]),
            campaigns=tuple(str(c) for c in data["campaigns"]),
            alphas=tuple(int(a) for a in data["alphas"]),
            alphas_prime=tuple(int(a) for a in data["alphas_prime"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed reduction sidecar: {exc}") from exc
    return threshold, layout
