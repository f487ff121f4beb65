"""Exact and heuristic solvers for multicampaign assignment.

Exact routes:

* :func:`brute_force_solve` enumerates every assignment matrix (guarded);
  it exists as an independent oracle for the other solvers.
* :func:`dp_solve` runs dynamic programming over capacity vectors: the state
  after the first ``m`` customers is the vector of column sums, and the layer
  transition tries every campaign subset for customer ``m``.
* :func:`solve_constant_suppression` and :func:`solve_unbounded` handle the
  two polynomially solvable special classes (per-customer constant
  suppression; no capacity constraints) by direct sorting arguments.

Heuristic routes (no optimality guarantee, always feasible):

* :func:`greedy_construct` fills lower bounds first, then keeps adding the
  cell with the best marginal fitness gain while one exists.
* :func:`local_search` improves a feasible start by first-improvement scans
  over single-cell flips and within-column swaps.

Internally the exact solvers score subsets with plain integers: every
suppression value is multiplied by the least common denominator of all table
entries, so candidate fitnesses become exact integers and the inner loops
avoid Fraction arithmetic.  Every returned fitness is recomputed from the
matrix with :func:`mcap.core.evaluate_fitness` and cross-checked against the
solver's internal value.

All solvers are deterministic: every tie-breaking rule is fixed and
documented on the operation.  Fitness equality across solvers is guaranteed;
matrix equality is not, because optima are generically non-unique.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .capacity import CapacityBox
from .core import (
    AssignmentMatrix,
    GuardExceededError,
    InfeasibleError,
    Instance,
    InternalCheckError,
    PreconditionError,
    check_feasibility,
    check_matrix,
    evaluate_fitness,
    validate_instance,
)

DEFAULT_BRUTE_FORCE_CELLS = 24
DEFAULT_DP_STATE_LIMIT = 10_000_000


@dataclass(frozen=True)
class SolveStats:
    elapsed_s: float
    explored: int


@dataclass(frozen=True)
class SolveResult:
    """A feasible assignment with its independently recomputed fitness."""

    matrix: AssignmentMatrix
    fitness: Fraction
    optimal: bool
    stats: SolveStats


def _suppression_scale(inst: Instance) -> int:
    scale = 1
    for table in inst.suppression:
        for v in table.values:
            scale = lcm(scale, v.denominator)
    return scale


def _scaled_rates(inst: Instance, scale: int) -> list[list[int]]:
    # rate[i][h] = r_i(h) * scale, exact by construction of scale
    return [[int(v * scale) for v in t.values] for t in inst.suppression]


def _subset_scores(
    weighted_prefs: list[int], rates: list[int], campaign_of_bit: list[int]
) -> list[int]:
    """Scaled score of every campaign subset for one customer.

    Subsets are bitmasks over ``campaign_of_bit``; entry ``mask`` holds
    ``rate[popcount(mask)] * sum(weighted_prefs[j] for set bits)``.  The sum
    is built with the lowest-bit recurrence so the whole table costs O(2^b).
    """
    nmasks = 1 << len(campaign_of_bit)
    weighted = [0] * nmasks
    scores = [0] * nmasks
    for mask in range(1, nmasks):
        low = mask & -mask
        weighted[mask] = weighted[mask ^ low] + weighted_prefs[campaign_of_bit[low.bit_length() - 1]]
        scores[mask] = rates[mask.bit_count()] * weighted[mask]
    return scores


def _finish(
    inst: Instance,
    rows: list[list[int]],
    optimal: bool,
    started: float,
    explored: int,
    expected_fitness: Fraction | None = None,
) -> SolveResult:
    matrix = AssignmentMatrix.from_rows(rows)
    fitness = evaluate_fitness(inst, matrix)
    if expected_fitness is not None and fitness != expected_fitness:
        raise InternalCheckError(
            f"solver bookkeeping disagrees with evaluation: {expected_fitness} != {fitness}"
        )
    report = check_feasibility(inst, matrix)
    if not report.feasible:
        raise InternalCheckError(f"solver produced an infeasible matrix: {report.violations}")
    return SolveResult(
        matrix=matrix,
        fitness=fitness,
        optimal=optimal,
        stats=SolveStats(elapsed_s=time.perf_counter() - started, explored=explored),
    )


def brute_force_solve(
    inst: Instance, max_cells: int = DEFAULT_BRUTE_FORCE_CELLS
) -> SolveResult:
    """Globally optimal solve by enumerating every binary matrix.

    Guarded by ``n * k <= max_cells`` since the search space is 2^(n*k).
    Among equal-fitness optima the lexicographically smallest matrix wins,
    comparing the row-major concatenation of rows as a bit string.
    """
    validate_instance(inst)
    started = time.perf_counter()
    n, k = inst.n, inst.k
    if n * k > max_cells:
        raise GuardExceededError(
            f"brute force over {n}x{k} cells exceeds the {max_cells}-cell guard"
        )
    scale = _suppression_scale(inst)
    rates = _scaled_rates(inst, scale)
    # bit (k-1-j) holds campaign j, so ascending masks enumerate rows in
    # lexicographic order of their '0'/'1' strings
    campaign_of_bit = [k - 1 - j for j in range(k)]
    weighted = [
        [inst.weights[j] * inst.preferences[i][j] for j in range(k)] for i in range(n)
    ]
    scores = [_subset_scores(weighted[i], rates[i], campaign_of_bit) for i in range(n)]
    bits_of_mask = [
        [(mask >> (k - 1 - j)) & 1 for j in range(k)] for mask in range(1 << k)
    ]
    lower, upper = inst.lower_bounds, inst.upper_bounds

    best_value: int | None = None
    best_masks: list[int] = []
    chosen = [0] * n
    cols = [0] * k
    explored = 0

    def descend(i: int, value: int) -> None:
        nonlocal best_value, best_masks, explored
        remaining = n - i
        for j in range(k):
            if cols[j] + remaining < lower[j]:
                return
        if i == n:
            explored += 1
            if best_value is None or value > best_value:
                best_value = value
                best_masks = chosen[:i]
            return
        row_scores = scores[i]
        for mask in range(1 << k):
            bits = bits_of_mask[mask]
            ok = True
            for j in range(k):
                if bits[j] and cols[j] + 1 > upper[j]:
                    ok = False
                    break
            if not ok:
                continue
            for j in range(k):
                cols[j] += bits[j]
            chosen[i] = mask
            descend(i + 1, value + row_scores[mask])
            for j in range(k):
                cols[j] -= bits[j]

    descend(0, 0)
    if best_value is None:
        raise InternalCheckError("no feasible matrix found; instance invariants broken")
    rows = [list(bits_of_mask[mask]) for mask in best_masks]
    return _finish(inst, rows, True, started, explored, Fraction(best_value, scale))


def dp_solve(inst: Instance, max_states: int = DEFAULT_DP_STATE_LIMIT) -> SolveResult:
    """Globally optimal solve by dynamic programming over capacity vectors.

    ``best[m][c]`` is the maximum fitness over the first ``m`` customers whose
    column sums equal the capacity vector ``c``; unreachable states carry an
    explicit marker, never a sentinel value.  Customer ``m`` transitions by
    every subset of campaigns that still has column headroom, and the answer
    maximizes ``best[n][c]`` over the box ``lower_bounds <= c <= upper_bounds``.
    The chosen subset of every reached state is recorded for reconstruction.

    Ties are broken toward the earliest candidate in scan order (ascending
    predecessor index, then ascending subset mask, then ascending terminal
    index), which makes the result deterministic.
    """
    validate_instance(inst)
    started = time.perf_counter()
    n, k = inst.n, inst.k
    box = CapacityBox.from_caps(inst.upper_bounds)
    if box.size > max_states:
        raise GuardExceededError(
            f"DP needs {box.size} states per layer, over the {max_states} limit"
        )
    scale = _suppression_scale(inst)
    rates = _scaled_rates(inst, scale)

    # campaigns with a zero upper bound can never be assigned; subsets range
    # over the remaining ones only
    active = [j for j in range(k) if inst.upper_bounds[j] > 0]
    nmasks = 1 << len(active)
    deltas = [0] * nmasks
    for mask in range(1, nmasks):
        low = mask & -mask
        deltas[mask] = deltas[mask ^ low] + box.strides[active[low.bit_length() - 1]]

    # bitmask of active campaigns already at capacity, per state
    caps = inst.upper_bounds
    full_mask = [0] * box.size
    vec = [0] * k
    for idx in range(box.size):
        fm = 0
        for b, j in enumerate(active):
            if vec[j] == caps[j]:
                fm |= 1 << b
        full_mask[idx] = fm
        for j in range(k):
            if vec[j] < caps[j]:
                vec[j] += 1
                break
            vec[j] = 0

    masks = list(range(nmasks))
    explored = 0
    layer: list[int | None] = [None] * box.size
    layer[0] = 0
    choices: list[list[int]] = []
    for i in range(n):
        weighted = [inst.weights[j] * inst.preferences[i][j] for j in range(k)]
        scores = _subset_scores(weighted, rates[i], active)
        nxt: list[int | None] = [None] * box.size
        chosen = [0] * box.size
        for idx, value in enumerate(layer):
            if value is None:
                continue
            explored += 1
            fm = full_mask[idx]
            for mask, delta, score in zip(masks, deltas, scores):
                if mask & fm:
                    continue
                tgt = idx + delta
                cand = value + score
                cur = nxt[tgt]
                if cur is None or cand > cur:
                    nxt[tgt] = cand
                    chosen[tgt] = mask
        choices.append(chosen)
        layer = nxt

    best_value: int | None = None
    best_idx = -1
    for idx, _vec in box.iter_range(inst.lower_bounds):
        value = layer[idx]
        if value is not None and (best_value is None or value > best_value):
            best_value = value
            best_idx = idx
    if best_value is None:
        raise InternalCheckError("no terminal capacity vector reachable")

    rows = [[0] * k for _ in range(n)]
    idx = best_idx
    for i in reversed(range(n)):
        mask = choices[i][idx]
        for b, j in enumerate(active):
            if (mask >> b) & 1:
                rows[i][j] = 1
        idx -= deltas[mask]
    if idx != 0:
        raise InternalCheckError("DP reconstruction did not land on the empty state")
    return _finish(inst, rows, True, started, explored, Fraction(best_value, scale))


def solve_constant_suppression(inst: Instance) -> SolveResult:
    """Optimal solve when every customer's suppression is constant above zero.

    With ``r_i(h) = rho_i`` for all ``h >= 1`` the fitness separates into
    independent per-cell terms ``rho_i * w_j * p_ij``, so each campaign just
    takes its ``upper_bounds[j]`` best customers by ``rho_i * p_ij``
    (descending, ties to the smaller customer index).  All terms are
    nonnegative, so filling to the upper bound is optimal and automatically
    covers the lower bound.
    """
    validate_instance(inst)
    started = time.perf_counter()
    for i, table in enumerate(inst.suppression):
        if not table.is_constant_above_zero():
            raise PreconditionError(
                f"customer {i}: suppression is not constant for h >= 1"
            )
    n, k = inst.n, inst.k
    rho = [table[1] for table in inst.suppression]
    rows = [[0] * k for _ in range(n)]
    for j in range(k):
        ranked = sorted(range(n), key=lambda i: (-(rho[i] * inst.preferences[i][j]), i))
        for i in ranked[: inst.upper_bounds[j]]:
            rows[i][j] = 1
    return _finish(inst, rows, True, started, explored=n * k)


def solve_unbounded(inst: Instance) -> SolveResult:
    """Optimal solve when no capacity constraints bind.

    Requires ``lower_bounds = 0`` and ``upper_bounds = n`` everywhere; rows
    are then independent.  Per customer, sort the values ``w_j * p_ij``
    descending (ties to the smaller campaign index), and pick the count
    ``h`` maximizing ``r_i(h) * prefix_sum(h)`` (ties to the smaller ``h``).
    """
    validate_instance(inst)
    started = time.perf_counter()
    n, k = inst.n, inst.k
    if any(b != 0 for b in inst.lower_bounds) or any(b != n for b in inst.upper_bounds):
        raise PreconditionError("instance has nontrivial capacity bounds")
    rows = [[0] * k for _ in range(n)]
    for i in range(n):
        values = sorted(
            ((inst.weights[j] * inst.preferences[i][j], j) for j in range(k)),
            key=lambda vj: (-vj[0], vj[1]),
        )
        table = inst.suppression[i]
        best_gain = Fraction(0)
        best_h = 0
        prefix = 0
        for h in range(1, k + 1):
            prefix += values[h - 1][0]
            gain = table[h] * prefix
            if gain > best_gain:
                best_gain = gain
                best_h = h
        for _, j in values[:best_h]:
            rows[i][j] = 1
    return _finish(inst, rows, True, started, explored=n * k)


def _marginal_gain(inst: Instance, row_value: int, h: int, i: int, j: int) -> Fraction:
    added = inst.weights[j] * inst.preferences[i][j]
    table = inst.suppression[i]
    return table[h + 1] * (row_value + added) - table[h] * row_value


def greedy_construct(inst: Instance) -> SolveResult:
    """Feasible construction: meet lower bounds, then take positive gains.

    Phase 1 repeatedly sets the unassigned cell with the largest marginal
    gain among campaigns still below their lower bound (even when the best
    gain is negative, since those columns must be filled).  Phase 2 continues
    among campaigns below their upper bound while the best gain is strictly
    positive.  Ties break toward the smaller customer index, then the smaller
    campaign index.

    Both phases run on a max-heap of cells keyed by gain.  Setting a cell
    changes the gain of every other cell in its row, so fresh entries are
    pushed for those cells and stale heap entries are dropped when popped
    (each cell's current gain is tracked in a side map).
    """
    validate_instance(inst)
    started = time.perf_counter()
    n, k = inst.n, inst.k
    rows = [[0] * k for _ in range(n)]
    h = [0] * n
    row_value = [0] * n
    cols = [0] * k
    pops = 0

    def fill(limit: tuple[int, ...], positive_only: bool) -> None:
        nonlocal pops
        current: dict[tuple[int, int], Fraction] = {}
        heap: list[tuple[Fraction, int, int]] = []
        for i in range(n):
            for j in range(k):
                if rows[i][j] == 0 and cols[j] < limit[j]:
                    gain = _marginal_gain(inst, row_value[i], h[i], i, j)
                    current[(i, j)] = gain
                    heap.append((-gain, i, j))
        heapq.heapify(heap)
        while heap:
            neg_gain, i, j = heapq.heappop(heap)
            pops += 1
            if rows[i][j] == 1 or cols[j] >= limit[j]:
                continue
            gain = -neg_gain
            if current[(i, j)] != gain:
                continue  # superseded by a fresher entry still in the heap
            if positive_only and gain <= 0:
                break
            rows[i][j] = 1
            cols[j] += 1
            row_value[i] += inst.weights[j] * inst.preferences[i][j]
            h[i] += 1
            for q in range(k):
                if rows[i][q] == 0 and cols[q] < limit[q]:
                    fresh = _marginal_gain(inst, row_value[i], h[i], i, q)
                    current[(i, q)] = fresh
                    heapq.heappush(heap, (-fresh, i, q))

    fill(inst.lower_bounds, positive_only=False)
    fill(inst.upper_bounds, positive_only=True)
    return _finish(inst, rows, False, started, explored=pops)


def local_search(inst: Instance, start: AssignmentMatrix) -> SolveResult:
    """First-improvement local search from a feasible starting matrix.

    Move set: (a) flip one cell in either direction when the column bound
    allows it, (b) move a 1 to another row of the same column (column sum
    unchanged).  Cells are scanned in row-major order; at a set cell the flip
    is tried before the swaps, and swap partners are scanned by ascending row.
    The first move that strictly increases fitness is applied and the scan
    restarts, so the result is a deterministic local optimum; termination is
    guaranteed because fitness strictly increases over a finite lattice.
    """
    validate_instance(inst)
    check_matrix(inst, start)
    report = check_feasibility(inst, start)
    if not report.feasible:
        raise InfeasibleError(f"starting matrix violates bounds: {report.violations}")
    started = time.perf_counter()
    n, k = inst.n, inst.k
    rows = [list(row) for row in start.entries]
    h = [sum(row) for row in rows]
    row_value = [
        sum(inst.weights[j] * inst.preferences[i][j] for j in range(k) if rows[i][j])
        for i in range(n)
    ]
    cols = list(report.column_sums)
    moves_checked = 0

    def add_gain(i: int, j: int) -> Fraction:
        return _marginal_gain(inst, row_value[i], h[i], i, j)

    def remove_gain(i: int, j: int) -> Fraction:
        removed = inst.weights[j] * inst.preferences[i][j]
        table = inst.suppression[i]
        return table[h[i] - 1] * (row_value[i] - removed) - table[h[i]] * row_value[i]

    def apply_add(i: int, j: int) -> None:
        rows[i][j] = 1
        cols[j] += 1
        row_value[i] += inst.weights[j] * inst.preferences[i][j]
        h[i] += 1

    def apply_remove(i: int, j: int) -> None:
        rows[i][j] = 0
        cols[j] -= 1
        row_value[i] -= inst.weights[j] * inst.preferences[i][j]
        h[i] -= 1

    improved = True
    while improved:
        improved = False
        for i in range(n):
            for j in range(k):
                moves_checked += 1
                if rows[i][j] == 0:
                    if cols[j] < inst.upper_bounds[j] and add_gain(i, j) > 0:
                        apply_add(i, j)
                        improved = True
                        break
                else:
                    if cols[j] > inst.lower_bounds[j] and remove_gain(i, j) > 0:
                        apply_remove(i, j)
                        improved = True
                        break
                    out_gain = remove_gain(i, j)
                    for i2 in range(n):
                        if rows[i2][j] == 0:
                            moves_checked += 1
                            if out_gain + add_gain(i2, j) > 0:
                                apply_remove(i, j)
                                apply_add(i2, j)
                                improved = True
                                break
                    if improved:
                        break
            if improved:
                break
    return _finish(inst, rows, False, started, explored=moves_checked)
