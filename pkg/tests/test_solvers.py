from fractions import Fraction
from itertools import product

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from mcap.core import (
    AssignmentMatrix,
    GuardExceededError,
    InfeasibleError,
    Instance,
    PreconditionError,
    SuppressionTable,
    check_feasibility,
    evaluate_fitness,
)
from mcap.solvers import (
    brute_force_solve,
    dp_solve,
    greedy_construct,
    local_search,
    solve_constant_suppression,
    solve_unbounded,
)
from strategies import feasible_pairs, instances


def single_customer_instance(lower=(0, 0)):
    return Instance(
        n=1, k=2, weights=(2, 3), preferences=((5, 7),),
        suppression=(SuppressionTable((0, 1, Fraction(1, 2))),),
        lower_bounds=lower, upper_bounds=(1, 1),
    )


def oracle_enumerate(inst):
    """Reference optimum by direct enumeration over all binary matrices."""
    best = None
    for cells in product((0, 1), repeat=inst.n * inst.k):
        rows = tuple(
            cells[i * inst.k : (i + 1) * inst.k] for i in range(inst.n)
        )
        matrix = AssignmentMatrix(rows)
        if not check_feasibility(inst, matrix).feasible:
            continue
        fitness = evaluate_fitness(inst, matrix)
        if best is None or fitness > best:
            best = fitness
    return best


class TestBruteForce:
    def test_single_customer_prefers_one_campaign(self):
        result = brute_force_solve(single_customer_instance())
        assert result.matrix.entries == ((0, 1),)
        assert result.fitness == 21
        assert result.optimal

    def test_forced_bounds_take_both(self):
        result = brute_force_solve(single_customer_instance(lower=(1, 1)))
        assert result.matrix.entries == ((1, 1),)
        assert result.fitness == Fraction(31, 2)

    def test_zero_preferences_lexicographically_smallest(self):
        inst = Instance(
            n=2, k=1, weights=(1,), preferences=((0,), (0,)),
            suppression=(SuppressionTable((0, 1)),) * 2,
            lower_bounds=(1,), upper_bounds=(1,),
        )
        result = brute_force_solve(inst)
        assert result.fitness == 0
        # "01" < "10" in row-major bit order
        assert result.matrix.entries == ((0,), (1,))

    def test_tie_broken_toward_smaller_rows_last(self):
        inst = Instance(
            n=2, k=1, weights=(1,), preferences=((5,), (5,)),
            suppression=(SuppressionTable((0, 1)),) * 2,
            lower_bounds=(0,), upper_bounds=(1,),
        )
        assert brute_force_solve(inst).matrix.entries == ((0,), (1,))

    def test_guard(self):
        inst = single_customer_instance()
        with pytest.raises(GuardExceededError):
            brute_force_solve(inst, max_cells=1)


class TestDpSolve:
    def test_matches_hand_examples(self):
        assert dp_solve(single_customer_instance()).fitness == 21
        assert dp_solve(single_customer_instance(lower=(1, 1))).fitness == Fraction(31, 2)

    def test_picks_best_pair_of_three(self):
        inst = Instance(
            n=3, k=1, weights=(1,), preferences=((4,), (6,), (5,)),
            suppression=(SuppressionTable((0, 1)),) * 3,
            lower_bounds=(2,), upper_bounds=(2,),
        )
        result = dp_solve(inst)
        assert result.fitness == 11
        assert result.matrix.entries == ((0,), (1,), (1,))

    def test_state_guard(self):
        inst = single_customer_instance()
        with pytest.raises(GuardExceededError):
            dp_solve(inst, max_states=3)

    def test_deterministic(self):
        inst = Instance(
            n=3, k=2, weights=(1, 1), preferences=((5, 5), (5, 5), (5, 5)),
            suppression=(SuppressionTable((0, 1, 1)),) * 3,
            lower_bounds=(0, 0), upper_bounds=(2, 2),
        )
        assert dp_solve(inst).matrix == dp_solve(inst).matrix


class TestConstantSuppression:
    def test_top_customers_per_campaign(self):
        inst = Instance(
            n=3, k=1, weights=(1,), preferences=((4,), (6,), (5,)),
            suppression=(
                SuppressionTable.constant(1, 1),
                SuppressionTable.constant(Fraction(1, 2), 1),
                SuppressionTable.constant(1, 1),
            ),
            lower_bounds=(1,), upper_bounds=(2,),
        )
        result = solve_constant_suppression(inst)
        assert result.fitness == 9
        assert result.matrix.entries == ((1,), (0,), (1,))

    def test_all_zero_rho(self):
        inst = Instance(
            n=2, k=1, weights=(1,), preferences=((4,), (6,)),
            suppression=(SuppressionTable.constant(0, 1),) * 2,
            lower_bounds=(0,), upper_bounds=(2,),
        )
        result = solve_constant_suppression(inst)
        assert result.fitness == 0
        assert result.matrix.column_sums() == (2,)

    def test_rejects_non_constant_table(self):
        inst = single_customer_instance()
        with pytest.raises(PreconditionError, match="not constant"):
            solve_constant_suppression(inst)


class TestUnbounded:
    def test_single_customer(self):
        inst = Instance(
            n=1, k=2, weights=(2, 3), preferences=((5, 7),),
            suppression=(SuppressionTable((0, 1, Fraction(1, 2))),),
            lower_bounds=(0, 0), upper_bounds=(1, 1),
        )
        result = solve_unbounded(inst)
        # candidates: h=0 -> 0, h=1 -> 21, h=2 -> 31/2
        assert result.matrix.entries == ((0, 1),)
        assert result.fitness == 21

    def test_zero_preferences(self):
        inst = Instance(
            n=2, k=2, weights=(1, 1), preferences=((0, 0), (0, 0)),
            suppression=(SuppressionTable((0, 1, 1)),) * 2,
            lower_bounds=(0, 0), upper_bounds=(2, 2),
        )
        result = solve_unbounded(inst)
        assert result.fitness == 0
        assert result.matrix == AssignmentMatrix.zero(2, 2)

    def test_rejects_nontrivial_bounds(self):
        inst = single_customer_instance(lower=(1, 1))
        with pytest.raises(PreconditionError, match="bounds"):
            solve_unbounded(inst)


class TestGreedy:
    def test_forced_instance(self):
        result = greedy_construct(single_customer_instance(lower=(1, 1)))
        assert result.matrix.entries == ((1, 1),)
        assert result.fitness == Fraction(31, 2)
        assert not result.optimal

    def test_zero_preferences_stay_empty(self):
        inst = Instance(
            n=2, k=2, weights=(1, 1), preferences=((0, 0), (0, 0)),
            suppression=(SuppressionTable((0, 1, 1)),) * 2,
            lower_bounds=(0, 0), upper_bounds=(2, 2),
        )
        assert greedy_construct(inst).matrix == AssignmentMatrix.zero(2, 2)

    def test_respects_bound_of_21(self):
        result = greedy_construct(single_customer_instance())
        assert check_feasibility(single_customer_instance(), result.matrix).feasible
        assert result.fitness <= 21


class TestLocalSearch:
    def test_fixed_point_at_optimum(self):
        inst = single_customer_instance()
        optimum = brute_force_solve(inst).matrix
        result = local_search(inst, optimum)
        assert result.fitness == 21

    def test_climbs_from_zero(self):
        inst = single_customer_instance()
        result = local_search(inst, AssignmentMatrix.zero(1, 2))
        assert result.fitness == 21

    def test_rejects_infeasible_start(self):
        inst = single_customer_instance(lower=(1, 1))
        with pytest.raises(InfeasibleError):
            local_search(inst, AssignmentMatrix.zero(1, 2))


@given(instances())
@settings(max_examples=100, deadline=None)
def test_dp_equals_brute_force(inst):
    assert dp_solve(inst).fitness == brute_force_solve(inst).fitness


@given(instances(max_n=3, max_k=2))
@settings(max_examples=30, deadline=None)
def test_exact_solvers_match_direct_enumeration(inst):
    expected = oracle_enumerate(inst)
    assert brute_force_solve(inst).fitness == expected
    assert dp_solve(inst).fitness == expected


@given(instances(max_n=5, families=("constant",)))
@settings(max_examples=60, deadline=None)
def test_constant_suppression_matches_dp(inst):
    assert solve_constant_suppression(inst).fitness == dp_solve(inst).fitness


@given(instances(bounds="unbounded"))
@settings(max_examples=60, deadline=None)
def test_unbounded_matches_brute_force(inst):
    assert solve_unbounded(inst).fitness == brute_force_solve(inst).fitness


@given(feasible_pairs())
@settings(max_examples=60, deadline=None)
def test_heuristics_feasible_and_dominated(pair):
    inst, start = pair
    exact = dp_solve(inst).fitness
    greedy = greedy_construct(inst)
    assert check_feasibility(inst, greedy.matrix).feasible
    assert greedy.fitness <= exact
    improved = local_search(inst, start)
    assert check_feasibility(inst, improved.matrix).feasible
    assert evaluate_fitness(inst, start) <= improved.fitness <= exact


@given(instances(), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_fitness_invariant_under_customer_permutation(inst, rng):
    order = list(range(inst.n))
    rng.shuffle(order)
    permuted = Instance(
        n=inst.n, k=inst.k, weights=inst.weights,
        preferences=tuple(inst.preferences[i] for i in order),
        suppression=tuple(inst.suppression[i] for i in order),
        lower_bounds=inst.lower_bounds, upper_bounds=inst.upper_bounds,
    )
    original = dp_solve(inst)
    assert dp_solve(permuted).fitness == original.fitness
    # the permuted optimal matrix stays feasible and keeps its fitness
    carried = AssignmentMatrix(tuple(original.matrix.entries[i] for i in order))
    assert check_feasibility(permuted, carried).feasible
    assert evaluate_fitness(permuted, carried) == original.fitness


@given(instances())
@settings(max_examples=40, deadline=None)
def test_solver_outputs_are_feasible_with_recomputed_fitness(inst):
    for result in (brute_force_solve(inst), dp_solve(inst), greedy_construct(inst)):
        assert check_feasibility(inst, result.matrix).feasible
        assert evaluate_fitness(inst, result.matrix) == result.fitness
        assert result.stats.elapsed_s >= 0
