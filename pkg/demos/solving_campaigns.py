"""Walk through solving one small campaign-assignment instance.

Run: python3 demos/solving_campaigns.py
"""

from fractions import Fraction

from mcap import (
    AssignmentMatrix,
    Instance,
    SuppressionTable,
    brute_force_solve,
    check_feasibility,
    dp_solve,
    evaluate_fitness,
    greedy_construct,
    local_search,
)
from mcap.cli import run_bench

# Six customers, three campaigns.  Every customer responds fully to a single
# recommendation; enthusiasm drops as more campaigns pile on (the second
# recommendation keeps 3/4 of the response, the third half, then nothing).
table = SuppressionTable((0, 1, Fraction(3, 4), Fraction(1, 2)))
inst = Instance(
    n=6,
    k=3,
    weights=(3, 2, 1),
    preferences=(
        (9, 1, 0),
        (8, 2, 1),
        (2, 9, 3),
        (1, 8, 4),
        (0, 3, 9),
        (1, 0, 8),
    ),
    suppression=(table,) * 6,
    lower_bounds=(1, 1, 1),
    upper_bounds=(3, 3, 2),
)

print("A hand-built matrix first: recommend everyone their favourite campaign.")
favourite = AssignmentMatrix(
    tuple(
        tuple(1 if p == max(row) else 0 for p in row)
        for row in inst.preferences
    )
)
report = check_feasibility(inst, favourite)
print(f"  column sums {report.column_sums}, feasible: {report.feasible}")
print(f"  fitness {evaluate_fitness(inst, favourite)}")

print()
print("The exact solvers agree with each other (same optimum, found twice):")
exact = dp_solve(inst)
brute = brute_force_solve(inst)
print(f"  dp    -> {exact.fitness}  ({exact.stats.explored} states)")
print(f"  brute -> {brute.fitness}  ({brute.stats.explored} matrices)")
assert exact.fitness == brute.fitness

print()
print("Optimal recommendations (rows = customers, columns = campaigns):")
for i, row in enumerate(exact.matrix.entries):
    chosen = [f"campaign {j}" for j, cell in enumerate(row) if cell]
    print(f"  customer {i}: {', '.join(chosen) or '(none)'}")

print()
print("Heuristics trade exactness for scale; both stay feasible:")
greedy = greedy_construct(inst)
polished = local_search(inst, greedy.matrix)
print(f"  greedy        -> {greedy.fitness}")
print(f"  greedy+local  -> {polished.fitness}")
print(f"  exact optimum -> {exact.fitness}")

print()
print("The bench command renders the same comparison as one table:")
for row in run_bench(inst):
    if "skipped" in row:
        print(f"  {row['method']:<10} skipped ({row['skipped']})")
    else:
        print(
            f"  {row['method']:<10} fitness {row['fitness']:>8}"
            f"  optimal={row['optimal']}  gap={row['gap']}"
        )
