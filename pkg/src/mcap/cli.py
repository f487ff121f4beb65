"""Command-line interface: evaluate, solve, reduce, embed, extract, verify,
gen, fit, bench.

Reports print as human-readable text (default) or as a single JSON object
(``--format json``); exact rationals travel as ``"num/den"`` strings either
way.  Exit codes: 0 success, 1 failed verification or unsupported input
class, 2 parse/input error, 3 infeasible, 4 size guard exceeded.  Every
error in JSON mode is an object ``{"error": {"type", "message"}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import prod

from . import io, learning, reduction, solvers
from .core import (
    GuardExceededError,
    InfeasibleError,
    Instance,
    McapError,
    PreconditionError,
    ValidationError,
    check_feasibility,
    evaluate_fitness,
    validate_instance,
)
from .generate import random_instance
from .reduction import ReducedInstance

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_GUARD = 4

METHODS = ("brute", "dp", "const", "unbounded", "greedy", "local", "auto")


def _read_instance(path: str) -> Instance:
    return validate_instance(io.read_instance(path))


def _read_reduced(instance_path: str, sidecar_path: str) -> ReducedInstance:
    inst = _read_instance(instance_path)
    threshold, layout = reduction.sidecar_from_dict(io.load_json(sidecar_path))
    if len(layout.customers) != inst.n or len(layout.campaigns) != inst.k:
        raise ValidationError(
            "sidecar layout does not match the instance dimensions"
        )
    return ReducedInstance(instance=inst, layout=layout, threshold=threshold)


def _result_report(result: solvers.SolveResult, method: str) -> dict:
    return {
        "method": method,
        "fitness": str(result.fitness),
        "optimal": result.optimal,
        "rows": io.matrix_to_dict(result.matrix)["rows"],
        "elapsed_s": round(result.stats.elapsed_s, 6),
        "explored": result.stats.explored,
    }


def _solve_with(method: str, inst: Instance, args) -> tuple[str, solvers.SolveResult]:
    if method == "auto":
        states = prod(b + 1 for b in inst.upper_bounds)
        if states <= args.max_states:
            method = "dp"
        else:
            started = solvers.greedy_construct(inst)
            return "greedy+local", solvers.local_search(inst, started.matrix)
    if method == "brute":
        return method, solvers.brute_force_solve(inst, max_cells=args.max_cells)
    if method == "dp":
        return method, solvers.dp_solve(inst, max_states=args.max_states)
    if method == "const":
        return method, solvers.solve_constant_suppression(inst)
    if method == "unbounded":
        return method, solvers.solve_unbounded(inst)
    if method == "greedy":
        return method, solvers.greedy_construct(inst)
    if method == "local":
        if getattr(args, "start", None):
            start = io.read_matrix(args.start)
        else:
            start = solvers.greedy_construct(inst).matrix
        return method, solvers.local_search(inst, start)
    raise ValidationError(f"unknown method {method!r}")


def cmd_evaluate(args) -> dict:
    inst = _read_instance(args.instance)
    matrix = io.read_matrix(args.matrix)
    fitness = evaluate_fitness(inst, matrix)
    report = check_feasibility(inst, matrix)
    return {
        "fitness": str(fitness),
        "feasible": report.feasible,
        "column_sums": list(report.column_sums),
        "violations": [
            {"campaign": j, "sum": s, "side": side} for j, s, side in report.violations
        ],
    }


def cmd_solve(args) -> dict:
    inst = _read_instance(args.instance)
    method, result = _solve_with(args.method, inst, args)
    if args.out:
        io.write_matrix(result.matrix, args.out)
    report = _result_report(result, method)
    if args.out:
        report["out"] = args.out
    return report


def cmd_reduce(args) -> dict:
    with open(args.cnf, "r") as fh:
        formula = reduction.parse_dimacs(fh.read(), sanitize=args.sanitize)
    red = reduction.reduce_3sat(formula)
    io.write_instance(red.instance, args.out_instance)
    io.dump_json(reduction.sidecar_dict(red), args.out_sidecar)
    return {
        "num_vars": formula.num_vars,
        "num_clauses": len(formula.clauses),
        "n": red.instance.n,
        "k": red.instance.k,
        "threshold": str(red.threshold),
        "out_instance": args.out_instance,
        "out_sidecar": args.out_sidecar,
    }


def _parse_assignment(text: str, num_vars: int) -> tuple[bool, ...]:
    bits = text.strip()
    if len(bits) != num_vars or any(c not in "01" for c in bits):
        raise ValidationError(
            f"assignment must be {num_vars} characters of '0'/'1', got {text!r}"
        )
    return tuple(c == "1" for c in bits)


def cmd_embed(args) -> dict:
    red = _read_reduced(args.instance, args.sidecar)
    assignment = _parse_assignment(args.assignment, red.layout.num_vars)
    matrix = reduction.embed_assignment(red, assignment)
    io.write_matrix(matrix, args.out)
    fitness = evaluate_fitness(red.instance, matrix)
    return {
        "assignment": args.assignment.strip(),
        "fitness": str(fitness),
        "threshold": str(red.threshold),
        "meets_threshold": fitness >= red.threshold,
        "out": args.out,
    }


def cmd_extract(args) -> dict:
    red = _read_reduced(args.instance, args.sidecar)
    matrix = io.read_matrix(args.matrix)
    assignment = reduction.extract_assignment(red, matrix)
    return {
        "assignment": "".join("1" if a else "0" for a in assignment),
        "fitness": str(evaluate_fitness(red.instance, matrix)),
        "threshold": str(red.threshold),
    }


def cmd_verify(args) -> dict:
    red = _read_reduced(args.instance, args.sidecar)
    matrix = io.read_matrix(args.matrix)
    feas = check_feasibility(red.instance, matrix)
    fitness = evaluate_fitness(red.instance, matrix)
    failures = reduction.property_failures(red, matrix) if feas.feasible else []
    verified = feas.feasible and fitness >= red.threshold and not failures
    report = {
        "feasible": feas.feasible,
        "fitness": str(fitness),
        "threshold": str(red.threshold),
        "meets_threshold": fitness >= red.threshold,
        "property_failures": failures,
        "verified": verified,
    }
    if not feas.feasible:
        report["violations"] = [
            {"campaign": j, "sum": s, "side": side} for j, s, side in feas.violations
        ]
    return report


def cmd_gen(args) -> dict:
    inst = random_instance(
        seed=args.seed,
        n=args.n,
        k=args.k,
        pref_max=args.pref_max,
        weight_max=args.weight_max,
        family=args.family,
        grid=args.grid,
        bounds=args.bounds,
    )
    if args.out:
        io.write_instance(inst, args.out)
        return {"out": args.out, "n": inst.n, "k": inst.k, "seed": args.seed}
    return io.instance_to_dict(inst)


def cmd_fit(args) -> dict:
    records = learning.records_from_json(io.load_json(args.records))
    labels = None
    if args.labels:
        raw = io.load_json(args.labels)
        if not isinstance(raw, dict):
            raise ValidationError("labels file must be a JSON object customer -> label")
        labels = {key: int(value) for key, value in raw.items()}
    results = learning.fit_categories(
        records,
        labels,
        max_h=args.max_h,
        grid=args.grid,
        restarts=args.restarts,
        seed=args.seed,
        monotone=args.monotone,
    )
    report = {
        "categories": [
            {
                "label": label,
                "table": [str(v) for v in fit.table.values],
                "satisfied": fit.satisfied,
                "total": fit.total,
            }
            for label, fit in results.items()
        ]
    }
    if args.out:
        io.dump_json(report, args.out)
        report["out"] = args.out
    return report


def run_bench(
    inst: Instance,
    max_cells: int = solvers.DEFAULT_BRUTE_FORCE_CELLS,
    max_states: int = solvers.DEFAULT_DP_STATE_LIMIT,
) -> list[dict]:
    """Run every applicable solver on the instance; one row per solver.

    Exact methods are skipped (with a reason) when their guard or
    precondition fails; the gap column is relative to the best exact fitness
    when one exists.
    """
    rows: list[dict] = []
    results: dict[str, solvers.SolveResult] = {}

    def attempt(method: str, call) -> None:
        try:
            results[method] = call()
        except (GuardExceededError, PreconditionError) as exc:
            rows.append({"method": method, "skipped": str(exc)})

    attempt("brute", lambda: solvers.brute_force_solve(inst, max_cells=max_cells))
    attempt("dp", lambda: solvers.dp_solve(inst, max_states=max_states))
    attempt("const", lambda: solvers.solve_constant_suppression(inst))
    attempt("unbounded", lambda: solvers.solve_unbounded(inst))
    attempt("greedy", lambda: solvers.greedy_construct(inst))
    if "greedy" in results:
        attempt("local", lambda: solvers.local_search(inst, results["greedy"].matrix))

    exact = [r.fitness for r in results.values() if r.optimal]
    best = max(exact) if exact else None
    for method in ("brute", "dp", "const", "unbounded", "greedy", "local"):
        result = results.get(method)
        if result is None:
            continue
        gap = None
        if best is not None and best > 0:
            gap = str((best - result.fitness) / best)
        elif best is not None:
            gap = "0"
        rows.append(
            {
                "method": method,
                "fitness": str(result.fitness),
                "optimal": result.optimal,
                "gap": gap,
                "elapsed_s": round(result.stats.elapsed_s, 6),
                "explored": result.stats.explored,
            }
        )
    return rows


def cmd_bench(args) -> dict:
    inst = _read_instance(args.instance)
    return {"rows": run_bench(inst, max_cells=args.max_cells, max_states=args.max_states)}


def _render_human(command: str, report: dict) -> str:
    if command == "bench":
        lines = [f"{'method':<10} {'fitness':>16} {'optimal':>8} {'gap':>12} {'time_s':>10} {'explored':>10}"]
        for row in report["rows"]:
            if "skipped" in row:
                lines.append(f"{row['method']:<10} skipped: {row['skipped']}")
            else:
                lines.append(
                    f"{row['method']:<10} {row['fitness']:>16} {str(row['optimal']):>8} "
                    f"{str(row['gap']):>12} {row['elapsed_s']:>10} {row['explored']:>10}"
                )
        return "\n".join(lines)
    if command == "solve":
        lines = [
            f"method: {report['method']}",
            f"fitness: {report['fitness']}",
            f"optimal: {report['optimal']}",
            f"elapsed_s: {report['elapsed_s']}",
            f"explored: {report['explored']}",
        ]
        lines.extend(f"  {row}" for row in report["rows"])
        return "\n".join(lines)
    return "\n".join(f"{key}: {value}" for key, value in report.items())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcap",
        description="Multicampaign assignment: solve instances, run the 3-CNF "
        "reduction, and fit suppression tables from history.",
    )
    parser.add_argument("--format", choices=("human", "json"), default="human")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="fitness and feasibility of a matrix")
    p.add_argument("--instance", required=True)
    p.add_argument("--matrix", required=True)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--out", help="write the matrix here")
    p.add_argument("--start", help="starting matrix for --method local")
    p.add_argument("--max-cells", type=int, default=solvers.DEFAULT_BRUTE_FORCE_CELLS)
    p.add_argument("--max-states", type=int, default=solvers.DEFAULT_DP_STATE_LIMIT)

    p = sub.add_parser("reduce", help="3-CNF (DIMACS) to instance + sidecar")
    p.add_argument("--cnf", required=True)
    p.add_argument("--out-instance", required=True)
    p.add_argument("--out-sidecar", required=True)
    p.add_argument("--sanitize", action="store_true",
                   help="drop tautological clauses, renumber unused variables")

    p = sub.add_parser("embed", help="satisfying assignment to threshold matrix")
    p.add_argument("--instance", required=True)
    p.add_argument("--sidecar", required=True)
    p.add_argument("--assignment", required=True, help="bit string, one char per variable")
    p.add_argument("--out", required=True)

    p = sub.add_parser("extract", help="threshold matrix to satisfying assignment")
    p.add_argument("--instance", required=True)
    p.add_argument("--sidecar", required=True)
    p.add_argument("--matrix", required=True)

    p = sub.add_parser("verify", help="check a matrix against the reduction contract")
    p.add_argument("--instance", required=True)
    p.add_argument("--sidecar", required=True)
    p.add_argument("--matrix", required=True)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pref-max", type=int, default=9)
    p.add_argument("--weight-max", type=int, default=5)
    p.add_argument("--family", choices=("constant", "indicator", "linear", "grid"),
                   default="grid")
    p.add_argument("--grid", type=int, default=4)
    p.add_argument("--bounds", choices=("random", "unbounded"), default="random")
    p.add_argument("--out")

    p = sub.add_parser("fit", help="fit suppression tables from response history")
    p.add_argument("--records", required=True)
    p.add_argument("--labels", help="JSON object mapping customer id to category label")
    p.add_argument("--max-h", type=int, required=True)
    p.add_argument("--grid", type=int, default=learning.DEFAULT_GRID)
    p.add_argument("--restarts", type=int, default=learning.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--monotone", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("bench", help="run all applicable solvers, print a table")
    p.add_argument("--instance", required=True)
    p.add_argument("--max-cells", type=int, default=solvers.DEFAULT_BRUTE_FORCE_CELLS)
    p.add_argument("--max-states", type=int, default=solvers.DEFAULT_DP_STATE_LIMIT)

    return parser


COMMANDS = {
    "evaluate": cmd_evaluate,
    "solve": cmd_solve,
    "reduce": cmd_reduce,
    "embed": cmd_embed,
    "extract": cmd_extract,
    "verify": cmd_verify,
    "gen": cmd_gen,
    "fit": cmd_fit,
    "bench": cmd_bench,
}

_EXIT_CODES = (
    (ValidationError, EXIT_PARSE),
    (InfeasibleError, EXIT_INFEASIBLE),
    (GuardExceededError, EXIT_GUARD),
    (PreconditionError, EXIT_FAILURE),
    (McapError, EXIT_FAILURE),
    (OSError, EXIT_PARSE),
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except tuple(exc for exc, _ in _EXIT_CODES) as exc:
        code = next(code for klass, code in _EXIT_CODES if isinstance(exc, klass))
        if args.format == "json":
            print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return code
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(_render_human(args.command, report))
    if args.command == "verify" and not report["verified"]:
        return EXIT_INFEASIBLE if not report["feasible"] else EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
