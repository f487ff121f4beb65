"""Multicampaign assignment: exact/heuristic solvers, a 3-CNF reduction
harness, and learning of response-suppression tables and preferences."""

from .capacity import CapacityBox
from .core import (
    AssignmentMatrix,
    FeasibilityReport,
    GuardExceededError,
    InfeasibleError,
    Instance,
    InternalCheckError,
    McapError,
    PreconditionError,
    Rational,
    SuppressionTable,
    ValidationError,
    check_feasibility,
    check_matrix,
    evaluate_fitness,
    recommendation_counts,
    validate_instance,
)
from .generate import (
    random_feasible_matrix,
    random_formula,
    random_instance,
    random_planted_formula,
)
from .learning import (
    FitResult,
    RatingsMatrix,
    ResponseRecord,
    categorize_customers,
    fit_suppression,
    predict_preferences_cf,
)
from .reduction import (
    BooleanAssignment,
    CnfFormula,
    ReducedInstance,
    ReductionLayout,
    embed_assignment,
    extract_assignment,
    parse_dimacs,
    reduce_3sat,
    sat_brute_force,
    satisfies,
)
from .solvers import (
    SolveResult,
    SolveStats,
    brute_force_solve,
    dp_solve,
    greedy_construct,
    local_search,
    solve_constant_suppression,
    solve_unbounded,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentMatrix",
    "BooleanAssignment",
    "CapacityBox",
    "CnfFormula",
    "FeasibilityReport",
    "FitResult",
    "GuardExceededError",
    "InfeasibleError",
    "Instance",
    "InternalCheckError",
    "McapError",
    "PreconditionError",
    "RatingsMatrix",
    "Rational",
    "ReducedInstance",
    "ReductionLayout",
    "ResponseRecord",
    "SolveResult",
    "SolveStats",
    "SuppressionTable",
    "ValidationError",
    "brute_force_solve",
    "categorize_customers",
    "check_feasibility",
    "check_matrix",
    "dp_solve",
    "embed_assignment",
    "evaluate_fitness",
    "extract_assignment",
    "fit_suppression",
    "greedy_construct",
    "local_search",
    "parse_dimacs",
    "predict_preferences_cf",
    "random_feasible_matrix",
    "random_formula",
    "random_instance",
    "random_planted_formula",
    "recommendation_counts",
    "reduce_3sat",
    "sat_brute_force",
    "satisfies",
    "solve_constant_suppression",
    "solve_unbounded",
    "validate_instance",
]
