"""Constraint-violation detection and repair for property graphs.

The library detects violations of path-pattern constraints, condenses
them into a conflict hypergraph, solves a minimum-weight vertex cover
(exactly or greedily), and deletes the covered nodes, edges, or labels.
"""

from .automata import RgpcAutomaton, accepting_runs, compile_automaton, essential_tokens
from .conflict import (
    ConflictHypergraph,
    Error,
    WeightFunction,
    compute_weights,
    neighbourhood_error,
    sample_error,
    token_errors,
    topological_error,
)
from .constraints import (
    Constraint,
    emit_error_query,
    load_constraints,
    parse_constraints,
    print_constraint,
    validate_constraint,
)
from .errors import (
    ConfigError,
    GraphError,
    ParseError,
    PgRepairError,
    ResourceCapExceeded,
    SolverTimeout,
    ValidationError,
    WeightError,
)
from .matcher import Match, find_matches, find_violating_matches
from .model import (
    DeletionPlan,
    Direction,
    Path,
    PropertyGraph,
    Value,
    apply_deletions,
    build_graph,
    graph_from_json,
    graph_to_json,
    load_graph,
    save_graph,
    trace,
)
from .pipeline import (
    PipelineConfig,
    RepairReport,
    check_satisfies,
    check_single_object_maximality,
    run_pipeline,
)
from .solvers import (
    Cover,
    FractionalSolution,
    brute_force_min_cover,
    lp_guided_greedy,
    naive_greedy,
    solve_ilp,
    solve_ilp_explicit,
    solve_lp,
)

__version__ = "0.1.0"

__all__ = [
    "Constraint",
    "ConflictHypergraph",
    "ConfigError",
    "Cover",
    "DeletionPlan",
    "Direction",
    "Error",
    "FractionalSolution",
    "GraphError",
    "Match",
    "ParseError",
    "Path",
    "PgRepairError",
    "PipelineConfig",
    "PropertyGraph",
    "RepairReport",
    "ResourceCapExceeded",
    "RgpcAutomaton",
    "SolverTimeout",
    "ValidationError",
    "Value",
    "WeightError",
    "WeightFunction",
    "accepting_runs",
    "apply_deletions",
    "build_graph",
    "brute_force_min_cover",
    "check_satisfies",
    "check_single_object_maximality",
    "compile_automaton",
    "compute_weights",
    "emit_error_query",
    "essential_tokens",
    "find_matches",
    "find_violating_matches",
    "graph_from_json",
    "graph_to_json",
    "load_constraints",
    "load_graph",
    "lp_guided_greedy",
    "naive_greedy",
    "neighbourhood_error",
    "parse_constraints",
    "print_constraint",
    "run_pipeline",
    "sample_error",
    "save_graph",
    "solve_ilp",
    "solve_ilp_explicit",
    "solve_lp",
    "token_errors",
    "topological_error",
    "trace",
    "validate_constraint",
]
