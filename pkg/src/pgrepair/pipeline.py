"""Repair pipeline: detect violations, build the conflict hypergraph,
solve a vertex cover, apply deletions, verify.

The six steps run once for positive constraints.  In label mode with a
constraint that uses negation, deleting labels can create new matches, so
detection and repair iterate to a fixpoint; termination is guaranteed
because every iteration strictly deletes and objects are finite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .conflict import (
    ConflictHypergraph,
    compute_weights,
    neighbourhood_error,
    sample_error,
    token_errors,
    topological_error,
)
from .constraints import is_positive, print_constraint
from .errors import ConfigError
from .matcher import (
    DEFAULT_MAX_MATCHES,
    DEFAULT_MAX_PATH_LENGTH,
    find_violating_matches,
)
from .model import DeletionPlan, PropertyGraph, apply_deletions
from .solvers import (
    DEFAULT_NODE_BUDGET,
    lp_guided_greedy,
    naive_greedy,
    solve_ilp,
)

SOLVERS = ("ilp", "greedy", "lp-greedy")
MAXIMALITY_OBJECT_CAP = 1000
EXHAUSTIVE_DELETION_CAP = 12


@dataclass(frozen=True)
class PipelineConfig:
    label_mode: bool = False
    neighbourhood_k: Optional[int] = None
    sample_k: Optional[int] = None
    solver: str = "ilp"
    approximate: bool = False
    custom_weight_key: Optional[str] = None
    now: Optional[datetime] = None
    seed: int = 0
    max_matches: int = DEFAULT_MAX_MATCHES
    max_path_length: int = DEFAULT_MAX_PATH_LENGTH
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.neighbourhood_k is not None and self.sample_k is not None:
            raise ConfigError("neighbourhood and sampling are mutually exclusive")
        if self.neighbourhood_k is not None and self.neighbourhood_k < 1:
            raise ConfigError("neighbourhood radius must be >= 1")
        if self.sample_k is not None and self.sample_k < 1:
            raise ConfigError("sample size parameter must be >= 1")
        if self.label_mode and self.custom_weight_key:
            raise ConfigError("label mode excludes custom weights")

    @property
    def weight_mode(self) -> str:
        if self.label_mode:
            return "label"
        if self.custom_weight_key:
            return "custom"
        return "topological"

    @property
    def is_approximating(self) -> bool:
        return (
            self.approximate
            or self.neighbourhood_k is not None
            or self.sample_k is not None
        )

    def resolved_now(self) -> datetime:
        if self.now is not None:
            return self.now
        return datetime.now(timezone.utc)


@dataclass
class RepairReport:
    error_counts: list  # per constraint, summed over iterations
    deletions: DeletionPlan
    total_weight: Fraction
    solver_status: str
    satisfied: bool
    single_object_maximal: Optional[bool]
    iterations: int
    timings: dict = field(default_factory=dict)
    hypergraphs: list = field(default_factory=list, repr=False)  # per iteration

    def to_json(self, constraints=None, include_timings=False) -> dict:
        weight = self.total_weight
        out = {
            "constraints": [
                {
                    "index": i,
                    "text": None if constraints is None else print_constraint(c),
                    "error_count": count,
                }
                for i, (c, count) in enumerate(
                    zip(
                        constraints or [None] * len(self.error_counts),
                        self.error_counts,
                    )
                )
            ],
            "deletions": {
                "nodes": sorted(self.deletions.node_deletions),
                "edges": sorted(self.deletions.edge_deletions),
                "labels": [
                    list(t) for t in sorted(self.deletions.label_deletions)
                ],
            },
            "total_weight": int(weight) if weight.denominator == 1 else float(weight),
            "solver_status": self.solver_status,
            "iterations": self.iterations,
            "verification": {
                "satisfied": self.satisfied,
                "single_object_maximal": self.single_object_maximal,
            },
        }
        if include_timings:
            out["timings"] = self.timings
        return out


def check_satisfies(graph, constraints, now, max_matches=DEFAULT_MAX_MATCHES,
                    max_path_length=DEFAULT_MAX_PATH_LENGTH) -> bool:
    """True iff no constraint has a violating match in `graph`."""
    return not any(
        find_violating_matches(graph, c, now, max_matches, max_path_length)
        for c in constraints
    )


def _restrict_error(error, allowed):
    kept = frozenset(
        v for v in error.objects if isinstance(v, tuple) or v in allowed
    )
    return replace(error, objects=kept)


def _match_errors(graph, constraint, match, config, seed_suffix):
    if config.label_mode:
        errors = token_errors(graph, constraint, match)
    else:
        errors = [topological_error(match)]
    if config.neighbourhood_k is not None:
        allowed = neighbourhood_error(match, config.neighbourhood_k).objects
        errors = [_restrict_error(e, allowed) for e in errors]
    elif config.sample_k is not None:
        allowed = sample_error(
            match, config.sample_k, f"{config.seed}:{seed_suffix}"
        ).objects
        errors = [_restrict_error(e, allowed) for e in errors]
    return errors


def _solve(hypergraph, weights, config):
    if config.solver == "ilp":
        cover = solve_ilp(hypergraph, weights, config.node_budget)
        status = "optimal"
    elif config.solver == "greedy":
        cover = naive_greedy(hypergraph, weights, config.approximate)
        status = "minimal" if cover.minimal else "approximate"
    else:
        cover = lp_guided_greedy(hypergraph, weights, config.approximate)
        status = "minimal" if cover.minimal else "approximate"
    if config.neighbourhood_k is not None or config.sample_k is not None:
        status = "approximate"
    return cover, status


def _cover_to_plan(cover, graph) -> DeletionPlan:
    nodes, edges, labels = set(), set(), set()
    for vertex in cover.vertices:
        if isinstance(vertex, tuple):
            labels.add(vertex)
        elif vertex in graph.nodes:
            nodes.add(vertex)
        else:
            edges.add(vertex)
    return DeletionPlan(frozenset(nodes), frozenset(edges), frozenset(labels))


def run_pipeline(graph: PropertyGraph, constraints, config: PipelineConfig):
    """Run detection and repair; returns (repaired graph, report)."""
    now = config.resolved_now()
    timings = {}
    started = time.perf_counter()

    original = graph
    error_counts = [0] * len(constraints)
    total_plan = DeletionPlan()
    total_weight = Fraction(0)
    status = "optimal" if config.solver == "ilp" else "minimal"
    iterative = config.label_mode and not all(
        is_positive(c) for c in constraints
    )
    iterations = 0
    hypergraphs = []

    while True:
        iterations += 1
        errors = []
        found_any = False
        for index, constraint in enumerate(constraints):
            matches = find_violating_matches(
                graph, constraint, now, config.max_matches, config.max_path_length
            )
            for m_index, match in enumerate(matches):
                found_any = True
                match_errors = _match_errors(
                    graph, constraint, match, config, f"{index}:{m_index}"
                )
                error_counts[index] += len(match_errors)
                errors.extend(match_errors)
        if not found_any:
            break
        hypergraph = ConflictHypergraph.from_errors(errors)
        hypergraphs.append(hypergraph)
        weights = compute_weights(graph, config.weight_mode, config.custom_weight_key)
        cover, status = _solve(hypergraph, weights, config)
        plan = _cover_to_plan(cover, graph)
        graph = apply_deletions(graph, plan)
        total_plan = total_plan | plan
        total_weight += cover.weight
        if not iterative:
            break
    timings["repair_s"] = time.perf_counter() - started

    started = time.perf_counter()
    satisfied = check_satisfies(
        graph, constraints, now, config.max_matches, config.max_path_length
    )
    maximal = None
    if not config.is_approximating and len(original.objects()) <= MAXIMALITY_OBJECT_CAP:
        maximal = check_single_object_maximality(
            original,
            graph,
            constraints,
            now,
            max_matches=config.max_matches,
            max_path_length=config.max_path_length,
        )
    timings["verify_s"] = time.perf_counter() - started

    report = RepairReport(
        error_counts=error_counts,
        deletions=total_plan,
        total_weight=total_weight,
        solver_status=status,
        satisfied=satisfied,
        single_object_maximal=maximal,
        iterations=iterations,
        timings=timings,
        hypergraphs=hypergraphs,
    )
    return graph, report


def _deleted_universe(original, repaired):
    """Individually re-addable objects: nodes, absent edges, deleted labels."""
    nodes = sorted(original.nodes - repaired.nodes)
    edges = sorted(original.edges - repaired.edges)
    labels = []
    for obj in sorted(original.objects()):
        if obj in repaired.objects():
            for label in sorted(original.labels_of(obj) - repaired.labels_of(obj)):
                labels.append((obj, label))
    return [("node", n) for n in nodes] + [("edge", e) for e in edges] + [
        ("label", t) for t in labels
    ]


def _readdition_plan(original, repaired, subset):
    """Deletion plan producing `repaired` plus the objects in `subset`.

    Returns None when the subset is not individually re-addable (an edge
    whose endpoint stays deleted, or a label of an absent object).
    """
    back_nodes = {x for kind, x in subset if kind == "node"}
    back_edges = {x for kind, x in subset if kind == "edge"}
    back_labels = {x for kind, x in subset if kind == "label"}
    nodes = original.nodes - repaired.nodes - back_nodes
    present = original.nodes - nodes
    for e in back_edges:
        src, dst = original.endpoints[e]
        if src not in present or dst not in present:
            return None
    for obj, _ in back_labels:
        if obj in nodes or (obj in original.edges and obj not in repaired.edges
                            and obj not in back_edges):
            return None
    # cascaded edges stay deleted explicitly once their node returns
    edges = original.edges - repaired.edges - back_edges
    labels = set()
    for obj in original.objects():
        # absent objects either stay deleted or come back with all labels
        if obj not in repaired.objects():
            continue
        for label in original.labels_of(obj) - repaired.labels_of(obj):
            if (obj, label) not in back_labels:
                labels.add((obj, label))
    return DeletionPlan(frozenset(nodes), frozenset(edges), frozenset(labels))


def check_single_object_maximality(
    original,
    repaired,
    constraints,
    now,
    max_matches=DEFAULT_MAX_MATCHES,
    max_path_length=DEFAULT_MAX_PATH_LENGTH,
):
    """Necessary condition for repair maximality.

    Every deleted object that can be re-added alone must re-introduce a
    violation.  When at most 12 objects were deleted the check escalates to
    all subsets, which decides maximality exactly.
    """
    universe = _deleted_universe(original, repaired)
    if not universe:
        return True

    def clean_after(subset):
        plan = _readdition_plan(original, repaired, subset)
        if plan is None:
            return False
        candidate = apply_deletions(original, plan)
        return check_satisfies(
            candidate, constraints, now, max_matches, max_path_length
        )

    for item in universe:
        if clean_after([item]):
            return False
    if len(universe) <= EXHAUSTIVE_DELETION_CAP:
        for size in range(2, len(universe) + 1):
            for subset in combinations(universe, size):
                if clean_after(subset):
                    return False
    return True
