"""Minimum-weight vertex cover solvers for conflict hypergraphs.

Four strategies: an exact branch-and-bound ILP over an internal LP
relaxation, a naive greedy with a trimming phase, an LP-guided greedy,
and an exhaustive brute-force oracle for tests.  A variant ILP encodes
node/edge deletion dependencies explicitly instead of folding edge
weights into node weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import lp
from .conflict import ConflictHypergraph, vertex_sort_key
from .errors import SolverTimeout, ValidationError

EPSILON = lp.EPSILON
DEFAULT_NODE_BUDGET = 200_000
BRUTE_FORCE_CAP = 25


@dataclass(frozen=True)
class FractionalSolution:
    assignment: dict  # vertex -> float in [0, 1]
    objective: float


@dataclass(frozen=True)
class Cover:
    vertices: frozenset
    weight: Fraction
    minimal: bool

    def sorted_vertices(self):
        return sorted(self.vertices, key=vertex_sort_key)


def _cover_weight(vertices, weights) -> Fraction:
    return sum((weights(v) for v in vertices), Fraction(0))


def is_cover(hypergraph: ConflictHypergraph, vertices) -> bool:
    return all(error.objects & vertices for error in hypergraph.hyperedges)


def is_minimal_cover(hypergraph: ConflictHypergraph, vertices) -> bool:
    if not is_cover(hypergraph, vertices):
        return False
    for v in vertices:
        if not any(
            error.objects & vertices == {v} for error in hypergraph.hyperedges
        ):
            return False
    return True


def _lp_rows(hypergraph, order):
    """Cover rows (as <=) plus unit upper bounds, for `lp.solve`."""
    index = {v: i for i, v in enumerate(order)}
    n = len(order)
    rows = []
    rhs = []
    for error in hypergraph.hyperedges:
        row = np.zeros(n)
        for v in error.objects:
            row[index[v]] = -1.0
        rows.append(row)
        rhs.append(-1.0)
    for i in range(n):
        row = np.zeros(n)
        row[i] = 1.0
        rows.append(row)
        rhs.append(1.0)
    return np.array(rows).reshape(len(rows), n), np.array(rhs)


def solve_lp(hypergraph: ConflictHypergraph, weights) -> FractionalSolution:
    """Optimal fractional cover (LP relaxation of the ILP below)."""
    order = hypergraph.vertices
    if not order:
        return FractionalSolution({}, 0.0)
    cost = np.array([float(weights(v)) for v in order])
    a_ub, b_ub = _lp_rows(hypergraph, order)
    result = lp.solve(cost, a_ub, b_ub)
    assert result.status == lp.OPTIMAL, "covering LP is always feasible"
    assignment = {v: float(result.x[i]) for i, v in enumerate(order)}
    return FractionalSolution(assignment, result.objective)


def _branch_and_bound(cost, a_ub, b_ub, integral, budget):
    """Exact 0/1 minimization of cost.x subject to a_ub x <= b_ub.

    Depth-first, branching on the most fractional variable (tie-break:
    smallest index), 1-branch first.  Returns (value, x) with x integral,
    or (None, None) if infeasible.  Raises SolverTimeout past `budget`
    explored nodes.
    """
    n = len(cost)
    best_value = None
    best_x = None
    explored = 0

    def recurse(extra_rows, extra_rhs):
        nonlocal best_value, best_x, explored
        explored += 1
        if explored > budget:
            raise SolverTimeout(f"branch-and-bound budget of {budget} nodes exceeded")
        if extra_rows:
            a = np.vstack([a_ub, np.array(extra_rows)])
            b = np.concatenate([b_ub, np.array(extra_rhs)])
        else:
            a, b = a_ub, b_ub
        relaxed = lp.solve(cost, a, b)
        if relaxed.status != lp.OPTIMAL:
            return
        bound = relaxed.objective
        if integral:
            bound = math.ceil(bound - EPSILON)
        if best_value is not None and bound >= best_value - EPSILON:
            return
        fractional = -1
        most = EPSILON
        for i in range(n):
            away = min(relaxed.x[i], 1.0 - relaxed.x[i])
            if away > most:
                most = away
                fractional = i
        if fractional < 0:
            x = np.rint(relaxed.x).astype(int)
            value = float(cost @ x)
            if best_value is None or value < best_value - EPSILON:
                best_value = value
                best_x = x
            return
        up = np.zeros(n)
        up[fractional] = -1.0
        recurse(extra_rows + [up], extra_rhs + [-1.0])
        down = np.zeros(n)
        down[fractional] = 1.0
        recurse(extra_rows + [down], extra_rhs + [0.0])

    recurse([], [])
    return best_value, best_x


def _fix_rows(n, ones, zeros):
    rows, rhs = [], []
    for i in ones:
        row = np.zeros(n)
        row[i] = -1.0
        rows.append(row)
        rhs.append(-1.0)
    for i in zeros:
        row = np.zeros(n)
        row[i] = 1.0
        rows.append(row)
        rhs.append(0.0)
    return rows, rhs


def solve_ilp(
    hypergraph: ConflictHypergraph, weights, node_budget: int = DEFAULT_NODE_BUDGET
) -> Cover:
    """Minimum-weight cover, exact and deterministic.

    After branch-and-bound fixes the optimal weight, the returned cover is
    refined to the lexicographically smallest optimal one (compared as
    sorted vertex sequences), so ties never depend on traversal order.
    """
    order = hypergraph.vertices
    if not order:
        return Cover(frozenset(), Fraction(0), True)
    cost = np.array([float(weights(v)) for v in order])
    integral = all(weights(v).denominator == 1 for v in order)
    a_ub, b_ub = _lp_rows(hypergraph, order)
    n = len(order)

    def optimum_with(ones, zeros):
        rows, rhs = _fix_rows(n, ones, zeros)
        a = np.vstack([a_ub, np.array(rows)]) if rows else a_ub
        b = np.concatenate([b_ub, np.array(rhs)]) if rows else b_ub
        return _branch_and_bound(cost, a, b, integral, node_budget)

    best_value, _ = optimum_with([], [])
    assert best_value is not None, "x = 1 is always feasible"

    ones, zeros = [], []
    chosen = set()
    for i in range(n):
        # a completed prefix beats any longer sorted sequence
        if is_cover(hypergraph, chosen) and abs(
            float(cost[ones].sum()) - best_value
        ) <= EPSILON:
            zeros.extend(range(i, n))
            break
        value, _ = optimum_with(ones + [i], zeros)
        if value is not None and value <= best_value + EPSILON:
            ones.append(i)
            chosen.add(order[i])
        else:
            zeros.append(i)

    vertices = frozenset(order[i] for i in ones)
    assert is_cover(hypergraph, vertices)
    return Cover(vertices, _cover_weight(vertices, weights), True)


def _trim(hypergraph, selected, weights):
    vertices = set(selected)
    by_weight = sorted(
        vertices, key=lambda v: (-weights(v),) + tuple([vertex_sort_key(v)])
    )
    for v in by_weight:
        if not any(
            error.objects & vertices == {v} for error in hypergraph.hyperedges
        ):
            vertices.discard(v)
    return vertices


def naive_greedy(
    hypergraph: ConflictHypergraph,
    weights,
    approximate: bool = False,
    tie_break=None,
    restrict=None,
) -> Cover:
    """Greedy selection over hyperedges in input order, then trimming.

    A hyperedge is skipped when it already contains a selected vertex of
    minimal weight within it.  `tie_break` picks among the minimal-weight
    candidates (sorted by id); the default takes the smallest id.  With
    `approximate` the trimming phase is skipped and minimality is not
    claimed.  `restrict` narrows the candidate vertices of every hyperedge.
    """
    selected = set()
    for error in hypergraph.hyperedges:
        candidates = error.objects if restrict is None else error.objects & restrict
        assert candidates, "restriction must leave every hyperedge coverable"
        minimum = min(weights(v) for v in candidates)
        cheapest = sorted(
            (v for v in candidates if weights(v) == minimum), key=vertex_sort_key
        )
        if any(v in selected for v in cheapest):
            continue
        selected.add(cheapest[0] if tie_break is None else tie_break(cheapest))
    if not approximate:
        selected = _trim(hypergraph, selected, weights)
    vertices = frozenset(selected)
    return Cover(vertices, _cover_weight(vertices, weights), not approximate)


def lp_guided_greedy(
    hypergraph: ConflictHypergraph, weights, approximate: bool = False
) -> Cover:
    """Greedy restricted to vertices with positive LP mass."""
    relaxed = solve_lp(hypergraph, weights)
    candidates = frozenset(
        v for v, x in relaxed.assignment.items() if x > EPSILON
    )
    return naive_greedy(hypergraph, weights, approximate, restrict=candidates)


def brute_force_min_cover(hypergraph: ConflictHypergraph, weights) -> Cover:
    """Exhaustive oracle; ties broken on the sorted vertex-id sequence."""
    order = hypergraph.vertices
    if len(order) > BRUTE_FORCE_CAP:
        raise ValidationError(
            f"brute force limited to {BRUTE_FORCE_CAP} vertices, got {len(order)}"
        )
    best = None
    best_key = None
    for size in range(len(order) + 1):
        for subset in combinations(order, size):
            chosen = frozenset(subset)
            if not is_cover(hypergraph, chosen):
                continue
            weight = _cover_weight(chosen, weights)
            key = (weight, tuple(vertex_sort_key(v) for v in subset))
            if best_key is None or key < best_key:
                best = chosen
                best_key = key
    assert best is not None
    return Cover(best, best_key[0], True)


def solve_ilp_explicit(
    hypergraph: ConflictHypergraph,
    incident_map: dict,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Cover:
    """Unweighted ILP with explicit node-to-edge deletion dependencies.

    `incident_map` gives, per node vertex, the ids of its incident edges.
    Deleting a node forces its edges: |E_n| x_n <= sum of their variables.
    The minimized objective counts every deleted object, so the returned
    cover lists nodes together with the edges they drag along.
    """
    order = list(hypergraph.vertices)
    present = set(order)
    for node in incident_map:
        for edge in incident_map[node]:
            if edge not in present:
                present.add(edge)
                order.append(edge)
    order.sort(key=vertex_sort_key)
    if not hypergraph.hyperedges:
        return Cover(frozenset(), Fraction(0), True)
    index = {v: i for i, v in enumerate(order)}
    n = len(order)

    rows, rhs = [], []
    for error in hypergraph.hyperedges:
        row = np.zeros(n)
        for v in error.objects:
            row[index[v]] = -1.0
        rows.append(row)
        rhs.append(-1.0)
    for node, edges in sorted(incident_map.items()):
        if node not in index or not edges:
            continue
        row = np.zeros(n)
        row[index[node]] = float(len(edges))
        for edge in edges:
            row[index[edge]] -= 1.0
        rows.append(row)
        rhs.append(0.0)
    for i in range(n):
        row = np.zeros(n)
        row[i] = 1.0
        rows.append(row)
        rhs.append(1.0)

    cost = np.ones(n)
    value, x = _branch_and_bound(
        cost, np.array(rows), np.array(rhs), True, node_budget
    )
    assert value is not None, "x = 1 is always feasible"
    vertices = frozenset(order[i] for i in range(n) if x[i])
    return Cover(vertices, Fraction(len(vertices)), True)
