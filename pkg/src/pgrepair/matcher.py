"""Native enumeration of pattern matches and violating-match detection.

Path semantics are TRAIL: within one bound path no edge is traversed twice.
This keeps the number of matches finite on cyclic graphs and mirrors the
behaviour of graph databases for variable-length patterns.  Enumeration is
a DFS over the pattern tree with used-edge pruning; multiple path patterns
are joined on shared node variables in ascending minimum-length order.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from .constraints import (
    Concat,
    Constraint,
    EdgePattern,
    NodeComparison,
    NodePattern,
    NowRef,
    PropertyComparison,
    PropRef,
    Star,
    Union,
    min_match_length,
)
from .errors import ResourceCapExceeded
from .model import Direction, Path, PropertyGraph, Value

DEFAULT_MAX_MATCHES = 1_000_000
DEFAULT_MAX_PATH_LENGTH = 10_000


@dataclass(frozen=True)
class Match:
    """Bindings of node variables to nodes and path variables to paths."""

    node_bindings: tuple  # sorted tuple of (var, node_id)
    path_bindings: tuple  # tuple of (path_var, Path) in constraint order

    def node(self, var):
        for name, node in self.node_bindings:
            if name == var:
                return node
        raise KeyError(var)

    def paths(self):
        return [path for _, path in self.path_bindings]

    def sort_key(self):
        path_part = tuple(
            (path.objects, tuple(d.value for _, d in path.steps))
            for _, path in self.path_bindings
        )
        return (path_part, self.node_bindings)


def _check_comparison(left: Value, right: Value, op: str) -> bool:
    if not left.comparable_with(right):
        return False
    a, b = left.value, right.value
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<=":
        return a <= b
    if op == ">=":
        return a >= b
    if op == "<":
        return a < b
    return a > b


def eval_predicate(graph: PropertyGraph, match: Match, predicate, now: datetime) -> bool:
    """Predicate satisfaction; a missing property makes the predicate false."""
    if isinstance(predicate, NodeComparison):
        left, right = match.node(predicate.left), match.node(predicate.right)
        return left == right if predicate.op == "=" else left != right
    if isinstance(predicate, PropertyComparison):
        left = graph.property(match.node(predicate.left.var), predicate.left.key)
        if left is None:
            return False
        right = predicate.right
        if isinstance(right, PropRef):
            right = graph.property(match.node(right.var), right.key)
            if right is None:
                return False
        elif isinstance(right, NowRef):
            right = Value("timestamp", now)
        return _check_comparison(left, right, predicate.op)
    return False  # FalsePredicate


class _Budget:
    def __init__(self, max_matches, max_path_length):
        self.max_matches = max_matches
        self.max_path_length = max_path_length
        self.matches = 0

    def count_match(self):
        self.matches += 1
        if self.matches > self.max_matches:
            raise ResourceCapExceeded(f"more than {self.max_matches} matches")

    def check_length(self, length):
        if length > self.max_path_length:
            raise ResourceCapExceeded(
                f"path longer than {self.max_path_length} edges"
            )


def _join(prefix: Path, suffix: Path) -> Path:
    assert prefix.nodes[-1] == suffix.nodes[0]
    return Path(prefix.nodes + suffix.nodes[1:], prefix.steps + suffix.steps)


def _match_pattern(pattern, graph, start, used, bindings, budget):
    """Yield (path, bindings) pairs for `pattern` anchored at `start`."""
    if isinstance(pattern, NodePattern):
        if pattern.label_expr is not None and not pattern.label_expr.evaluate(
            graph.labels_of(start)
        ):
            return
        if pattern.var is not None:
            bound = bindings.get(pattern.var)
            if bound is not None and bound != start:
                return
            if bound is None:
                bindings = {**bindings, pattern.var: start}
        yield Path((start,), ()), bindings
        return

    if isinstance(pattern, EdgePattern):
        if pattern.direction is Direction.FORWARD:
            candidates = [(e, graph.endpoints[e][1]) for e in graph.out_edges(start)]
        else:
            candidates = [(e, graph.endpoints[e][0]) for e in graph.in_edges(start)]
        for edge, other in candidates:
            if edge in used:
                continue
            if pattern.label_expr is not None and not pattern.label_expr.evaluate(
                graph.labels_of(edge)
            ):
                continue
            yield Path((start, other), ((edge, pattern.direction),)), bindings
        return

    if isinstance(pattern, Concat):
        yield from _match_sequence(pattern.children, graph, start, used, bindings, budget)
        return

    if isinstance(pattern, Union):
        for child in pattern.children:
            yield from _match_pattern(child, graph, start, used, bindings, budget)
        return

    if isinstance(pattern, Star):
        # zero repetitions: the empty path at the anchor, no label constraint
        yield Path((start,), ()), bindings
        for body_path, body_bindings in _match_pattern(
            pattern.child, graph, start, used, bindings, budget
        ):
            budget.check_length(body_path.length)
            for rest_path, rest_bindings in _match_pattern(
                pattern,
                graph,
                body_path.nodes[-1],
                used | {e for e, _ in body_path.steps},
                body_bindings,
                budget,
            ):
                combined = _join(body_path, rest_path)
                budget.check_length(combined.length)
                yield combined, rest_bindings
        return

    raise TypeError(f"not a path pattern: {pattern!r}")


def _match_sequence(children, graph, start, used, bindings, budget):
    if not children:
        yield Path((start,), ()), bindings
        return
    head, tail = children[0], children[1:]
    for head_path, head_bindings in _match_pattern(
        head, graph, start, used, bindings, budget
    ):
        new_used = used | {e for e, _ in head_path.steps}
        for tail_path, tail_bindings in _match_sequence(
            tail, graph, head_path.nodes[-1], new_used, head_bindings, budget
        ):
            combined = _join(head_path, tail_path)
            budget.check_length(combined.length)
            yield combined, tail_bindings


def _pattern_matches(pattern, graph, bindings, budget):
    for start in sorted(graph.nodes):
        yield from _match_pattern(pattern, graph, start, frozenset(), bindings, budget)


def find_matches(
    graph: PropertyGraph,
    constraint: Constraint,
    max_matches: int = DEFAULT_MAX_MATCHES,
    max_path_length: int = DEFAULT_MAX_PATH_LENGTH,
) -> list:
    """All matches of the constraint's graph pattern, deduplicated and sorted."""
    budget = _Budget(max_matches, max_path_length)
    order = sorted(
        range(len(constraint.patterns)),
        key=lambda i: (min_match_length(constraint.patterns[i][1]), i),
    )

    partials = [({}, {})]  # (path assignment by pattern index, node bindings)
    for index in order:
        _, pattern = constraint.patterns[index]
        extended = []
        for assignment, bindings in partials:
            for path, new_bindings in _pattern_matches(pattern, graph, bindings, budget):
                extended.append(({**assignment, index: path}, new_bindings))
        partials = extended
        if not partials:
            return []

    seen = set()
    matches = []
    for assignment, bindings in partials:
        budget.count_match()
        match = Match(
            node_bindings=tuple(sorted(bindings.items())),
            path_bindings=tuple(
                (z, assignment[i]) for i, (z, _) in enumerate(constraint.patterns)
            ),
        )
        key = match.sort_key()
        if key in seen:
            continue
        seen.add(key)
        matches.append(match)
    matches.sort(key=Match.sort_key)
    return matches


def find_violating_matches(
    graph: PropertyGraph,
    constraint: Constraint,
    now: datetime,
    max_matches: int = DEFAULT_MAX_MATCHES,
    max_path_length: int = DEFAULT_MAX_PATH_LENGTH,
) -> list:
    """Matches passing every filter predicate but failing the condition."""
    violating = []
    for match in find_matches(graph, constraint, max_matches, max_path_length):
        if not all(eval_predicate(graph, match, p, now) for p in constraint.filter):
            continue
        if all(eval_predicate(graph, match, p, now) for p in constraint.condition):
            continue
        violating.append(match)
    return violating
