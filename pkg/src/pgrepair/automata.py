"""Symbolic automata for path patterns over label-set traces.

States come in two kinds: node states (the next transition reads a node's
label set) and edge states (the next transition reads an edge's label set,
extended with a direction marker).  Compilation is by structural induction
on the pattern with no epsilon transitions; the loop and concatenation
seams merge adjacent node constraints by conjunction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count

from .constraints import (
    And,
    Concat,
    EdgePattern,
    Label,
    LabelExpr,
    NodePattern,
    Star,
    Top,
    Union,
    pattern_labels,
)
from .errors import ResourceCapExceeded
from .model import BW, FW, Direction, Path, PropertyGraph, trace

DEFAULT_MAX_RUNS = 10_000


@dataclass(frozen=True)
class Transition:
    source: int
    formula: LabelExpr
    target: int


@dataclass
class RgpcAutomaton:
    """Automaton over label sets with node states and edge states.

    There is exactly one accepting state, always an edge state, distinct
    from the initial node state; the initial state has only outgoing and
    the accepting state only incoming transitions.
    """

    node_states: frozenset
    edge_states: frozenset
    initial: int
    accepting: int
    transitions: tuple  # construction order fixes run enumeration order
    labels: frozenset = frozenset()

    def __post_init__(self):
        self._outgoing = {}
        for transition in self.transitions:
            self._outgoing.setdefault(transition.source, []).append(transition)

    def outgoing(self, state) -> list:
        return self._outgoing.get(state, [])

    def states(self) -> frozenset:
        return self.node_states | self.edge_states

    def check_invariants(self) -> None:
        assert not (self.node_states & self.edge_states)
        assert self.initial in self.node_states
        assert self.accepting in self.edge_states
        assert self.accepting != self.initial
        for t in self.transitions:
            assert t.source != self.accepting, "accepting state has outgoing transition"
            assert t.target != self.initial, "initial state has incoming transition"
            node_to_edge = t.source in self.node_states and t.target in self.edge_states
            edge_to_node = t.source in self.edge_states and t.target in self.node_states
            assert node_to_edge or edge_to_node

    def accepts_sequence(self, label_sets) -> bool:
        states = {self.initial}
        for labels in label_sets:
            states = {
                t.target
                for q in states
                for t in self.outgoing(q)
                if t.formula.evaluate(labels)
            }
            if not states:
                return False
        return self.accepting in states

    def accepts(self, graph: PropertyGraph, path: Path) -> bool:
        return self.accepts_sequence(trace(graph, path))


@dataclass(frozen=True)
class Run:
    """An accepting walk: the state sequence and the transitions taken."""

    states: tuple
    transitions: tuple

    def __len__(self):
        return len(self.transitions)


@dataclass
class _Fragment:
    node_states: set
    edge_states: set
    initial: int
    accepting: int
    transitions: list


def _direction_atom(direction: Direction) -> Label:
    return Label(FW if direction is Direction.FORWARD else BW)


def _compile(pattern, fresh) -> _Fragment:
    if isinstance(pattern, NodePattern):
        start, accept = next(fresh), next(fresh)
        formula = pattern.label_expr if pattern.label_expr is not None else Top()
        return _Fragment(
            {start}, {accept}, start, accept, [Transition(start, formula, accept)]
        )

    if isinstance(pattern, EdgePattern):
        start, mid_e, mid_n, accept = (next(fresh) for _ in range(4))
        inner = pattern.label_expr if pattern.label_expr is not None else Top()
        formula = And(_direction_atom(pattern.direction), inner)
        return _Fragment(
            {start, mid_n},
            {mid_e, accept},
            start,
            accept,
            [
                Transition(start, Top(), mid_e),
                Transition(mid_e, formula, mid_n),
                Transition(mid_n, Top(), accept),
            ],
        )

    if isinstance(pattern, Concat):
        fragment = _compile(pattern.children[0], fresh)
        for child in pattern.children[1:]:
            fragment = _concat(fragment, _compile(child, fresh))
        return fragment

    if isinstance(pattern, Union):
        start, accept = next(fresh), next(fresh)
        node_states, edge_states = {start}, {accept}
        transitions = []
        parts = [_compile(child, fresh) for child in pattern.children]
        for part in parts:
            node_states |= part.node_states
            edge_states |= part.edge_states
            transitions.extend(part.transitions)
        for part in parts:
            for t in part.transitions:
                source = start if t.source == part.initial else t.source
                target = accept if t.target == part.accepting else t.target
                if source != t.source or target != t.target:
                    transitions.append(Transition(source, t.formula, target))
        return _Fragment(node_states, edge_states, start, accept, transitions)

    if isinstance(pattern, Star):
        part = _compile(pattern.child, fresh)
        start, accept = next(fresh), next(fresh)
        transitions = list(part.transitions)
        # zero repetitions: a single unconstrained node
        transitions.append(Transition(start, Top(), accept))
        for t in part.transitions:
            if t.source == part.initial:
                transitions.append(Transition(start, t.formula, t.target))
            if t.target == part.accepting:
                transitions.append(Transition(t.source, t.formula, accept))
        # loop seam: last node of one repetition is the first of the next
        incoming = [t for t in part.transitions if t.target == part.accepting]
        outgoing = [t for t in part.transitions if t.source == part.initial]
        for into in incoming:
            for out in outgoing:
                transitions.append(
                    Transition(into.source, And(into.formula, out.formula), out.target)
                )
        return _Fragment(
            part.node_states | {start},
            part.edge_states | {accept},
            start,
            accept,
            transitions,
        )

    raise TypeError(f"not a path pattern: {pattern!r}")


def _concat(left: _Fragment, right: _Fragment) -> _Fragment:
    transitions = left.transitions + right.transitions
    for into in left.transitions:
        if into.target != left.accepting:
            continue
        for out in right.transitions:
            if out.source != right.initial:
                continue
            transitions.append(
                Transition(into.source, And(into.formula, out.formula), out.target)
            )
    return _Fragment(
        left.node_states | right.node_states,
        left.edge_states | right.edge_states,
        left.initial,
        right.accepting,
        transitions,
    )


def _prune(fragment: _Fragment) -> _Fragment:
    """Drop states that cannot lie on any accepting run.

    Only dead internal seam states are removed; acceptance is unchanged.
    """
    forward = {}
    backward = {}
    for t in fragment.transitions:
        forward.setdefault(t.source, set()).add(t.target)
        backward.setdefault(t.target, set()).add(t.source)

    def closure(start, adjacency):
        seen = {start}
        todo = [start]
        while todo:
            for nxt in adjacency.get(todo.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    reachable = closure(fragment.initial, forward)
    productive = closure(fragment.accepting, backward)
    live = (reachable & productive) | {fragment.initial, fragment.accepting}
    transitions = [
        t for t in fragment.transitions if t.source in live and t.target in live
    ]
    return _Fragment(
        fragment.node_states & live,
        fragment.edge_states & live,
        fragment.initial,
        fragment.accepting,
        transitions,
    )


def compile_automaton(pattern) -> RgpcAutomaton:
    """Compile a validated path pattern into its trace automaton."""
    fragment = _prune(_compile(pattern, count()))
    # renumber for stable state ids independent of construction counters
    order = {fragment.initial: 0}
    for t in fragment.transitions:
        for state in (t.source, t.target):
            if state not in order:
                order[state] = len(order)
    if fragment.accepting not in order:
        order[fragment.accepting] = len(order)
    automaton = RgpcAutomaton(
        node_states=frozenset(order[s] for s in fragment.node_states),
        edge_states=frozenset(order[s] for s in fragment.edge_states),
        initial=order[fragment.initial],
        accepting=order[fragment.accepting],
        transitions=tuple(
            Transition(order[t.source], t.formula, order[t.target])
            for t in fragment.transitions
        ),
        labels=pattern_labels(pattern) | {FW, BW},
    )
    automaton.check_invariants()
    return automaton


def accepting_runs(
    automaton: RgpcAutomaton,
    graph: PropertyGraph,
    path: Path,
    max_runs: int = DEFAULT_MAX_RUNS,
) -> tuple:
    """All accepting runs on the extended trace of `path`, in DFS order.

    Transition order equals construction order, so enumeration is
    deterministic.  Exceeding `max_runs` is a hard error: silently dropping
    runs would make token-extended errors unsound.
    """
    label_sets = trace(graph, path)
    runs = []

    def walk(state, index, states, taken):
        if index == len(label_sets):
            if state == automaton.accepting:
                if len(runs) >= max_runs:
                    raise ResourceCapExceeded(
                        f"more than {max_runs} accepting runs on one path"
                    )
                runs.append(Run(tuple(states), tuple(taken)))
            return
        for transition in automaton.outgoing(state):
            if transition.formula.evaluate(label_sets[index]):
                states.append(transition.target)
                taken.append(transition)
                walk(transition.target, index + 1, states, taken)
                states.pop()
                taken.pop()

    walk(automaton.initial, 0, [automaton.initial], [])
    return tuple(runs)


def essential_tokens(graph: PropertyGraph, path: Path, run: Run) -> frozenset:
    """Tokens (object, label) whose removal falsifies some step of `run`.

    An object occurring several times on the path is perturbed at all its
    positions at once.  Direction markers are never tokens.
    """
    positions = path.objects
    label_sets = list(trace(graph, path))
    assert len(run.transitions) == len(label_sets)

    by_object = {}
    for index, obj in enumerate(positions):
        by_object.setdefault(obj, []).append(index)

    tokens = set()
    for obj, indexes in by_object.items():
        for label in graph.labels_of(obj):
            for index in indexes:
                transition = run.transitions[index]
                if not transition.formula.evaluate(label_sets[index] - {label}):
                    tokens.add((obj, label))
                    break
    return frozenset(tokens)


def to_dot(automaton: RgpcAutomaton) -> str:
    """Render the automaton in DOT format (documentation aid)."""
    lines = ["digraph automaton {", "  rankdir=LR;"]
    for state in sorted(automaton.states()):
        shape = "circle" if state in automaton.node_states else "box"
        peripheries = 2 if state == automaton.accepting else 1
        lines.append(
            f'  q{state} [label="{state}", shape={shape}, peripheries={peripheries}];'
        )
    lines.append(f"  start [shape=point]; start -> q{automaton.initial};")
    for t in automaton.transitions:
        label = str(t.formula).replace('"', '\\"')
        lines.append(f'  q{t.source} -> q{t.target} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
