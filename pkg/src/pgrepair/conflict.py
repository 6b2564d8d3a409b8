"""Errors, conflict hypergraph assembly, and vertex weights.

A hypergraph vertex is a deletable object: a node id, an edge id, or a
token ``(object_id, label)``.  Hyperedges are errors; any vertex cover of
the hypergraph eliminates every violating match it was built from.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .automata import accepting_runs, compile_automaton, essential_tokens
from .errors import ConfigError, WeightError
from .matcher import Match
from .model import PropertyGraph, incident_edges

WEIGHT_MODES = ("topological", "label", "custom")


def vertex_kind(vertex) -> str:
    return "token" if isinstance(vertex, tuple) else "object"


def vertex_sort_key(vertex):
    """Deterministic total order: plain objects by id, then tokens."""
    if isinstance(vertex, tuple):
        return (1, vertex[0], vertex[1])
    return (0, vertex, "")


@dataclass(frozen=True)
class Error:
    """One hyperedge: the deletable objects that can eliminate an error."""

    objects: frozenset

    def __post_init__(self):
        if not self.objects:
            raise ValueError("an error must contain at least one object")

    def sorted_vertices(self):
        return sorted(self.objects, key=vertex_sort_key)


@dataclass(frozen=True)
class ConflictHypergraph:
    vertices: tuple  # deterministic order
    hyperedges: tuple  # of Error, deduplicated, construction order

    @staticmethod
    def from_errors(errors) -> "ConflictHypergraph":
        seen = set()
        unique = []
        for error in errors:
            if error.objects not in seen:
                seen.add(error.objects)
                unique.append(error)
        vertices = set()
        for error in unique:
            vertices |= error.objects
        return ConflictHypergraph(
            tuple(sorted(vertices, key=vertex_sort_key)), tuple(unique)
        )

    def to_json(self) -> list:
        out = []
        for error in self.hyperedges:
            row = []
            for vertex in error.sorted_vertices():
                if isinstance(vertex, tuple):
                    row.append({"kind": "token", "id": vertex[0], "label": vertex[1]})
                else:
                    row.append({"kind": "object", "id": vertex})
            out.append(row)
        return out


def topological_error(match: Match) -> Error:
    """All nodes and edges on all bound paths of the match."""
    objects = frozenset()
    for path in match.paths():
        objects |= path.object_ids()
    return Error(objects)


def token_errors(graph: PropertyGraph, constraint, match: Match, max_runs=None) -> list:
    """Token-extended errors: one per combination of accepting runs.

    Each error is the topological error plus every token essential for the
    chosen run of each bound path.  Patterns without labels contribute no
    tokens, so their errors collapse back to the topological error.
    """
    base = topological_error(match).objects
    run_sets = []
    kwargs = {} if max_runs is None else {"max_runs": max_runs}
    for (_, pattern), (_, path) in zip(constraint.patterns, match.path_bindings):
        automaton = compile_automaton(pattern)
        runs = accepting_runs(automaton, graph, path, **kwargs)
        run_sets.append([(path, run) for run in runs])
    errors = []
    for combination in product(*run_sets):
        tokens = frozenset()
        for path, run in combination:
            tokens |= essential_tokens(graph, path, run)
        errors.append(Error(base | tokens))
    return errors


def neighbourhood_error(match: Match, k: int) -> Error:
    """Objects within distance k of either endpoint of each bound path."""
    if k < 1:
        raise ValueError("neighbourhood radius must be >= 1")
    objects = set()
    for path in match.paths():
        positions = path.objects
        prefix = positions[: 2 * k + 1]
        suffix = positions[len(positions) - 2 * k - 1 :]
        objects.update(prefix)
        objects.update(suffix)
    return Error(frozenset(objects))


def sample_error(match: Match, k: int, rng_seed) -> Error:
    """2k uniformly sampled edges per error (all, if fewer) plus endpoints."""
    if k < 1:
        raise ValueError("sample size parameter must be >= 1")
    base = topological_error(match)
    edge_endpoints = {}
    for path in match.paths():
        for i, (edge, _) in enumerate(path.steps):
            edge_endpoints[edge] = (path.nodes[i], path.nodes[i + 1])
    edges = sorted(edge_endpoints)
    if not edges:
        return base
    rng = random.Random(rng_seed)
    chosen = edges if len(edges) <= 2 * k else rng.sample(edges, 2 * k)
    objects = set()
    for edge in chosen:
        objects.add(edge)
        objects.update(edge_endpoints[edge])
    return Error(frozenset(objects))


class WeightFunction:
    """Positive vertex weights; total on any vertex the hypergraph can hold."""

    def __init__(self, graph: PropertyGraph, mode: str, custom_key=None):
        if mode not in WEIGHT_MODES:
            raise ConfigError(f"unknown weight mode {mode!r}")
        if mode == "custom" and not custom_key:
            raise ConfigError("custom weight mode requires a property key")
        if mode != "custom" and custom_key:
            raise ConfigError(f"custom weight key given for mode {mode!r}")
        self.graph = graph
        self.mode = mode
        self.custom_key = custom_key
        self._cache = {}

    def _custom(self, obj) -> Fraction:
        value = self.graph.property(obj, self.custom_key)
        if value is None or value.type not in ("int", "float"):
            raise WeightError(f"object {obj!r} lacks numeric {self.custom_key!r} weight")
        weight = Fraction(value.value).limit_denominator(10**9)
        if weight <= 0:
            raise WeightError(f"non-positive custom weight on {obj!r}")
        return weight

    def __call__(self, vertex) -> Fraction:
        if vertex in self._cache:
            return self._cache[vertex]
        graph = self.graph
        if isinstance(vertex, tuple):  # token
            weight = Fraction(1)
        elif vertex in graph.edges:
            if self.mode == "topological":
                weight = Fraction(1)
            elif self.mode == "label":
                weight = Fraction(len(graph.labels_of(vertex)) + 1)
            else:
                weight = self._custom(vertex)
        elif vertex in graph.nodes:
            incident = incident_edges(graph, vertex)
            edge_sum = sum((self(e) for e in incident), Fraction(0))
            if self.mode == "topological":
                weight = Fraction(len(incident) + 1)
            elif self.mode == "label":
                weight = Fraction(len(graph.labels_of(vertex)) + 1) + edge_sum
            else:
                weight = self._custom(vertex) + edge_sum
        else:
            raise WeightError(f"weight requested for unknown vertex {vertex!r}")
        self._cache[vertex] = weight
        return weight


def compute_weights(graph: PropertyGraph, mode: str, custom_key=None) -> WeightFunction:
    return WeightFunction(graph, mode, custom_key)
