"""In-memory property graph model: graphs, typed values, paths, deletions.

A graph is immutable after construction.  All mutation goes through
:func:`apply_deletions`, which returns a new graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Mapping, Optional

from .errors import GraphError

VALUE_TYPES = ("int", "float", "string", "bool", "timestamp")

# numeric types are mutually comparable, everything else only within its type
_NUMERIC = {"int", "float"}


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 instant; naive inputs are taken as UTC."""
    try:
        ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise GraphError(f"malformed timestamp literal: {text!r}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


@dataclass(frozen=True)
class Value:
    """A typed property value.

    `type` is one of ``int``, ``float``, ``string``, ``bool``, ``timestamp``.
    The type is fixed at ingestion; the only cross-type comparison allowed is
    int vs float by numeric value.
    """

    type: str
    value: object

    def __post_init__(self):
        if self.type not in VALUE_TYPES:
            raise GraphError(f"unknown value type: {self.type!r}")
        expected = {
            "int": int,
            "float": float,
            "string": str,
            "bool": bool,
            "timestamp": datetime,
        }[self.type]
        if self.type == "int" and isinstance(self.value, bool):
            raise GraphError("boolean literal given for int value")
        if not isinstance(self.value, expected):
            raise GraphError(
                f"malformed value literal {self.value!r} for type {self.type!r}"
            )

    def comparable_with(self, other: "Value") -> bool:
        if self.type == other.type:
            return True
        return self.type in _NUMERIC and other.type in _NUMERIC

    @staticmethod
    def from_json(obj: Mapping) -> "Value":
        try:
            vtype, raw = obj["type"], obj["value"]
        except (TypeError, KeyError) as exc:
            raise GraphError(f"malformed property object: {obj!r}") from exc
        if vtype == "timestamp":
            return Value("timestamp", parse_timestamp(raw))
        if vtype == "float" and isinstance(raw, int) and not isinstance(raw, bool):
            raw = float(raw)
        return Value(vtype, raw)

    def to_json(self) -> dict:
        raw = self.value
        if self.type == "timestamp":
            raw = self.value.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")
        return {"type": self.type, "value": raw}


class Direction(Enum):
    FORWARD = "fw"
    REVERSE = "bw"


class _Marker:
    """Singleton trace marker for traversal direction (cannot clash with labels)."""

    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


FW = _Marker("fw")
BW = _Marker("bw")

MARKER = {Direction.FORWARD: FW, Direction.REVERSE: BW}


@dataclass(frozen=True)
class Path:
    """Alternating node/edge sequence; may traverse edges in reverse.

    ``nodes`` has one more element than ``steps``.  Step ``i`` connects
    ``nodes[i]`` to ``nodes[i + 1]``.  No edge id occurs twice (trail).
    """

    nodes: tuple
    steps: tuple  # of (edge_id, Direction)

    def __post_init__(self):
        if not self.nodes:
            raise GraphError("a path must contain at least one node")
        if len(self.nodes) != len(self.steps) + 1:
            raise GraphError("path node/step counts do not alternate")
        edges = [e for e, _ in self.steps]
        if len(edges) != len(set(edges)):
            raise GraphError("path repeats an edge (trail property violated)")

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def objects(self) -> tuple:
        """All node and edge ids on the path, in traversal order."""
        out = [self.nodes[0]]
        for (edge, _), node in zip(self.steps, self.nodes[1:]):
            out.append(edge)
            out.append(node)
        return tuple(out)

    def object_ids(self) -> frozenset:
        return frozenset(self.nodes) | frozenset(e for e, _ in self.steps)


@dataclass(frozen=True)
class DeletionPlan:
    node_deletions: frozenset = frozenset()
    edge_deletions: frozenset = frozenset()
    label_deletions: frozenset = frozenset()  # of (object_id, label)

    def is_empty(self) -> bool:
        return not (self.node_deletions or self.edge_deletions or self.label_deletions)

    def __or__(self, other: "DeletionPlan") -> "DeletionPlan":
        return DeletionPlan(
            self.node_deletions | other.node_deletions,
            self.edge_deletions | other.edge_deletions,
            self.label_deletions | other.label_deletions,
        )

    def size(self) -> int:
        return (
            len(self.node_deletions)
            + len(self.edge_deletions)
            + len(self.label_deletions)
        )


class PropertyGraph:
    """Directed multigraph with label sets and typed key-value properties.

    Node and edge id sets are disjoint; ids are opaque strings ordered
    lexicographically wherever a deterministic tie-break is needed.
    """

    __slots__ = (
        "nodes",
        "edges",
        "endpoints",
        "labels",
        "properties",
        "_out",
        "_in",
    )

    def __init__(self, nodes, edges, endpoints, labels, properties):
        self.nodes = frozenset(nodes)
        self.edges = frozenset(edges)
        self.endpoints = dict(endpoints)
        self.labels = {o: frozenset(ls) for o, ls in labels.items()}
        self.properties = dict(properties)
        self._validate()
        out: dict = {n: [] for n in self.nodes}
        inc: dict = {n: [] for n in self.nodes}
        for e in sorted(self.edges):
            src, dst = self.endpoints[e]
            out[src].append(e)
            inc[dst].append(e)
        self._out = {n: tuple(es) for n, es in out.items()}
        self._in = {n: tuple(es) for n, es in inc.items()}

    def _validate(self):
        overlap = self.nodes & self.edges
        if overlap:
            raise GraphError(f"ids used as both node and edge: {sorted(overlap)}")
        for e in self.edges:
            if e not in self.endpoints:
                raise GraphError(f"edge {e!r} has no endpoints")
            src, dst = self.endpoints[e]
            if src not in self.nodes or dst not in self.nodes:
                raise GraphError(f"edge {e!r} has a dangling endpoint")
        for o in self.nodes | self.edges:
            if o not in self.labels:
                raise GraphError(f"object {o!r} has no label entry")
        for (o, key), value in self.properties.items():
            if o not in self.nodes and o not in self.edges:
                raise GraphError(f"property on unknown object {o!r}")
            if not isinstance(value, Value):
                raise GraphError(f"untyped property value for ({o!r}, {key!r})")

    # -- read API ---------------------------------------------------------

    def objects(self) -> frozenset:
        return self.nodes | self.edges

    def labels_of(self, obj) -> frozenset:
        try:
            return self.labels[obj]
        except KeyError:
            raise GraphError(f"unknown object {obj!r}") from None

    def property(self, obj, key) -> Optional[Value]:
        return self.properties.get((obj, key))

    def out_edges(self, node) -> tuple:
        try:
            return self._out[node]
        except KeyError:
            raise GraphError(f"unknown node {node!r}") from None

    def in_edges(self, node) -> tuple:
        try:
            return self._in[node]
        except KeyError:
            raise GraphError(f"unknown node {node!r}") from None

    def contains_path(self, path: Path) -> bool:
        if any(n not in self.nodes for n in path.nodes):
            return False
        for i, (edge, direction) in enumerate(path.steps):
            if edge not in self.edges:
                return False
            src, dst = self.endpoints[edge]
            a, b = path.nodes[i], path.nodes[i + 1]
            if direction is Direction.FORWARD and (src, dst) != (a, b):
                return False
            if direction is Direction.REVERSE and (src, dst) != (b, a):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, PropertyGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and self.endpoints == other.endpoints
            and self.labels == other.labels
            and self.properties == other.properties
        )

    def __hash__(self):
        return hash((self.nodes, self.edges))

    def __repr__(self):
        return f"<PropertyGraph nodes={len(self.nodes)} edges={len(self.edges)}>"


# -- operations -----------------------------------------------------------


def build_graph(node_records: Iterable[Mapping], edge_records: Iterable[Mapping]) -> PropertyGraph:
    """Assemble a graph from plain record dicts.

    Node records: ``{"id", "labels", "properties"}``; edge records add
    ``"src"`` and ``"dst"``.  Properties map keys to ``{"type", "value"}``
    objects (or ready-made :class:`Value` instances).
    """
    nodes, edges = [], []
    endpoints, labels, properties = {}, {}, {}
    seen = set()

    def ingest(record, *, is_edge):
        try:
            oid = record["id"]
        except KeyError:
            raise GraphError(f"record without id: {record!r}") from None
        if oid in seen:
            raise GraphError(f"duplicate id {oid!r}")
        seen.add(oid)
        labels[oid] = frozenset(record.get("labels", ()))
        for key, raw in (record.get("properties") or {}).items():
            value = raw if isinstance(raw, Value) else Value.from_json(raw)
            properties[(oid, key)] = value
        return oid

    for record in node_records:
        nodes.append(ingest(record, is_edge=False))
    node_set = set(nodes)
    for record in edge_records:
        oid = ingest(record, is_edge=True)
        try:
            src, dst = record["src"], record["dst"]
        except KeyError:
            raise GraphError(f"edge record {oid!r} lacks src/dst") from None
        if src not in node_set or dst not in node_set:
            raise GraphError(f"edge {oid!r} references an undeclared node")
        edges.append(oid)
        endpoints[oid] = (src, dst)
    return PropertyGraph(nodes, edges, endpoints, labels, properties)


def trace(graph: PropertyGraph, path: Path) -> tuple:
    """Extended trace of a path: alternating node/edge label sets.

    Each edge label set additionally contains the :data:`FW` or :data:`BW`
    marker for the traversal direction.  Dropping the markers recovers the
    plain trace.
    """
    for obj in path.object_ids():
        if obj not in graph.nodes and obj not in graph.edges:
            raise GraphError(f"path references unknown object {obj!r}")
    if not graph.contains_path(path):
        raise GraphError("path is not valid in this graph")
    out = [graph.labels_of(path.nodes[0])]
    for (edge, direction), node in zip(path.steps, path.nodes[1:]):
        out.append(graph.labels_of(edge) | {MARKER[direction]})
        out.append(graph.labels_of(node))
    return tuple(out)


def apply_deletions(graph: PropertyGraph, plan: DeletionPlan) -> PropertyGraph:
    """Produce the subgraph with the planned nodes, edges, and labels removed.

    Deleting a node cascades to its incident edges; deleting a label token
    removes exactly that label; properties of survivors are untouched.
    """
    for n in plan.node_deletions:
        if n not in graph.nodes:
            raise GraphError(f"cannot delete unknown node {n!r}")
    for e in plan.edge_deletions:
        if e not in graph.edges:
            raise GraphError(f"cannot delete unknown edge {e!r}")
    for obj, label in plan.label_deletions:
        if label not in graph.labels.get(obj, frozenset()):
            raise GraphError(f"cannot delete missing label ({obj!r}, {label!r})")

    nodes = graph.nodes - plan.node_deletions
    edges = {
        e
        for e in graph.edges - plan.edge_deletions
        if graph.endpoints[e][0] in nodes and graph.endpoints[e][1] in nodes
    }
    removed_labels: dict = {}
    for obj, label in plan.label_deletions:
        removed_labels.setdefault(obj, set()).add(label)
    keep = nodes | edges
    return PropertyGraph(
        nodes,
        edges,
        {e: graph.endpoints[e] for e in edges},
        {o: graph.labels[o] - removed_labels.get(o, set()) for o in keep},
        {(o, k): v for (o, k), v in graph.properties.items() if o in keep},
    )


def incident_edges(graph: PropertyGraph, node) -> frozenset:
    """Edges having `node` as source or target; self-loops counted once."""
    return frozenset(graph.out_edges(node)) | frozenset(graph.in_edges(node))


# -- JSON wire format -----------------------------------------------------


def graph_from_json(data: Mapping) -> PropertyGraph:
    return build_graph(data.get("nodes", []), data.get("edges", []))


def graph_to_json(graph: PropertyGraph) -> dict:
    def props(obj):
        keys = sorted(k for (o, k) in graph.properties if o == obj)
        return {k: graph.properties[(obj, k)].to_json() for k in keys}

    nodes = [
        {"id": n, "labels": sorted(graph.labels_of(n)), "properties": props(n)}
        for n in sorted(graph.nodes)
    ]
    edges = [
        {
            "id": e,
            "src": graph.endpoints[e][0],
            "dst": graph.endpoints[e][1],
            "labels": sorted(graph.labels_of(e)),
            "properties": props(e),
        }
        for e in sorted(graph.edges)
    ]
    return {"nodes": nodes, "edges": edges}


def load_graph(path) -> PropertyGraph:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid graph JSON: {exc}") from exc
    return graph_from_json(data)


def save_graph(graph: PropertyGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_json(graph), fh, indent=2, sort_keys=True)
        fh.write("\n")
