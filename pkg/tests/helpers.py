"""Shared fixtures and independent oracles for the test suite.

The oracles deliberately avoid the library's automaton and solver code:
trace acceptance is decided by structural recursion on the pattern, and
covers are checked by exhaustive subset search.
"""

import random

from pgrepair.constraints import (
    Concat,
    EdgePattern,
    Label,
    NodePattern,
    Star,
    Top,
    Union,
    parse_constraints,
)
from pgrepair.model import BW, FW, Direction, build_graph, parse_timestamp

NOW = parse_timestamp("2025-06-01T00:00:00Z")

ACCESS_CONSTRAINT = (
    "z = (x:person)-[:works_on]->(u:task)"
    "[-[:references]->(:document)]+"
    "(y:document & important); "
    "{u.start <= NOW} => {x.access_level >= y.access_level}"
)


def running_graph():
    """Small project graph: one person, one task, three documents."""
    nodes = [
        {"id": "p1", "labels": ["person"],
         "properties": {"access_level": {"type": "int", "value": 6}}},
        {"id": "t1", "labels": ["task"],
         "properties": {"start": {"type": "timestamp",
                                  "value": "2024-03-01T09:00:00Z"}}},
        {"id": "d1", "labels": ["document", "important"],
         "properties": {"access_level": {"type": "int", "value": 3}}},
        {"id": "d2", "labels": ["document"], "properties": {}},
        {"id": "d3", "labels": ["document", "important"],
         "properties": {"access_level": {"type": "int", "value": 7}}},
    ]
    edges = [
        {"id": "w1", "src": "p1", "dst": "t1", "labels": ["works_on"],
         "properties": {}},
        {"id": "r1", "src": "t1", "dst": "d1", "labels": ["references"],
         "properties": {}},
        {"id": "r2", "src": "t1", "dst": "d2", "labels": ["references"],
         "properties": {}},
        {"id": "r3", "src": "d1", "dst": "d3", "labels": ["references"],
         "properties": {}},
        {"id": "r4", "src": "d1", "dst": "d3", "labels": ["references"],
         "properties": {}},
    ]
    return build_graph(nodes, edges)


def access_constraint():
    return parse_constraints(ACCESS_CONSTRAINT)[0]


# -- trace acceptance oracle ----------------------------------------------


def oracle_accepts(pattern, sets) -> bool:
    """Structural recursion on the pattern over an extended trace.

    `sets` is the full alternating sequence of label sets (odd length),
    edge sets already carrying their direction marker.
    """
    if isinstance(pattern, NodePattern):
        expr = pattern.label_expr if pattern.label_expr is not None else Top()
        return len(sets) == 1 and expr.evaluate(sets[0])
    if isinstance(pattern, EdgePattern):
        if len(sets) != 3:
            return False
        marker = FW if pattern.direction is Direction.FORWARD else BW
        expr = pattern.label_expr if pattern.label_expr is not None else Top()
        return marker in sets[1] and expr.evaluate(sets[1])
    if isinstance(pattern, Concat):
        return _oracle_concat(pattern.children, sets)
    if isinstance(pattern, Union):
        return any(oracle_accepts(child, sets) for child in pattern.children)
    if isinstance(pattern, Star):
        if len(sets) == 1:
            return True
        for cut in range(2, len(sets), 2):
            if oracle_accepts(pattern.child, sets[: cut + 1]) and oracle_accepts(
                pattern, sets[cut:]
            ):
                return True
        return False
    raise TypeError(pattern)


def _oracle_concat(children, sets) -> bool:
    if len(children) == 1:
        return oracle_accepts(children[0], sets)
    head, rest = children[0], children[1:]
    for cut in range(0, len(sets), 2):
        if oracle_accepts(head, sets[: cut + 1]) and _oracle_concat(
            rest, sets[cut:]
        ):
            return True
    return False


# -- random structure generators ------------------------------------------


def random_graph(rng: random.Random, max_nodes=15, max_edges=25, max_labels=4):
    """Random labelled multigraph with a few numeric properties."""
    label_pool = ["alpha", "beta", "gamma", "delta"][:max_labels]
    n_nodes = rng.randint(2, max_nodes)
    nodes = []
    for i in range(n_nodes):
        labels = rng.sample(label_pool, rng.randint(0, min(2, len(label_pool))))
        props = {}
        if rng.random() < 0.7:
            props["level"] = {"type": "int", "value": rng.randint(0, 5)}
        nodes.append({"id": f"n{i}", "labels": labels, "properties": props})
    n_edges = rng.randint(1, max_edges)
    edges = []
    for j in range(n_edges):
        src = f"n{rng.randrange(n_nodes)}"
        dst = f"n{rng.randrange(n_nodes)}"
        labels = rng.sample(label_pool, rng.randint(0, min(2, len(label_pool))))
        edges.append(
            {"id": f"e{j}", "src": src, "dst": dst, "labels": labels,
             "properties": {}}
        )
    return build_graph(nodes, edges)


def random_positive_pattern(rng: random.Random, max_steps=3):
    """Variable-free positive pattern of 1..max_steps edge steps."""
    label_pool = ["alpha", "beta", "gamma", "delta"]

    def label_expr():
        roll = rng.random()
        if roll < 0.35:
            return None
        if roll < 0.85:
            return Label(rng.choice(label_pool))
        return Top()

    def node():
        return NodePattern(None, label_expr())

    def edge():
        direction = Direction.FORWARD if rng.random() < 0.8 else Direction.REVERSE
        return EdgePattern(direction, label_expr())

    steps = rng.randint(1, max_steps)
    parts = [node()]
    for _ in range(steps):
        parts.append(edge())
        parts.append(node())
    pattern = Concat(tuple(parts))
    if rng.random() < 0.3:
        # make one edge-node hop repeatable
        pattern = Concat(
            tuple(parts) + (Star(Concat((edge(), node()))),)
        )
    return pattern


def random_positive_constraint_text(rng: random.Random):
    """Positive single-path constraint with endpoint variables."""
    label_pool = ["alpha", "beta", "gamma", "delta"]

    def expr():
        roll = rng.random()
        if roll < 0.5:
            return ":" + rng.choice(label_pool)
        if roll < 0.7:
            return ":" + rng.choice(label_pool) + " | " + rng.choice(label_pool)
        return ""

    steps = rng.randint(1, 3)
    parts = ["(a{})".format(expr())]
    for i in range(steps):
        if rng.random() < 0.85:
            arrow = "-[{}]->".format(expr())
        else:
            arrow = "<-[{}]-".format(expr())
        var = "b" if i == steps - 1 else ""
        parts.append(arrow + "({}{})".format(var, expr()))
    body = "".join(parts)
    op = rng.choice(["<=", ">=", "<", ">"])
    bound = rng.randint(0, 5)
    return f"z = {body}; {{}} => {{a.level {op} {bound}}}"
