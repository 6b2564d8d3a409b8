import random

import pytest

from pgrepair.automata import compile_automaton
from pgrepair.constraints import Constraint, FalsePredicate, parse_constraints
from pgrepair.errors import ResourceCapExceeded
from pgrepair.matcher import find_matches, find_violating_matches
from pgrepair.model import build_graph, parse_timestamp, trace

from helpers import (
    NOW,
    access_constraint,
    random_graph,
    random_positive_pattern,
    running_graph,
)
from test_automata import enumerate_trails


def test_violating_matches_running_example():
    g = running_graph()
    c = access_constraint()
    violating = find_violating_matches(g, c, NOW)
    assert len(violating) == 2
    paths = sorted(m.paths()[0].objects for m in violating)
    assert paths == [
        ("p1", "w1", "t1", "r1", "d1", "r3", "d3"),
        ("p1", "w1", "t1", "r1", "d1", "r4", "d3"),
    ]
    for m in violating:
        assert m.node("x") == "p1"
        assert m.node("u") == "t1"
        assert m.node("y") == "d3"


def test_satisfying_match_not_violating():
    # the y = d1 match satisfies the condition (6 >= 3), so only the two
    # d3 matches violate
    g = running_graph()
    c = access_constraint()
    all_matches = find_matches(g, c)
    ends = sorted(m.paths()[0].nodes[-1] for m in all_matches)
    assert ends == ["d1", "d3", "d3"]


def test_missing_property_fails_filter():
    g = build_graph(
        [{"id": "a", "labels": ["person"], "properties": {}}], []
    )
    c = parse_constraints("z = (v:person); {v.level > 1} => {false}")[0]
    # filter never passes, so nothing violates despite condition false
    assert find_violating_matches(g, c, NOW) == []


def test_missing_property_fails_condition():
    g = build_graph(
        [{"id": "a", "labels": ["person"], "properties": {}}], []
    )
    c = parse_constraints("z = (v:person); {} => {v.level > 1}")[0]
    assert len(find_violating_matches(g, c, NOW)) == 1


def test_incomparable_types_false():
    g = build_graph(
        [{"id": "a", "labels": [],
          "properties": {"x": {"type": "string", "value": "5"}}}], []
    )
    c = parse_constraints("z = (v); {} => {v.x >= 5}")[0]
    assert len(find_violating_matches(g, c, NOW)) == 1


def test_int_float_comparable():
    g = build_graph(
        [{"id": "a", "labels": [],
          "properties": {"x": {"type": "int", "value": 5}}}], []
    )
    c = parse_constraints("z = (v); {} => {v.x >= 4.5}")[0]
    assert find_violating_matches(g, c, NOW) == []


def test_now_predicate():
    g = build_graph(
        [{"id": "a", "labels": [],
          "properties": {"t": {"type": "timestamp",
                               "value": "2024-03-01T09:00:00Z"}}}], []
    )
    c = parse_constraints("z = (v); {v.t <= NOW} => {false}")[0]
    past = parse_timestamp("2023-01-01T00:00:00Z")
    future = parse_timestamp("2025-01-01T00:00:00Z")
    assert find_violating_matches(g, c, past) == []
    assert len(find_violating_matches(g, c, future)) == 1


def test_node_equality_predicate():
    g = build_graph(
        [{"id": "a", "labels": ["t"], "properties": {}},
         {"id": "b", "labels": ["t"], "properties": {}}],
        [{"id": "e", "src": "a", "dst": "b", "labels": [], "properties": {}}],
    )
    c = parse_constraints("z = (u:t)-[]->(v:t); {} => {u = v}")[0]
    assert len(find_violating_matches(g, c, NOW)) == 1
    c2 = parse_constraints("z = (u:t)-[]->(v:t); {} => {u != v}")[0]
    assert find_violating_matches(g, c2, NOW) == []


def test_shared_variable_join():
    g = running_graph()
    text = ("z = (x:person)-[:works_on]->(u:task), "
            "w = (u)-[:references]->(y:document); {} => {false}")
    c = parse_constraints(text)[0]
    matches = find_matches(g, c)
    # the task variable u must coincide across both paths
    assert len(matches) == 2
    for m in matches:
        assert m.paths()[0].nodes[-1] == m.paths()[1].nodes[0] == "t1"


def test_trail_semantics_on_cycle():
    g = build_graph(
        [{"id": "a", "labels": ["s"], "properties": {}},
         {"id": "b", "labels": [], "properties": {}}],
        [{"id": "e1", "src": "a", "dst": "b", "labels": ["r"], "properties": {}},
         {"id": "e2", "src": "b", "dst": "a", "labels": ["r"], "properties": {}}],
    )
    c = parse_constraints("z = (u:s)[-[:r]->()]*(v); {} => {false}")[0]
    matches = find_matches(g, c)
    lengths = sorted(m.paths()[0].length for m in matches)
    # trail semantics: each edge at most once per path, so lengths 0, 1, 2
    assert lengths == [0, 1, 2]


def test_max_matches_cap():
    g = running_graph()
    c = access_constraint()
    with pytest.raises(ResourceCapExceeded):
        find_matches(g, c, max_matches=1)


def test_matches_agree_with_automaton_on_random_graphs():
    rng = random.Random(7)
    for _ in range(15):
        g = random_graph(rng, max_nodes=5, max_edges=7)
        pattern = random_positive_pattern(rng, max_steps=2)
        constraint = Constraint((("z", pattern),), (), (FalsePredicate(),))
        automaton = compile_automaton(pattern)
        expected = {
            (p.objects, tuple(d.value for _, d in p.steps))
            for p in enumerate_trails(g, len(g.edges))
            if automaton.accepts_sequence(trace(g, p))
        }
        got = {
            (m.paths()[0].objects,
             tuple(d.value for _, d in m.paths()[0].steps))
            for m in find_matches(g, constraint, max_matches=100_000)
        }
        assert got == expected


def test_deterministic_order():
    g = running_graph()
    c = access_constraint()
    a = [m.sort_key() for m in find_matches(g, c)]
    b = [m.sort_key() for m in find_matches(g, c)]
    assert a == b == sorted(a)
