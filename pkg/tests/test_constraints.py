import pytest

from pgrepair.constraints import (
    Concat,
    Constraint,
    EdgePattern,
    FalsePredicate,
    Label,
    NodePattern,
    NowRef,
    PropertyComparison,
    Star,
    Union,
    emit_error_query,
    is_positive,
    min_match_length,
    parse_constraints,
    print_constraint,
    validate_constraint,
)
from pgrepair.errors import ParseError, ValidationError
from pgrepair.model import Direction, Value

from helpers import ACCESS_CONSTRAINT


def test_parse_running_constraint():
    c = parse_constraints(ACCESS_CONSTRAINT)[0]
    assert c.path_vars() == ("z",)
    assert c.node_vars() == ("x", "u", "y")
    assert len(c.filter) == 1
    assert len(c.condition) == 1
    assert isinstance(c.filter[0].right, NowRef)
    assert min_match_length(c.patterns[0][1]) == 2
    assert is_positive(c)


def test_plus_desugars_to_concat_star():
    c = parse_constraints("z = (a)[-[:r]->()]+(b); {} => {false}")[0]
    pattern = c.patterns[0][1]
    text = print_constraint(c)
    assert "]*" in text
    assert min_match_length(pattern) == 1


def test_print_parse_round_trip():
    texts = [
        ACCESS_CONSTRAINT,
        "z = (a)[-[:r]->() | <-[:s]-()](b); {} => {false}",
        'p = (n:alpha & !beta); {n.name = "x"} => {n.level > 1.5}',
        "q = (m); {m.when >= 2024-01-01T00:00:00Z} => {false}",
    ]
    for text in texts:
        first = parse_constraints(text)
        printed = print_constraint(first[0])
        second = parse_constraints(printed)
        assert print_constraint(second[0]) == printed


def test_two_constraints_in_one_file():
    text = "z = (a:alpha)-[:r]->(b); {} => {false}\nw = (c:beta); {} => {false}"
    assert len(parse_constraints(text)) == 2


def test_comments_and_whitespace():
    text = "# header\nz = (a:alpha); {} => {false}  # trailing\n"
    assert len(parse_constraints(text)) == 1


def test_parse_error_reports_position():
    with pytest.raises(ParseError):
        parse_constraints("z = (a:alpha; {} => {false}")
    with pytest.raises(ParseError):
        parse_constraints("z = (a) ???")


def test_label_expression_precedence():
    c = parse_constraints("z = (a:x | y & !w); {} => {false}")[0]
    expr = c.patterns[0][1].label_expr
    # | binds loosest: (x | (y & !w))
    assert expr.evaluate(frozenset({"x"}))
    assert expr.evaluate(frozenset({"y"}))
    assert not expr.evaluate(frozenset({"y", "w"}))


def test_reverse_edge_pattern():
    c = parse_constraints("z = (a)<-[:r]-(b); {} => {false}")[0]
    edge = c.patterns[0][1].children[1]
    assert isinstance(edge, EdgePattern)
    assert edge.direction is Direction.REVERSE


def test_validation_rejects_var_under_star():
    with pytest.raises(ValidationError):
        parse_constraints("z = (a)[-[:r]->(v)]*(b); {} => {false}")


def test_validation_rejects_var_under_union():
    with pytest.raises(ValidationError):
        parse_constraints("z = (a)[-[:r]->(v) | -[:s]->()](b); {} => {false}")


def test_validation_rejects_zero_length_star_body():
    pattern = Concat((NodePattern("a", None), Star(NodePattern(None, None)),
                      NodePattern("b", None)))
    constraint = Constraint((("z", pattern),), (), (FalsePredicate(),))
    with pytest.raises(ValidationError):
        validate_constraint(constraint)


def test_validation_rejects_duplicate_path_vars():
    with pytest.raises(ValidationError):
        parse_constraints(
            "z = (a:x), z = (b:y); {} => {false}"
        )


def test_validation_rejects_unknown_predicate_var():
    with pytest.raises(ValidationError):
        parse_constraints("z = (a); {} => {ghost.level > 1}")


def test_min_match_length_cases():
    c = parse_constraints(
        "z = (a)[-[:r]->()-[:r]->() | -[:s]->()](b); {} => {false}"
    )[0]
    assert min_match_length(c.patterns[0][1]) == 1  # union takes the minimum
    d = parse_constraints("z = (a)[-[:r]->()]*(b); {} => {false}")[0]
    assert min_match_length(d.patterns[0][1]) == 0


def test_false_predicate_and_literals():
    c = parse_constraints(
        'z = (a); {a.ok = true, a.name != "bob"} => {false}'
    )[0]
    assert len(c.filter) == 2
    assert isinstance(c.condition[0], FalsePredicate)
    comparison = c.filter[0]
    assert comparison.right == Value("bool", True)


def test_is_positive_detects_negation():
    assert not is_positive(parse_constraints("z = (a:!x); {} => {false}")[0])
    assert is_positive(parse_constraints("z = (a:x & y); {} => {false}")[0])


def test_emit_error_query_shape():
    c = parse_constraints(ACCESS_CONSTRAINT)[0]
    query = emit_error_query(c)
    assert query.startswith("MATCH z = ")
    assert "FILTER" in query and "RETURN z" in query
    # the condition is negated in the emitted query
    assert "x.access_level < y.access_level" in query
    assert "IS NULL" in query and "NOW()" in query


def test_emit_error_query_empty_predicates():
    c = parse_constraints("z = (a:alpha); {} => {false}")[0]
    query = emit_error_query(c)
    assert "RETURN z" in query
