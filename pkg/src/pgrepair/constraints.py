"""Constraint language front end: AST, parser, validator, and query emission.

Concrete grammar (one constraint per stanza, ``#`` starts a comment):

    constraint  ::= binding ("," binding)* ";" "{" preds "}" "=>" "{" preds "}"
    binding     ::= pathvar "=" pattern
    pattern     ::= element+
    element     ::= node | edge | group
    node        ::= "(" [var] [":" labelexpr] ")"
    edge        ::= "-[" [":" labelexpr] "]->"  |  "<-[" [":" labelexpr] "]-"
    group       ::= "[" pattern ("|" pattern)* "]" ["*" | "+"]
    labelexpr   ::= disjunction of "&"-conjunctions of ["!"] atoms
    preds       ::= [pred ("," pred)*]
    pred        ::= "false" | var ("=" | "!=") var
                  | var "." key OP (var "." key | literal | "NOW")
    OP          ::= "=" | "!=" | "<=" | ">=" | "<" | ">"

Literals are integers, floats, quoted strings, ``true``/``false``, or
ISO-8601 dates/timestamps.  ``+`` desugars to one copy followed by a star.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union as TUnion

from .errors import ParseError, ValidationError
from .model import Direction, Value, parse_timestamp

# -- label expressions ----------------------------------------------------


class LabelExpr:
    """Propositional formula evaluated against an object's label set."""

    def evaluate(self, labels) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Top(LabelExpr):
    def evaluate(self, labels):
        return True

    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Label(LabelExpr):
    # symbol is a label string; the automata module also instantiates this
    # with direction markers, which never appear in parsed constraints
    symbol: object

    def evaluate(self, labels):
        return self.symbol in labels

    def __str__(self):
        return str(self.symbol)


@dataclass(frozen=True)
class Not(LabelExpr):
    child: LabelExpr

    def evaluate(self, labels):
        return not self.child.evaluate(labels)

    def __str__(self):
        return f"!{_wrap(self.child, (And, Or))}"


@dataclass(frozen=True)
class And(LabelExpr):
    left: LabelExpr
    right: LabelExpr

    def evaluate(self, labels):
        return self.left.evaluate(labels) and self.right.evaluate(labels)

    def __str__(self):
        return f"{_wrap(self.left, (Or,))} & {_wrap(self.right, (Or,))}"


@dataclass(frozen=True)
class Or(LabelExpr):
    left: LabelExpr
    right: LabelExpr

    def evaluate(self, labels):
        return self.left.evaluate(labels) or self.right.evaluate(labels)

    def __str__(self):
        return f"{self.left} | {self.right}"


def _wrap(expr, tighter) -> str:
    return f"({expr})" if isinstance(expr, tighter) else str(expr)


def expr_has_negation(expr: LabelExpr) -> bool:
    if isinstance(expr, Not):
        return True
    if isinstance(expr, (And, Or)):
        return expr_has_negation(expr.left) or expr_has_negation(expr.right)
    return False


def expr_labels(expr: LabelExpr) -> frozenset:
    if isinstance(expr, Label):
        return frozenset([expr.symbol])
    if isinstance(expr, Not):
        return expr_labels(expr.child)
    if isinstance(expr, (And, Or)):
        return expr_labels(expr.left) | expr_labels(expr.right)
    return frozenset()


# -- path patterns --------------------------------------------------------


@dataclass(frozen=True)
class NodePattern:
    var: Optional[str] = None
    label_expr: Optional[LabelExpr] = None


@dataclass(frozen=True)
class EdgePattern:
    direction: Direction = Direction.FORWARD
    label_expr: Optional[LabelExpr] = None


@dataclass(frozen=True)
class Concat:
    children: tuple


@dataclass(frozen=True)
class Union:
    children: tuple


@dataclass(frozen=True)
class Star:
    child: object


PathPattern = TUnion[NodePattern, EdgePattern, Concat, Union, Star]


def pattern_children(pattern):
    if isinstance(pattern, Concat):
        return pattern.children
    if isinstance(pattern, Union):
        return pattern.children
    if isinstance(pattern, Star):
        return (pattern.child,)
    return ()


def pattern_node_vars(pattern) -> tuple:
    """Node variables in syntactic order (may repeat)."""
    if isinstance(pattern, NodePattern):
        return (pattern.var,) if pattern.var else ()
    out = []
    for child in pattern_children(pattern):
        out.extend(pattern_node_vars(child))
    return tuple(out)


def pattern_labels(pattern) -> frozenset:
    if isinstance(pattern, (NodePattern, EdgePattern)):
        return expr_labels(pattern.label_expr) if pattern.label_expr else frozenset()
    out = frozenset()
    for child in pattern_children(pattern):
        out |= pattern_labels(child)
    return out


def min_match_length(pattern) -> int:
    """Minimum number of edges on any path the pattern can match."""
    if isinstance(pattern, NodePattern):
        return 0
    if isinstance(pattern, EdgePattern):
        return 1
    if isinstance(pattern, Concat):
        return sum(min_match_length(c) for c in pattern.children)
    if isinstance(pattern, Union):
        return min(min_match_length(c) for c in pattern.children)
    if isinstance(pattern, Star):
        return 0
    raise TypeError(f"not a path pattern: {pattern!r}")


# -- predicates -----------------------------------------------------------


@dataclass(frozen=True)
class PropRef:
    var: str
    key: str

    def __str__(self):
        return f"{self.var}.{self.key}"


@dataclass(frozen=True)
class NowRef:
    def __str__(self):
        return "NOW"


@dataclass(frozen=True)
class FalsePredicate:
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class NodeComparison:
    """``x = y`` or ``x != y`` over node identities."""

    left: str
    op: str  # "=" or "!="
    right: str

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class PropertyComparison:
    """``x.a OP y.b`` or ``x.a OP constant`` (constant may be NOW)."""

    left: PropRef
    op: str  # one of = != <= >= < >
    right: object  # PropRef | Value | NowRef

    def __str__(self):
        if isinstance(self.right, Value):
            return f"{self.left} {self.op} {_print_literal(self.right)}"
        return f"{self.left} {self.op} {self.right}"


Predicate = TUnion[FalsePredicate, NodeComparison, PropertyComparison]

COMPARISON_OPS = ("=", "!=", "<=", ">=", "<", ">")


def predicate_vars(pred) -> tuple:
    if isinstance(pred, NodeComparison):
        return (pred.left, pred.right)
    if isinstance(pred, PropertyComparison):
        if isinstance(pred.right, PropRef):
            return (pred.left.var, pred.right.var)
        return (pred.left.var,)
    return ()


def _print_literal(value: Value) -> str:
    if value.type == "string":
        escaped = value.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if value.type == "bool":
        return "true" if value.value else "false"
    if value.type == "timestamp":
        return value.to_json()["value"]
    return repr(value.value)


# -- constraints ----------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    """A graph pattern with filter and condition predicate sets.

    The graph satisfies the constraint when every match of the pattern that
    passes every filter predicate also satisfies every condition predicate.
    """

    patterns: tuple  # of (path_var, PathPattern)
    filter: tuple  # of Predicate
    condition: tuple  # of Predicate

    def node_vars(self) -> tuple:
        seen, out = set(), []
        for _, pattern in self.patterns:
            for var in pattern_node_vars(pattern):
                if var not in seen:
                    seen.add(var)
                    out.append(var)
        return tuple(out)

    def path_vars(self) -> tuple:
        return tuple(z for z, _ in self.patterns)


def is_positive(constraint: Constraint) -> bool:
    """True when no label expression anywhere in the pattern uses negation."""

    def check(pattern):
        if isinstance(pattern, (NodePattern, EdgePattern)):
            return pattern.label_expr is None or not expr_has_negation(pattern.label_expr)
        return all(check(c) for c in pattern_children(pattern))

    return all(check(p) for _, p in constraint.patterns)


def validate_constraint(constraint: Constraint) -> None:
    """Enforce the structural well-formedness rules; raise ValidationError."""
    path_vars = [z for z, _ in constraint.patterns]
    if len(path_vars) != len(set(path_vars)):
        raise ValidationError("duplicate path variable")

    def check(pattern, under_repetition_or_union):
        if isinstance(pattern, NodePattern):
            if pattern.var and under_repetition_or_union:
                raise ValidationError(
                    f"node variable {pattern.var!r} under union or repetition"
                )
        elif isinstance(pattern, Star):
            if min_match_length(pattern.child) < 1:
                raise ValidationError("repetition body may match a zero-length path")
            check(pattern.child, True)
        elif isinstance(pattern, Union):
            for child in pattern.children:
                check(child, True)
        elif isinstance(pattern, Concat):
            for child in pattern.children:
                check(child, under_repetition_or_union)

    for _, pattern in constraint.patterns:
        check(pattern, False)

    node_vars = set(constraint.node_vars())
    if node_vars & set(path_vars):
        raise ValidationError("path variables and node variables must be disjoint")
    for pred in constraint.filter + constraint.condition:
        for var in predicate_vars(pred):
            if var not in node_vars:
                raise ValidationError(f"predicate over unknown variable {var!r}")


# -- lexer ----------------------------------------------------------------

_TIMESTAMP_RE = re.compile(
    r"\d{4}-\d{2}-\d{2}(?:[T ]\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?(?:Z|[+-]\d{2}:\d{2})?)?"
)
_NUMBER_RE = re.compile(r"\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_STRING_RE = re.compile(r'"(?:[^"\\]|\\.)*"' + r"|'(?:[^'\\]|\\.)*'")
_SYMBOLS = ("=>", "!=", "<=", ">=")
_SINGLE = "(),;{}[]|&!*+<>=-.:"


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "number", "timestamp", "string", or the symbol itself
    text: str
    line: int
    column: int


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        match = _TIMESTAMP_RE.match(text, i)
        if match:
            tokens.append(_Token("timestamp", match.group(), line, col))
        else:
            match = _NUMBER_RE.match(text, i)
            if match:
                tokens.append(_Token("number", match.group(), line, col))
            else:
                match = _STRING_RE.match(text, i)
                if match:
                    tokens.append(_Token("string", match.group(), line, col))
                else:
                    match = _IDENT_RE.match(text, i)
                    if match:
                        tokens.append(_Token("ident", match.group(), line, col))
        if match:
            col += match.end() - i
            i = match.end()
            continue
        two = text[i : i + 2]
        if two in _SYMBOLS:
            tokens.append(_Token(two, two, line, col))
            i += 2
            col += 2
            continue
        if ch in _SINGLE:
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    return tokens


# -- parser ---------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, offset=0) -> Optional[_Token]:
        index = self.pos + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def at(self, kind) -> bool:
        token = self.peek()
        return token is not None and token.kind == kind

    def take(self) -> _Token:
        token = self.peek()
        if token is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return token

    def expect(self, kind) -> _Token:
        token = self.peek()
        if token is None:
            raise ParseError(f"expected {kind!r} but input ended")
        if token.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {token.text!r}", token.line, token.column
            )
        self.pos += 1
        return token

    # constraint ::= binding ("," binding)* ";" "{" preds "}" "=>" "{" preds "}"
    def constraint(self) -> Constraint:
        bindings = [self.binding()]
        while self.at(","):
            self.take()
            bindings.append(self.binding())
        self.expect(";")
        self.expect("{")
        filters = self.predicates()
        self.expect("}")
        self.expect("=>")
        self.expect("{")
        conditions = self.predicates()
        self.expect("}")
        return Constraint(tuple(bindings), tuple(filters), tuple(conditions))

    def binding(self):
        var = self.expect("ident").text
        self.expect("=")
        return (var, self.pattern(stop={";", ",", "]", "|"}))

    def pattern(self, stop):
        elements = []
        while True:
            token = self.peek()
            if token is None or token.kind in stop:
                break
            elements.append(self.element())
        if not elements:
            token = self.peek()
            raise ParseError(
                "empty path pattern",
                token.line if token else None,
                token.column if token else None,
            )
        return elements[0] if len(elements) == 1 else Concat(tuple(elements))

    def element(self):
        token = self.peek()
        if token.kind == "(":
            return self.node_pattern()
        if token.kind == "-" or token.kind == "<":
            return self.edge_pattern()
        if token.kind == "[":
            return self.group()
        raise ParseError(
            f"expected a node, edge, or group, found {token.text!r}",
            token.line,
            token.column,
        )

    def node_pattern(self):
        self.expect("(")
        var = None
        expr = None
        if self.at("ident"):
            var = self.take().text
        if self.at(":"):
            self.take()
            expr = self.label_expr()
        self.expect(")")
        return NodePattern(var, expr)

    def edge_pattern(self):
        reverse = False
        if self.at("<"):
            self.take()
            reverse = True
        self.expect("-")
        self.expect("[")
        expr = None
        if self.at(":"):
            self.take()
            expr = self.label_expr()
        self.expect("]")
        self.expect("-")
        if not reverse:
            self.expect(">")
        direction = Direction.REVERSE if reverse else Direction.FORWARD
        return EdgePattern(direction, expr)

    def group(self):
        self.expect("[")
        branches = [self.pattern(stop={"]", "|"})]
        while self.at("|"):
            self.take()
            branches.append(self.pattern(stop={"]", "|"}))
        self.expect("]")
        inner = branches[0] if len(branches) == 1 else Union(tuple(branches))
        if self.at("*"):
            self.take()
            return Star(inner)
        if self.at("+"):
            self.take()
            return Concat((inner, Star(inner)))
        return inner

    # labelexpr with precedence ! > & > |
    def label_expr(self):
        expr = self.label_and()
        while self.at("|"):
            self.take()
            expr = Or(expr, self.label_and())
        return expr

    def label_and(self):
        expr = self.label_not()
        while self.at("&"):
            self.take()
            expr = And(expr, self.label_not())
        return expr

    def label_not(self):
        if self.at("!"):
            self.take()
            return Not(self.label_not())
        if self.at("("):
            self.take()
            expr = self.label_expr()
            self.expect(")")
            return expr
        token = self.expect("ident")
        if token.text == "true":
            return Top()
        return Label(token.text)

    def predicates(self):
        preds = []
        while not self.at("}"):
            preds.append(self.predicate())
            if self.at(","):
                self.take()
            else:
                break
        return preds

    def predicate(self):
        token = self.peek()
        if token is not None and token.kind == "ident" and token.text == "false":
            nxt = self.peek(1)
            if nxt is None or nxt.kind in {",", "}"}:
                self.take()
                return FalsePredicate()
        var = self.expect("ident").text
        if self.at("."):
            self.take()
            key = self.expect("ident").text
            op = self.comparison_op()
            return PropertyComparison(PropRef(var, key), op, self.term())
        op_token = self.take()
        if op_token.kind not in ("=", "!="):
            raise ParseError(
                f"expected '=' or '!=' between node variables, found {op_token.text!r}",
                op_token.line,
                op_token.column,
            )
        right = self.expect("ident").text
        return NodeComparison(var, op_token.kind, right)

    def comparison_op(self) -> str:
        token = self.take()
        if token.kind not in COMPARISON_OPS:
            raise ParseError(
                f"expected a comparison operator, found {token.text!r}",
                token.line,
                token.column,
            )
        return token.kind

    def term(self):
        token = self.peek()
        if token is None:
            raise ParseError("expected a term but input ended")
        if token.kind == "ident":
            if token.text == "NOW":
                self.take()
                return NowRef()
            if token.text in ("true", "false"):
                self.take()
                return Value("bool", token.text == "true")
            var = self.take().text
            self.expect(".")
            key = self.expect("ident").text
            return PropRef(var, key)
        if token.kind == "timestamp":
            self.take()
            return Value("timestamp", parse_timestamp(token.text))
        negative = False
        if token.kind == "-":
            self.take()
            negative = True
            token = self.peek()
        if token is not None and token.kind == "number":
            self.take()
            text = token.text
            if "." in text or "e" in text or "E" in text:
                number = Value("float", -float(text) if negative else float(text))
            else:
                number = Value("int", -int(text) if negative else int(text))
            return number
        if token is not None and token.kind == "string":
            self.take()
            raw = token.text[1:-1]
            raw = re.sub(r"\\(.)", r"\1", raw)
            return Value("string", raw)
        raise ParseError(
            f"expected a literal or property reference, found {token.text!r}",
            token.line,
            token.column,
        )


def parse_constraints(text: str) -> list:
    """Parse a constraint file into validated Constraint ASTs."""
    parser = _Parser(text)
    constraints = []
    while parser.peek() is not None:
        constraint = parser.constraint()
        validate_constraint(constraint)
        constraints.append(constraint)
    return constraints


def load_constraints(path) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_constraints(fh.read())


# -- canonical printer ----------------------------------------------------


def print_pattern(pattern) -> str:
    if isinstance(pattern, NodePattern):
        inner = pattern.var or ""
        if pattern.label_expr is not None:
            inner += f":{pattern.label_expr}"
        return f"({inner})"
    if isinstance(pattern, EdgePattern):
        body = f":{pattern.label_expr}" if pattern.label_expr is not None else ""
        if pattern.direction is Direction.FORWARD:
            return f"-[{body}]->"
        return f"<-[{body}]-"
    if isinstance(pattern, Concat):
        return "".join(print_pattern(c) for c in pattern.children)
    if isinstance(pattern, Union):
        return "[" + " | ".join(print_pattern(c) for c in pattern.children) + "]"
    if isinstance(pattern, Star):
        return f"[{print_pattern(pattern.child)}]*"
    raise TypeError(f"not a path pattern: {pattern!r}")


def print_constraint(constraint: Constraint) -> str:
    bindings = ", ".join(f"{z} = {print_pattern(p)}" for z, p in constraint.patterns)
    filters = ", ".join(str(p) for p in constraint.filter)
    conditions = ", ".join(str(p) for p in constraint.condition)
    return f"{bindings}; {{{filters}}} => {{{conditions}}}"


# -- error-query emission -------------------------------------------------

_NEGATED_OP = {"=": "<>", "!=": "=", "<=": ">", ">=": "<", "<": ">=", ">": "<="}
_GQL_OP = {"=": "=", "!=": "<>", "<=": "<=", ">=": ">=", "<": "<", ">": ">"}


def _gql_term(term) -> str:
    if isinstance(term, NowRef):
        return "NOW()"
    if isinstance(term, Value):
        return _print_literal(term)
    return str(term)


def _gql_pattern(pattern) -> str:
    if isinstance(pattern, NodePattern):
        return print_pattern(pattern)
    if isinstance(pattern, EdgePattern):
        return print_pattern(pattern)
    if isinstance(pattern, Concat):
        return "".join(_gql_pattern(c) for c in pattern.children)
    if isinstance(pattern, Union):
        return "(" + "|".join(_gql_pattern(c) for c in pattern.children) + ")"
    if isinstance(pattern, Star):
        # re-sugar X X* to (X)+ for readability
        return f"({_gql_pattern(pattern.child)})*"
    raise TypeError(f"not a path pattern: {pattern!r}")


def _prop_refs(pred) -> list:
    refs = []
    if isinstance(pred, PropertyComparison):
        refs.append(pred.left)
        if isinstance(pred.right, PropRef):
            refs.append(pred.right)
    return refs


def _render_pred(pred) -> str:
    if isinstance(pred, FalsePredicate):
        return "FALSE"
    if isinstance(pred, NodeComparison):
        return f"{pred.left} {_GQL_OP[pred.op]} {pred.right}"
    return f"{pred.left} {_GQL_OP[pred.op]} {_gql_term(pred.right)}"


def _render_negated_pred(pred) -> str:
    if isinstance(pred, FalsePredicate):
        return "TRUE"
    if isinstance(pred, NodeComparison):
        return f"{pred.left} {_GQL_OP[_NEGATED_OP[pred.op]]} {pred.right}"
    return f"{pred.left} {_NEGATED_OP[pred.op]} {_gql_term(pred.right)}"


def emit_error_query(constraint: Constraint) -> str:
    """Render the constraint as a GQL-style error query (informational only).

    The query matches exactly the violating matches: it asserts the filter
    (with existence guards for every property it reads) and the negation of
    the condition (missing properties count as violations).
    """
    lines = []
    for z, pattern in constraint.patterns:
        if isinstance(pattern, Concat):
            body = "".join(_gql_pattern(c) for c in pattern.children)
        else:
            body = _gql_pattern(pattern)
        lines.append(f"MATCH {z} = {body}")

    conjuncts = []
    guarded = set()
    for pred in constraint.filter:
        for ref in _prop_refs(pred):
            if ref not in guarded:
                guarded.add(ref)
                conjuncts.append(f"{ref} IS NOT NULL")
        conjuncts.append(_render_pred(pred))

    disjuncts = []
    for pred in constraint.condition:
        disjuncts.append(_render_negated_pred(pred))
        for ref in _prop_refs(pred):
            disjuncts.append(f"{ref} IS NULL")
    if disjuncts:
        conjuncts.append("(" + " OR ".join(disjuncts) + ")")
    if not conjuncts:
        conjuncts.append("TRUE")

    lines.append("FILTER " + " AND ".join(conjuncts))
    lines.append("RETURN " + ", ".join(constraint.path_vars()))
    return "\n".join(lines)
