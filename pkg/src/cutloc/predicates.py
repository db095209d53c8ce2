"""A small boolean expression language for whole-state assertions.

Predicates are written as `id: EXPR`, e.g. `inv1: x + y = 10`. EXPR is a
disjunction/conjunction of comparisons over variable names, numeric and
string literals, with + - * arithmetic on numbers. Comparison operators
accept both the ASCII spellings (=, !=, <=, >=) and the symbols
(≠, ≤, ≥); `×` is accepted for multiplication.

Evaluation is total over complete bindings: any type mismatch (arithmetic
on strings, ordering booleans, comparing a number with a string) raises
EvalTypeError, which callers surface as an Unevaluable outcome rather
than a crash.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import PredicateSyntaxError
from .graph import Scalar

Value = Union[bool, int, float, str]


class EvalTypeError(Exception):
    """Operands had types the operator does not accept."""


# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: Value


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "not" | "neg"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # "or" "and" "=" "!=" "<" "<=" ">" ">=" "+" "-" "*"
    left: "Expr"
    right: "Expr"


Expr = Union[Literal, Var, Unary, Binary]


def referenced_vars(expr: Expr) -> frozenset[str]:
    if isinstance(expr, Var):
        return frozenset({expr.name})
    if isinstance(expr, Unary):
        return referenced_vars(expr.operand)
    if isinstance(expr, Binary):
        return referenced_vars(expr.left) | referenced_vars(expr.right)
    return frozenset()


def _is_number(v: Value) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _type_name(v: Value) -> str:
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, (int, float)):
        return "number"
    return "string"


def _require_bool(v: Value, op: str) -> bool:
    if not isinstance(v, bool):
        raise EvalTypeError(f"{op!r} needs boolean operands, got {_type_name(v)}")
    return v


def _require_number(v: Value, op: str) -> Union[int, float]:
    if not _is_number(v):
        raise EvalTypeError(f"{op!r} needs numeric operands, got {_type_name(v)}")
    return v  # type: ignore[return-value]


def evaluate(expr: Expr, bindings: Mapping[str, Scalar]) -> Value:
    """Evaluate with every referenced variable bound; raises EvalTypeError
    on operand type mismatches and KeyError on unbound variables."""
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Var):
        return bindings[expr.name]
    if isinstance(expr, Unary):
        v = evaluate(expr.operand, bindings)
        if expr.op == "not":
            return not _require_bool(v, "not")
        return -_require_number(v, "-")
    left = evaluate(expr.left, bindings)
    right = evaluate(expr.right, bindings)
    op = expr.op
    if op in ("or", "and"):
        l, r = _require_bool(left, op), _require_bool(right, op)
        return (l or r) if op == "or" else (l and r)
    if op in ("+", "-", "*"):
        l, r = _require_number(left, op), _require_number(right, op)
        if op == "+":
            return l + r
        if op == "-":
            return l - r
        return l * r
    if op in ("=", "!="):
        same_kind = (
            (_is_number(left) and _is_number(right))
            or (isinstance(left, bool) and isinstance(right, bool))
            or (isinstance(left, str) and isinstance(right, str))
        )
        if not same_kind:
            raise EvalTypeError(
                f"cannot compare {_type_name(left)} with {_type_name(right)}"
            )
        return (left == right) if op == "=" else (left != right)
    # ordered comparisons
    l, r = _require_number(left, op), _require_number(right, op)
    if op == "<":
        return l < r
    if op == "<=":
        return l <= r
    if op == ">":
        return l > r
    if op == ">=":
        return l >= r
    raise AssertionError(f"unknown operator {op!r}")


# -- parsing ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<string>"[^"]*")
  | (?P<name>[a-zA-Z_][a-zA-Z0-9_]*)
  | (?P<op><=|>=|!=|≤|≥|≠|[=<>+\-*×()])
    """,
    re.VERBOSE,
)

_OP_ALIASES = {"≤": "<=", "≥": ">=", "≠": "!=", "×": "*"}
_KEYWORDS = {"and", "or", "not", "true", "false"}
_CMP_OPS = {"=", "!=", "<", "<=", ">", ">="}


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "string" | "name" | "op" | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PredicateSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup or ""
        if kind != "ws":
            tok = m.group()
            if kind == "op":
                tok = _OP_ALIASES.get(tok, tok)
            tokens.append(_Token(kind, tok, pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            raise PredicateSyntaxError(f"expected {op!r}, got {tok.text!r}", tok.pos)

    def parse(self) -> Expr:
        expr = self.parse_or()
        tok = self.peek()
        if tok.kind != "end":
            raise PredicateSyntaxError(f"trailing input {tok.text!r}", tok.pos)
        return expr

    def parse_or(self) -> Expr:
        expr = self.parse_and()
        while self.peek().kind == "name" and self.peek().text == "or":
            self.next()
            expr = Binary("or", expr, self.parse_and())
        return expr

    def parse_and(self) -> Expr:
        expr = self.parse_not()
        while self.peek().kind == "name" and self.peek().text == "and":
            self.next()
            expr = Binary("and", expr, self.parse_not())
        return expr

    def parse_not(self) -> Expr:
        if self.peek().kind == "name" and self.peek().text == "not":
            self.next()
            return Unary("not", self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_sum()
        tok = self.peek()
        if tok.kind == "op" and tok.text in _CMP_OPS:
            self.next()
            right = self.parse_sum()
            after = self.peek()
            if after.kind == "op" and after.text in _CMP_OPS:
                raise PredicateSyntaxError("chained comparisons are not supported", after.pos)
            return Binary(tok.text, left, right)
        return left

    def parse_sum(self) -> Expr:
        expr = self.parse_product()
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            op = self.next().text
            expr = Binary(op, expr, self.parse_product())
        return expr

    def parse_product(self) -> Expr:
        expr = self.parse_unary()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.next()
            expr = Binary("*", expr, self.parse_unary())
        return expr

    def parse_unary(self) -> Expr:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            return Unary("neg", self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.next()
        if tok.kind == "number":
            text = tok.text
            return Literal(float(text) if "." in text else int(text))
        if tok.kind == "string":
            return Literal(tok.text[1:-1])
        if tok.kind == "name":
            if tok.text == "true":
                return Literal(True)
            if tok.text == "false":
                return Literal(False)
            if tok.text in _KEYWORDS:
                raise PredicateSyntaxError(f"unexpected keyword {tok.text!r}", tok.pos)
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            inner = self.parse_or()
            self.expect_op(")")
            return inner
        raise PredicateSyntaxError(f"unexpected token {tok.text or 'end of input'!r}", tok.pos)


@dataclass(frozen=True)
class GlobalPredicate:
    """A named whole-state assertion."""

    id: str
    expr: Expr
    text: str

    def referenced_vars(self) -> frozenset[str]:
        return referenced_vars(self.expr)


_ID_RE = re.compile(r"^[a-zA-Z_][a-zA-Z0-9_]*$")


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


def parse_predicate(line: str) -> GlobalPredicate:
    """Parse one `id: EXPR` line."""
    if ":" not in line:
        raise PredicateSyntaxError("expected 'id: EXPR'")
    pred_id, expr_text = line.split(":", 1)
    pred_id = pred_id.strip()
    if not _ID_RE.match(pred_id):
        raise PredicateSyntaxError(f"bad predicate id {pred_id!r}")
    expr_text = expr_text.strip()
    return GlobalPredicate(id=pred_id, expr=parse_expr(expr_text), text=expr_text)


def parse_predicates(text: str) -> list[GlobalPredicate]:
    """Parse a predicate file: one `id: EXPR` per line, # comments allowed."""
    preds = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        preds.append(parse_predicate(line))
    return preds
