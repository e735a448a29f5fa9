"""The card equation language: tokenizer, parser, printer, evaluator.

This is a closed, allowlisted expression grammar — not a Python subset.
There is no attribute access, no indexing, no strings, no statement forms,
and only the functions named in ALLOWED_FUNCTIONS can be called, so a
hostile card can at worst fail to parse. Evaluation never touches
``eval()`` or any host-language execution path: the parsed AST is walked
directly with ``math`` primitives.

Grammar (infix, standard precedence; ``**`` is right-associative and binds
tighter than unary minus):

    condition := "True" | expr cmp expr          cmp: > >= < <= = ==
    expr      := term (("+" | "-") term)*
    term      := factor (("*" | "/") factor)*
    factor    := "-" factor | power
    power     := atom ["**" factor]
    atom      := NUMBER | "pi" | "e" | NAME | NAME "(" args ")" | "(" expr ")"

Comparisons exist only in condition positions: Piecewise branch conditions
and card equation ``condition`` fields share the condition grammar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import (
    DisallowedFunction,
    DisallowedSyntax,
    MathDomain,
    NoBranchTaken,
    ParseError,
    UnboundSymbol,
)

ALLOWED_FUNCTIONS = frozenset({
    "sin", "cos", "tan", "cot", "asin", "acos", "atan", "atan2",
    "exp", "log", "sqrt", "Abs", "Min", "Max", "Piecewise",
})

CONSTANTS = {"pi": math.pi, "e": math.e}

# Names that read as host-language machinery; rejected outright so a card
# can never look like executable code.
_RESERVED = frozenset({
    "and", "or", "not", "if", "else", "elif", "for", "while", "import",
    "from", "as", "def", "class", "lambda", "return", "yield", "global",
    "nonlocal", "del", "try", "except", "finally", "raise", "assert",
    "with", "pass", "break", "continue", "in", "is", "None", "False",
    "eval", "exec",
})


# --------------------------------------------------------------- AST types ----

@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Constant:
    name: str  # "pi" | "e"


@dataclass(frozen=True)
class Symbol:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "-"
    operand: "ExprNode"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / **
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


@dataclass(frozen=True)
class Piecewise:
    branches: tuple  # ((value, condition), ...)


@dataclass(frozen=True)
class Comparison:
    op: str  # > >= < <= =
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class BoolLiteral:
    value: bool


ExprNode = Union[Number, Constant, Symbol, Unary, Binary, Call, Piecewise,
                 Comparison, BoolLiteral]


# --------------------------------------------------------------- tokenizer ----

_OPS = {"+", "-", "*", "/", "(", ")", ",", ">", "<", "=", "**", ">=", "<=", "=="}


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    """Return (kind, value, position) triples; kind in {num, name, op}."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            start = i
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == ".":
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j].isdigit():
                    i = j
                    while i < n and text[i].isdigit():
                        i += 1
            tokens.append(("num", float(text[start:i]), start))
            continue
        if ("a" <= c <= "z") or ("A" <= c <= "Z") or c == "_":
            start = i
            while i < n and (("a" <= text[i] <= "z") or ("A" <= text[i] <= "Z")
                             or text[i].isdigit() or text[i] == "_"):
                i += 1
            name = text[start:i]
            if "__" in name:
                raise DisallowedSyntax(f"double-underscore identifier {name!r}")
            if name in _RESERVED:
                raise DisallowedSyntax(f"reserved word {name!r}")
            tokens.append(("name", name, start))
            continue
        if c == "*" and i + 1 < n and text[i + 1] == "*":
            tokens.append(("op", "**", i))
            i += 2
            continue
        if c in "><=" and i + 1 < n and text[i + 1] == "=":
            op = c + "="
            tokens.append(("op", "=" if op == "==" else op, i))
            i += 2
            continue
        if c in "+-*/(),><=":
            tokens.append(("op", c, i))
            i += 1
            continue
        if c == ".":
            raise DisallowedSyntax("attribute access ('.') is not part of the language")
        if c in "\"'":
            raise DisallowedSyntax("string literals are not part of the language")
        if c in "[]":
            raise DisallowedSyntax("indexing is not part of the language")
        raise DisallowedSyntax(f"character {c!r} is not part of the language")
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token helpers ------------------------------------------------------
    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            raise ParseError(len(self.text), "unexpected end of input")
        self.pos += 1
        return tok

    def _expect_op(self, op: str):
        tok = self._next()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(tok[2], f"expected {op!r}, found {tok[1]!r}")

    def _at_op(self, *ops) -> bool:
        tok = self._peek()
        return tok is not None and tok[0] == "op" and tok[1] in ops

    # -- grammar ------------------------------------------------------------
    def parse_expr(self) -> ExprNode:
        node = self.parse_term()
        while self._at_op("+", "-"):
            op = self._next()[1]
            node = Binary(op, node, self.parse_term())
        return node

    def parse_term(self) -> ExprNode:
        node = self.parse_factor()
        while self._at_op("*", "/"):
            op = self._next()[1]
            node = Binary(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> ExprNode:
        if self._at_op("-"):
            self._next()
            return Unary("-", self.parse_factor())
        if self._at_op("+"):
            tok = self._next()
            raise ParseError(tok[2], "unary '+' is not supported")
        return self.parse_power()

    def parse_power(self) -> ExprNode:
        base = self.parse_atom()
        if self._at_op("**"):
            self._next()
            return Binary("**", base, self.parse_factor())
        return base

    def parse_atom(self) -> ExprNode:
        tok = self._next()
        kind, value, pos = tok
        if kind == "num":
            return Number(value)
        if kind == "name":
            if value == "True":
                raise ParseError(pos, "'True' is only valid as a condition")
            if self._at_op("("):
                return self.parse_call(value, pos)
            if value in CONSTANTS:
                return Constant(value)
            return Symbol(value)
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self._expect_op(")")
            return node
        raise ParseError(pos, f"unexpected token {value!r}")

    def parse_call(self, func: str, pos: int) -> ExprNode:
        if func not in ALLOWED_FUNCTIONS:
            raise DisallowedFunction(func)
        self._expect_op("(")
        if func == "Piecewise":
            branches = [self.parse_piece()]
            while self._at_op(","):
                self._next()
                branches.append(self.parse_piece())
            self._expect_op(")")
            return Piecewise(tuple(branches))
        args = [self.parse_expr()]
        while self._at_op(","):
            self._next()
            args.append(self.parse_expr())
        self._expect_op(")")
        arity = {"atan2": (2, 2), "Min": (1, None), "Max": (1, None)}.get(func, (1, 1))
        low, high = arity
        if len(args) < low or (high is not None and len(args) > high):
            raise ParseError(pos, f"{func} takes {low if high == low else f'{low}+'}"
                                  f" argument(s), got {len(args)}")
        return Call(func, tuple(args))

    def parse_piece(self) -> tuple:
        self._expect_op("(")
        value = self.parse_expr()
        self._expect_op(",")
        condition = self.parse_condition_inner()
        self._expect_op(")")
        return (value, condition)

    def parse_condition_inner(self) -> ExprNode:
        tok = self._peek()
        if tok is not None and tok[0] == "name" and tok[1] == "True":
            self._next()
            return BoolLiteral(True)
        left = self.parse_expr()
        tok = self._next()
        if tok[0] != "op" or tok[1] not in (">", ">=", "<", "<=", "="):
            raise ParseError(tok[2], f"expected a comparison operator, found {tok[1]!r}")
        right = self.parse_expr()
        return Comparison(tok[1], left, right)

    def _finish(self, node: ExprNode) -> ExprNode:
        tok = self._peek()
        if tok is not None:
            raise ParseError(tok[2], f"unexpected trailing token {tok[1]!r}")
        return node


def parse(text: str) -> ExprNode:
    """Parse a value expression."""
    if not text or not text.strip():
        raise ParseError(0, "empty expression")
    p = _Parser(text)
    return p._finish(p.parse_expr())


def parse_condition(text: str) -> ExprNode:
    """Parse a condition: ``True`` or a single comparison."""
    if not text or not text.strip():
        raise ParseError(0, "empty condition")
    p = _Parser(text)
    return p._finish(p.parse_condition_inner())


# ----------------------------------------------------------------- printer ----

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "**": 4}


def to_text(node: ExprNode) -> str:
    """Render a parseable text form; parse(to_text(n)) is structurally n."""
    return _print(node, 0)


def _print(node: ExprNode, min_prec: int) -> str:
    if isinstance(node, Number):
        text = repr(node.value)
        return text[:-2] if text.endswith(".0") else text
    if isinstance(node, Constant):
        return node.name
    if isinstance(node, Symbol):
        return node.name
    if isinstance(node, BoolLiteral):
        return "True"
    if isinstance(node, Unary):
        inner = "-" + _print(node.operand, 4)
        return f"({inner})" if min_prec > 3 else inner
    if isinstance(node, Binary):
        prec = _PREC[node.op]
        if node.op == "**":
            text = _print(node.left, 5) + "**" + _print(node.right, 3)
        else:
            sep = f" {node.op} " if node.op in ("+", "-") else node.op
            text = _print(node.left, prec) + sep + _print(node.right, prec + 1)
        return f"({text})" if prec < min_prec else text
    if isinstance(node, Call):
        return f"{node.func}({', '.join(_print(a, 0) for a in node.args)})"
    if isinstance(node, Piecewise):
        pieces = ", ".join(
            f"({_print(v, 0)}, {_print(c, 0)})" for v, c in node.branches
        )
        return f"Piecewise({pieces})"
    if isinstance(node, Comparison):
        return f"{_print(node.left, 1)} {node.op} {_print(node.right, 1)}"
    raise TypeError(f"not an ExprNode: {node!r}")


# ------------------------------------------------------------ free symbols ----

def free_symbols(node: ExprNode) -> set[str]:
    """All Symbol names in the tree, including Piecewise conditions."""
    out: set[str] = set()
    _collect(node, out)
    return out


def _collect(node: ExprNode, out: set) -> None:
    if isinstance(node, Symbol):
        out.add(node.name)
    elif isinstance(node, Unary):
        _collect(node.operand, out)
    elif isinstance(node, (Binary, Comparison)):
        _collect(node.left, out)
        _collect(node.right, out)
    elif isinstance(node, Call):
        for arg in node.args:
            _collect(arg, out)
    elif isinstance(node, Piecewise):
        for value, condition in node.branches:
            _collect(value, out)
            _collect(condition, out)


# --------------------------------------------------------------- evaluator ----

def _cot(x: float) -> float:
    s = math.sin(x)
    if s == 0.0:
        raise MathDomain(f"cot undefined at {x!r}")
    return math.cos(x) / s


def _log(x: float) -> float:
    if x <= 0.0:
        raise MathDomain(f"log of non-positive value {x!r}")
    return math.log(x)


def _sqrt(x: float) -> float:
    if x < 0.0:
        raise MathDomain(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


_FUNCTIONS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "cot": _cot,
    "asin": math.asin, "acos": math.acos, "atan": math.atan,
    "atan2": math.atan2, "exp": math.exp, "log": _log, "sqrt": _sqrt,
    "Abs": abs, "Min": min, "Max": max,
}


def evaluate(node: ExprNode, env: Mapping[str, float]) -> float:
    """Deterministic IEEE-754 evaluation of ``node`` under ``env``.

    Piecewise takes the first branch whose condition holds. All domain
    faults (division by zero, log of non-positive, inverse trig out of
    range, overflow) raise MathDomain rather than leaking host exceptions.
    """
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Constant):
        return CONSTANTS[node.name]
    if isinstance(node, Symbol):
        try:
            return env[node.name]
        except KeyError:
            raise UnboundSymbol(node.name) from None
    if isinstance(node, Unary):
        return -evaluate(node.operand, env)
    if isinstance(node, Binary):
        left = evaluate(node.left, env)
        right = evaluate(node.right, env)
        try:
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if node.op == "/":
                if right == 0.0:
                    raise MathDomain(f"division by zero in {to_text(node)}")
                return left / right
            result = left ** right
        except OverflowError:
            raise MathDomain(f"overflow in {to_text(node)}") from None
        except ZeroDivisionError:
            raise MathDomain(f"zero raised to negative power in {to_text(node)}") from None
        if isinstance(result, complex):
            raise MathDomain(f"complex result in {to_text(node)}")
        return result
    if isinstance(node, Call):
        args = [evaluate(a, env) for a in node.args]
        fn = _FUNCTIONS[node.func]
        try:
            return fn(*args)
        except ValueError as exc:
            raise MathDomain(f"{node.func}: {exc}") from None
        except OverflowError:
            raise MathDomain(f"overflow in {node.func}") from None
    if isinstance(node, Piecewise):
        for value, condition in node.branches:
            if evaluate(condition, env):
                return evaluate(value, env)
        raise NoBranchTaken()
    if isinstance(node, Comparison):
        left = evaluate(node.left, env)
        right = evaluate(node.right, env)
        return {
            ">": left > right, ">=": left >= right,
            "<": left < right, "<=": left <= right,
            "=": left == right,
        }[node.op]
    if isinstance(node, BoolLiteral):
        return node.value
    raise TypeError(f"not an ExprNode: {node!r}")
