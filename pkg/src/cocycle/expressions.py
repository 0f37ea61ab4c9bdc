"""Expression parsing and function specifications.

A small arithmetic language over real variables: binary + - * / ^,
unary minus, the functions exp, log, sin, cos, abs, sqrt, and the
constants pi and e.  Precedence from tightest to loosest: ^ (right
associative), unary minus, * /, + -.  Rational constants are written as
integer quotients (e.g. 1/3).

``FuncSpec`` wraps either a univariate seed g or a bivariate F and
evaluates at floats or numpy arrays.  ``cocycle_from_seed`` turns a seed
into the bivariate F(x, y) = g(x+y) - g(x) - g(y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np


class ParseError(Exception):
    """Syntax or name error, with the 0-based offset where it occurred."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class EvaluationError(Exception):
    """Domain violation or non-finite result during evaluation.

    When raised while probing a lattice point the offending point is
    attached as ``point``.
    """

    def __init__(self, message: str, point: tuple | None = None):
        super().__init__(message)
        self.point = point


# --- AST -------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    operand: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Const, Var, Unary, Bin, Call]

_CONSTANTS = {"pi": math.pi, "e": math.e}
_SCALAR_FUNCS = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "abs": abs,
    "sqrt": math.sqrt,
}
_ARRAY_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
    "sqrt": np.sqrt,
}


# --- tokenizer and parser --------------------------------------------

_OPS = set("+-*/^(),")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    # (kind, text, position); kinds: num, name, op
    tokens = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            tokens.append(("num", src[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("name", src[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, src: str, variables: tuple[str, ...]):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0
        self.variables = set(variables)

    def _peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> tuple[str, str, int]:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of expression", len(self.src))
        self.pos += 1
        return tok

    def _accept_op(self, *ops: str) -> str | None:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] in ops:
            self.pos += 1
            return tok[1]
        return None

    def parse(self) -> Expr:
        node = self._expr()
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def _expr(self) -> Expr:
        node = self._term()
        while True:
            op = self._accept_op("+", "-")
            if not op:
                return node
            node = Bin(op, node, self._term())

    def _term(self) -> Expr:
        node = self._factor()
        while True:
            op = self._accept_op("*", "/")
            if not op:
                return node
            node = Bin(op, node, self._factor())

    def _factor(self) -> Expr:
        if self._accept_op("-"):
            return Unary(self._factor())
        return self._power()

    def _power(self) -> Expr:
        node = self._atom()
        if self._accept_op("^"):
            return Bin("^", node, self._factor())  # right associative
        return node

    def _atom(self) -> Expr:
        tok = self._next()
        kind, text, at = tok
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if self._accept_op("("):
                if text not in _SCALAR_FUNCS:
                    raise ParseError(f"unknown function {text!r}", at)
                args = [self._expr()]
                while self._accept_op(","):
                    args.append(self._expr())
                closing = self._peek()
                if not self._accept_op(")"):
                    where = closing[2] if closing else len(self.src)
                    raise ParseError("expected ')'", where)
                if len(args) != 1:
                    raise ParseError(
                        f"{text} expects 1 argument, got {len(args)}", at
                    )
                return Call(text, args[0])
            if text in _CONSTANTS:
                return Const(text)
            if text in self.variables:
                return Var(text)
            raise ParseError(f"unknown identifier {text!r}", at)
        if text == "(":
            node = self._expr()
            closing = self._peek()
            if not self._accept_op(")"):
                where = closing[2] if closing else len(self.src)
                raise ParseError("expected ')'", where)
            return node
        raise ParseError(f"unexpected {text!r}", at)


def parse_expr(src: str, variables: tuple[str, ...] | list[str] = ("x", "y")) -> Expr:
    """Parse source text over the given variable names into an AST."""
    return _Parser(src, tuple(variables)).parse()


# --- evaluation -------------------------------------------------------

def _eval(node: Expr, env: dict):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return _CONSTANTS[node.name]
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        return -_eval(node.operand, env)
    if isinstance(node, Bin):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        try:
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return a / b
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                return a ** b
            return math.pow(a, b)
        except ZeroDivisionError as exc:
            raise EvaluationError("division by zero") from exc
        except OverflowError as exc:
            raise EvaluationError("overflow") from exc
        except ValueError as exc:
            raise EvaluationError(f"invalid power: {exc}") from exc
    if isinstance(node, Call):
        v = _eval(node.arg, env)
        table = _ARRAY_FUNCS if isinstance(v, np.ndarray) else _SCALAR_FUNCS
        try:
            return table[node.func](v)
        except ValueError as exc:
            raise EvaluationError(f"{node.func} domain error: {exc}") from exc
        except OverflowError as exc:
            raise EvaluationError(f"{node.func} overflow") from exc
    raise TypeError(f"not an expression node: {node!r}")


def eval_expr(node: Expr, assignment: dict) -> float:
    """Evaluate the AST at a point.

    Raises EvaluationError on domain violations (division by zero, log of
    a nonpositive value, 0^negative) and on non-finite results.
    """
    arrays = any(isinstance(v, np.ndarray) for v in assignment.values())
    if arrays:
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            try:
                out = _eval(node, assignment)
            except FloatingPointError as exc:
                raise EvaluationError(str(exc)) from exc
        if not np.all(np.isfinite(out)):
            raise EvaluationError("non-finite result")
        return out
    out = _eval(node, assignment)
    if not math.isfinite(out):
        raise EvaluationError("non-finite result")
    return out


# --- pretty printing ---------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Expr) -> int:
    if isinstance(node, Bin):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _PREC["neg"]
    return _PREC["atom"]


def pretty(node: Expr) -> str:
    """Canonical text form; parse(pretty(a)) re-prints to the same text."""
    if isinstance(node, Num):
        v = node.value
        return str(int(v)) if v == int(v) and abs(v) < 1e16 else repr(v)
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        inner = pretty(node.operand)
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.func}({pretty(node.arg)})"
    if isinstance(node, Bin):
        p = _PREC[node.op]
        left = pretty(node.left)
        right = pretty(node.right)
        # '^' is right associative, the rest left; parenthesize the side
        # that would otherwise re-associate.
        if _prec(node.left) < p or (_prec(node.left) == p and node.op == "^"):
            left = f"({left})"
        if _prec(node.right) < p or (_prec(node.right) == p and node.op != "^"):
            right = f"({right})"
        return f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# --- function specifications ------------------------------------------

BUILTIN_SEEDS = {
    "square": "t^2",
    "cube": "t^3",
    "expo": "exp(t)",
    "sine": "sin(t)",
    "hoelder": "sqrt(abs(t))",
}

KIND_BIVARIATE = "bivariate-expression"
KIND_SEED_EXPR = "seed-expression"
KIND_BUILTIN = "builtin-seed"


@dataclass(frozen=True)
class FuncSpec:
    """A univariate seed g or a bivariate F, evaluable at reals or arrays."""

    arity: int
    kind: str
    ast: Expr | None = None
    variables: tuple[str, ...] = ()
    family: str | None = None
    seed: "FuncSpec | None" = field(default=None, repr=False)

    def __call__(self, *args):
        return self.evaluate(*args)

    def evaluate(self, *args):
        if len(args) != self.arity:
            raise TypeError(f"expected {self.arity} arguments, got {len(args)}")
        vals = [a if isinstance(a, np.ndarray) else float(a) for a in args]
        if self.seed is not None:
            x, y = vals
            g = self.seed
            # grouping keeps the result bitwise symmetric in (x, y)
            return g.evaluate(x + y) - (g.evaluate(x) + g.evaluate(y))
        env = dict(zip(self.variables, vals))
        return eval_expr(self.ast, env)

    def label(self) -> str:
        if self.seed is not None:
            return f"cocycle({self.seed.label()})"
        if self.kind == KIND_BUILTIN:
            return f"seed:{self.family}"
        src = pretty(self.ast)
        return f"expr:{src}"


def bivariate_expression(src: str, variables: tuple[str, str] = ("x", "y")) -> FuncSpec:
    """F(x, y) from source text over two variables."""
    ast = parse_expr(src, variables)
    return FuncSpec(arity=2, kind=KIND_BIVARIATE, ast=ast, variables=tuple(variables))


def seed_expression(src: str, variable: str = "t") -> FuncSpec:
    """Univariate seed g from source text."""
    ast = parse_expr(src, (variable,))
    return FuncSpec(arity=1, kind=KIND_SEED_EXPR, ast=ast, variables=(variable,))


def builtin_seed(name: str) -> FuncSpec:
    """One of the named seed families: square, cube, expo, sine, hoelder."""
    try:
        src = BUILTIN_SEEDS[name]
    except KeyError:
        raise ValueError(f"unknown builtin seed {name!r}") from None
    ast = parse_expr(src, ("t",))
    return FuncSpec(arity=1, kind=KIND_BUILTIN, ast=ast, variables=("t",), family=name)


def cocycle_from_seed(g: FuncSpec) -> FuncSpec:
    """Bivariate F(x, y) = g(x+y) - g(x) - g(y) induced by a seed g."""
    if g.arity != 1:
        raise ValueError("seed must be univariate")
    return FuncSpec(
        arity=2,
        kind=g.kind,
        ast=g.ast,
        variables=g.variables,
        family=g.family,
        seed=g,
    )
