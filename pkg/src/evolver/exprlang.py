"""Tiny arithmetic expression language for config-supplied coefficients.

Grammar (recursive descent, standard precedence):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?          # right-associative
    atom   := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Variables are t, s, T plus the constant pi; functions are sin, cos,
exp, tanh, abs (one argument) and min, max (two).  '^' binds tighter
than unary minus, so -2^2 = -(2^2); exponents may carry their own sign
(2^-3 is valid).  No user-defined names, so configs stay data.

Parsing folds a unary minus applied to a literal into the literal
(normal form: Neg never wraps Num directly); with that convention
parse(format_expr(e)) == e for every parser-produced AST and
format_expr is idempotent through a reparse.

Evaluation is pure IEEE double arithmetic, vectorized over numpy array
bindings.  Division by zero (including 0^negative) and fractional
powers of negative bases raise; everything else is total.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import EvolverError

VARIABLES = ("t", "s", "T", "pi")
FUNCTIONS = {
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "exp": (1, np.exp),
    "tanh": (1, np.tanh),
    "abs": (1, np.abs),
    "min": (2, np.minimum),
    "max": (2, np.maximum),
}


class ExprError(EvolverError):
    """Parse or evaluation failure; position is a byte offset when known."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} at offset {position}"
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


Expr = Num | Var | Neg | Bin | Call

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<sym>[-+*/^(),]))"
)


def _tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            at = pos + len(src[pos:]) - len(src[pos:].lstrip())
            if at >= len(src):
                break
            raise ExprError(f"unexpected character {src[at]!r}", at)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("sym", m.group("sym"), m.start("sym")))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_sym(self, sym):
        kind, text, pos = self.peek()
        if kind == "sym" and text == sym:
            return self.take()
        raise ExprError(f"expected {sym!r}", pos)

    def at_sym(self, *syms):
        kind, text, _ = self.peek()
        return kind == "sym" and text in syms

    def parse(self):
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprError(f"unexpected {text!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.at_sym("+", "-"):
            op = self.take()[1]
            e = Bin(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.at_sym("*", "/"):
            op = self.take()[1]
            e = Bin(op, e, self.factor())
        return e

    def factor(self):
        if self.at_sym("-"):
            self.take()
            inner = self.factor()
            if isinstance(inner, Num):
                return Num(-inner.value)
            return Neg(inner)
        return self.power()

    def power(self):
        base = self.atom()
        if self.at_sym("^"):
            self.take()
            return Bin("^", base, self.factor())
        return base

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "num":
            self.take()
            return Num(float(text))
        if kind == "ident":
            self.take()
            if self.at_sym("("):
                if text not in FUNCTIONS:
                    raise ExprError(f"unknown function {text!r}", pos)
                self.take()
                args = [self.expr()]
                while self.at_sym(","):
                    self.take()
                    args.append(self.expr())
                self.expect_sym(")")
                arity = FUNCTIONS[text][0]
                if len(args) != arity:
                    raise ExprError(
                        f"{text} takes {arity} argument(s), got {len(args)}", pos
                    )
                return Call(text, tuple(args))
            if text not in VARIABLES:
                raise ExprError(f"unknown identifier {text!r}", pos)
            return Var(text)
        if kind == "sym" and text == "(":
            self.take()
            e = self.expr()
            self.expect_sym(")")
            return e
        if kind == "end":
            raise ExprError("unexpected end of input", pos)
        raise ExprError(f"unexpected {text!r}", pos)


def parse_expr(src: str) -> Expr:
    """Parse source text into an AST; raises ExprError with a byte offset."""
    if not isinstance(src, str):
        raise ExprError("expression source must be a string")
    return _Parser(src).parse()


def eval_expr(e: Expr, bindings=None):
    """Evaluate an AST under variable bindings (scalars or numpy arrays).

    pi is always bound.  Returns a float for scalar inputs, an ndarray
    when any binding is an array (numpy broadcasting).
    """
    env = {"pi": np.pi}
    if bindings:
        env.update(bindings)
    out = _eval(e, env)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _eval(e, env):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.name not in env:
            raise ExprError(f"unbound variable {e.name!r}")
        return env[e.name]
    if isinstance(e, Neg):
        return -_eval(e.arg, env)
    if isinstance(e, Bin):
        a = _eval(e.lhs, env)
        b = _eval(e.rhs, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if np.any(np.asarray(b) == 0):
                raise ExprError("division by zero")
            return a / b
        if e.op == "^":
            aa = np.asarray(a, dtype=float)
            bb = np.asarray(b, dtype=float)
            if np.any((aa == 0) & (bb < 0)):
                raise ExprError("division by zero (zero base, negative exponent)")
            with np.errstate(invalid="ignore"):
                res = np.power(aa, bb)
            if np.any(np.isnan(res)):
                raise ExprError("invalid power (negative base, fractional exponent)")
            return res if res.ndim else float(res)
        raise ExprError(f"unknown operator {e.op!r}")
    if isinstance(e, Call):
        fn = FUNCTIONS[e.fn][1]
        return fn(*(_eval(arg, env) for arg in e.args))
    raise ExprError(f"not an expression node: {e!r}")


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e):
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    if isinstance(e, Num) and e.value < 0:
        return _PREC["neg"]
    return _PREC["atom"]


def format_expr(e: Expr) -> str:
    """Print an AST to minimally parenthesized source that reparses to it."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = format_expr(e.arg)
        if _prec(e.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Bin):
        p = _PREC[e.op]
        lhs = format_expr(e.lhs)
        rhs = format_expr(e.rhs)
        if e.op == "^":
            # right-assoc: wrap equal precedence on the left, and the
            # exponent only when it is looser than a signed factor
            if _prec(e.lhs) <= p:
                lhs = f"({lhs})"
            if _prec(e.rhs) < _PREC["neg"]:
                rhs = f"({rhs})"
        else:
            # left-assoc: an equal-precedence right child must keep its
            # parens or the reparse would rebalance the tree
            if _prec(e.lhs) < p:
                lhs = f"({lhs})"
            if _prec(e.rhs) <= p:
                rhs = f"({rhs})"
        return f"{lhs}{e.op}{rhs}"
    if isinstance(e, Call):
        return f"{e.fn}({','.join(format_expr(a) for a in e.args)})"
    raise ExprError(f"not an expression node: {e!r}")


def free_vars(e: Expr) -> set:
    """Variable names appearing in the AST (pi excluded)."""
    if isinstance(e, Var):
        return set() if e.name == "pi" else {e.name}
    if isinstance(e, Neg):
        return free_vars(e.arg)
    if isinstance(e, Bin):
        return free_vars(e.lhs) | free_vars(e.rhs)
    if isinstance(e, Call):
        out = set()
        for a in e.args:
            out |= free_vars(a)
        return out
    return set()
