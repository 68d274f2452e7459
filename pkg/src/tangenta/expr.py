"""Curve-defining expressions: parsing, printing, evaluation, differentiation.

Grammar (whitespace-insensitive)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | factor
    factor   := base ('^' exponent)?
    base     := number | ident | ident '(' expr ')' | '(' expr ')'
    exponent := ['-'] number | '(' ['-'] number ['/' number] ')'

Functions are ``sqrt``, ``ln``, ``exp``, ``sin`` and ``cos``.  Numeric literals
become exact :class:`~fractions.Fraction` constants, so arithmetic on rational
inputs stays exact; transcendental nodes fall back to floats.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Union

from .errors import (
    DomainError,
    NotOnCurveError,
    NotPolynomialError,
    ParseError,
    UnboundVariableError,
    UnknownIdentifierError,
    VerticalTangentError,
)

Number = Union[Fraction, float]

FUNCTIONS = ("sqrt", "ln", "exp", "sin", "cos")

# printing precedence levels
_SUM, _PROD, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


class Expr:
    """Base class of expression nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)

    # operator sugar builds through the simplifying constructors
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True, slots=True, eq=True, repr=True)
class Const(Expr):
    value: Number


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction


@dataclass(frozen=True, slots=True)
class Call(Expr):
    func: str
    arg: Expr


def _lift(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Const(Fraction(v))
    if isinstance(v, float):
        return Const(v)
    raise TypeError(f"cannot use {type(v).__name__} in an expression")


def const(v) -> Expr:
    """Constant node; negative values are expressed as a negation."""
    node = _lift(v)
    if isinstance(node, Const) and node.value < 0:
        return Neg(Const(-node.value))
    return node


def variables(e: Expr) -> frozenset:
    """Names of the free variables of ``e``."""
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Const):
        return frozenset()
    return frozenset().union(*(variables(c) for c in _children(e)))


def _children(e: Expr) -> tuple:
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, (Neg, Call)):
        return (e.arg,)
    if isinstance(e, Pow):
        return (e.base,)
    return ()


def depth(e: Expr) -> int:
    kids = _children(e)
    return 1 + max((depth(k) for k in kids), default=0)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str, allowed: frozenset | None):
        self.text = text
        self.allowed = allowed
        self.tokens = []  # (kind, value, char offset)
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                rest = text[pos:]
                if rest.strip() == "":
                    break
                bad = pos + (len(rest) - len(rest.lstrip()))
                raise ParseError(f"unexpected character {text[bad]!r}", self._byte(bad))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def _byte(self, char_offset: int) -> int:
        return len(self.text[:char_offset].encode("utf-8"))

    def _end_offset(self) -> int:
        return self._byte(len(self.text.rstrip()))

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message: str, tok=None):
        off = self._byte(tok[2]) if tok is not None else self._end_offset()
        raise ParseError(message, off)

    def expect(self, op: str):
        tok = self.take()
        if tok is None or tok[0] != "op" or tok[1] != op:
            self.fail(f"expected {op!r}", tok)

    def parse(self) -> Expr:
        if not self.tokens:
            self.fail("empty expression")
        e = self.expr()
        tok = self.peek()
        if tok is not None:
            self.fail(f"unexpected {tok[1]!r}", tok)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while (tok := self.peek()) is not None and tok[0] == "op" and tok[1] in "+-":
            self.take()
            rhs = self.term()
            e = Add(e, rhs) if tok[1] == "+" else Sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while (tok := self.peek()) is not None and tok[0] == "op" and tok[1] in "*/":
            self.take()
            rhs = self.unary()
            e = Mul(e, rhs) if tok[1] == "*" else Div(e, rhs)
        return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok == ("op", "-", tok[2]):
            self.take()
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> Expr:
        base = self.base()
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def base(self) -> Expr:
        tok = self.take()
        if tok is None:
            self.fail("unexpected end of input")
        kind, val, _ = tok
        if kind == "num":
            return Const(Fraction(val))
        if kind == "ident":
            nxt = self.peek()
            if nxt is not None and nxt[0] == "op" and nxt[1] == "(":
                if val not in FUNCTIONS:
                    raise UnknownIdentifierError(f"unknown function {val!r}", self._byte(tok[2]))
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in FUNCTIONS:
                self.fail(f"function {val!r} needs an argument", nxt)
            if self.allowed is not None and val not in self.allowed:
                raise UnknownIdentifierError(f"unknown identifier {val!r}", self._byte(tok[2]))
            return Var(val)
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        self.fail(f"unexpected {val!r}", tok)

    def exponent(self) -> Fraction:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "(":
            self.take()
            value = self._signed_number()
            nxt = self.peek()
            if nxt is not None and nxt[0] == "op" and nxt[1] == "/":
                self.take()
                den = self._number()
                if den == 0:
                    self.fail("zero denominator in exponent", nxt)
                value = value / den
            self.expect(")")
            return value
        return self._signed_number()

    def _signed_number(self) -> Fraction:
        tok = self.peek()
        sign = 1
        if tok is not None and tok[0] == "op" and tok[1] == "-":
            self.take()
            sign = -1
        return sign * self._number()

    def _number(self) -> Fraction:
        tok = self.take()
        if tok is None or tok[0] != "num":
            self.fail("expected a rational exponent", tok)
        return Fraction(tok[1])


def parse(text: str, variables: Iterable[str] | None = None) -> Expr:
    """Parse ``text`` into an expression tree.

    If ``variables`` is given, any other identifier is rejected with
    :class:`UnknownIdentifierError`.  Syntax errors carry the byte offset of
    the offending token (or of the end of input).
    """
    allowed = frozenset(variables) if variables is not None else None
    return _Parser(text, allowed).parse()


# --------------------------------------------------------------------------
# printing


def _is_decimal(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def _fraction_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    # exact terminating decimal: scale by a power of ten
    k = 0
    d = q.denominator
    while d != 1:
        if d % 2 == 0:
            d //= 2
        else:
            d //= 5
        k += 1
    digits = str(abs(q.numerator) * 10**k // q.denominator).rjust(k + 1, "0")
    s = digits[:-k] + "." + digits[-k:]
    s = s.rstrip("0").rstrip(".")
    return s


def _const_text(v: Number) -> tuple[str, int]:
    """Text and precedence level for a constant."""
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"cannot print non-finite constant {v}")
        v = Fraction(v)
    if v < 0:
        inner, level = _const_text(-v)
        if level < _UNARY:
            inner = f"({inner})"
        return "-" + inner, _UNARY
    if _is_decimal(v):
        return _fraction_text(v), _ATOM
    return f"({v.numerator}/{v.denominator})", _ATOM


def _exponent_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"({q.numerator}/{q.denominator})"


def _render(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Var):
        return e.name, _ATOM
    if isinstance(e, Call):
        return f"{e.func}({_render(e.arg)[0]})", _ATOM
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _UNARY), _UNARY
    if isinstance(e, Pow):
        return _wrap(e.base, _ATOM) + "^" + _exponent_text(e.exponent), _POW
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        return _wrap(e.left, _SUM) + op + _wrap(e.right, _PROD), _SUM
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        return _wrap(e.left, _PROD) + op + _wrap(e.right, _UNARY), _PROD
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(e: Expr, need: int) -> str:
    text, level = _render(e)
    return text if level >= need else f"({text})"


def to_text(e: Expr) -> str:
    """Print ``e`` so that :func:`parse` rebuilds the same tree.

    Non-negative constants with a terminating decimal expansion (this
    includes every float) round-trip exactly.  Negative constants come back
    as a negation and other rationals as a quotient, with equal value.
    """
    return _render(e)[0]


# --------------------------------------------------------------------------
# evaluation


def _rational_pow(base: Number, q: Fraction, node: Expr) -> Number:
    if q.denominator == 1:
        n = q.numerator
        if n < 0 and base == 0:
            raise DomainError("zero raised to a negative power", node)
        return base**n
    if base < 0:
        if q.denominator % 2 == 0:
            raise DomainError(f"even root of negative number {float(base)!r}", node)
        return -((-float(base)) ** float(q))
    if base == 0 and q < 0:
        raise DomainError("zero raised to a negative power", node)
    return float(base) ** float(q)


def _apply(func: str, v: Number, node: Expr) -> Number:
    if func == "sqrt":
        if v < 0:
            raise DomainError(f"sqrt of negative number {float(v)!r}", node)
        if isinstance(v, Fraction):
            n, d = math.isqrt(v.numerator), math.isqrt(v.denominator)
            if n * n == v.numerator and d * d == v.denominator:
                return Fraction(n, d)
        return math.sqrt(v)
    if func == "ln":
        if v <= 0:
            raise DomainError(f"ln of non-positive number {float(v)!r}", node)
        return Fraction(0) if v == 1 else math.log(v)
    try:
        if func == "exp":
            return Fraction(1) if v == 0 else math.exp(v)
        if func == "sin":
            return Fraction(0) if v == 0 else math.sin(v)
        if func == "cos":
            return Fraction(1) if v == 0 else math.cos(v)
    except OverflowError:
        raise DomainError(f"{func} overflows at {float(v)!r}", node) from None
    raise ValueError(f"unknown function {func!r}")


def _eval(e: Expr, env: Mapping[str, Number]) -> Number:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariableError(f"variable {e.name!r} is not bound") from None
    if isinstance(e, Neg):
        return -_eval(e.arg, env)
    if isinstance(e, Add):
        return _eval(e.left, env) + _eval(e.right, env)
    if isinstance(e, Sub):
        return _eval(e.left, env) - _eval(e.right, env)
    if isinstance(e, Mul):
        return _eval(e.left, env) * _eval(e.right, env)
    if isinstance(e, Div):
        num, den = _eval(e.left, env), _eval(e.right, env)
        if den == 0:
            raise DomainError("division by zero", e)
        return num / den
    if isinstance(e, Pow):
        try:
            return _rational_pow(_eval(e.base, env), e.exponent, e)
        except OverflowError:
            raise DomainError("power overflows", e) from None
    if isinstance(e, Call):
        return _apply(e.func, _eval(e.arg, env), e)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, bindings: Mapping[str, Number] | None = None, *, exact: bool = False, **kw) -> Number:
    """Evaluate ``e`` with the given variable bindings.

    With ``exact=True`` rational inputs give a :class:`Fraction` result
    whenever no transcendental node intervenes; otherwise a float is
    returned.
    """
    env = dict(bindings or {})
    env.update(kw)
    if exact:
        env = {k: (Fraction(v) if isinstance(v, int) else v) for k, v in env.items()}
    else:
        env = {k: float(v) for k, v in env.items()}
    v = _eval(e, env)
    return v if exact else float(v)


# Compiled evaluation: the tree walker above is the reference and also the
# error reporter; compiled closures are what curves call in hot loops.


def _frac_pow(b: float, p: float, odd: bool) -> float:
    if b < 0:
        if not odd:
            raise ValueError("even root of negative number")
        return -((-b) ** p)
    return b**p


_SAFE_GLOBALS = {
    "sqrt": math.sqrt,
    "ln": math.log,
    "exp": math.exp,
    "sin": math.sin,
    "cos": math.cos,
    "_fp": _frac_pow,
}


def _py(e: Expr) -> str:
    if isinstance(e, Const):
        return repr(float(e.value))
    if isinstance(e, Var):
        return "v_" + e.name
    if isinstance(e, Neg):
        return f"(-{_py(e.arg)})"
    if isinstance(e, Add):
        return f"({_py(e.left)} + {_py(e.right)})"
    if isinstance(e, Sub):
        return f"({_py(e.left)} - {_py(e.right)})"
    if isinstance(e, Mul):
        return f"({_py(e.left)} * {_py(e.right)})"
    if isinstance(e, Div):
        return f"({_py(e.left)} / {_py(e.right)})"
    if isinstance(e, Pow):
        q = e.exponent
        if q.denominator == 1:
            return f"({_py(e.base)} ** {q.numerator})"
        return f"_fp({_py(e.base)}, {float(q)!r}, {q.denominator % 2 == 1})"
    if isinstance(e, Call):
        return f"{e.func}({_py(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


@lru_cache(maxsize=512)
def _compile(e: Expr, names: tuple) -> Callable:
    args = ", ".join("v_" + n for n in names)
    code = f"lambda {args}: {_py(e)}"
    return eval(code, dict(_SAFE_GLOBALS))  # noqa: S307 - source built from a validated tree


def compile_expr(e: Expr, names: Iterable[str] = ("x",)) -> Callable[..., float]:
    """Return a fast float function of the positional ``names``.

    Domain violations raise :class:`DomainError` naming the offending node,
    exactly as :func:`evaluate` would.
    """
    names = tuple(names)
    missing = variables(e) - set(names)
    if missing:
        raise UnboundVariableError(f"variables {sorted(missing)} are not bound")
    fast = _compile(e, names)

    def f(*args):
        try:
            return fast(*args)
        except (ValueError, ZeroDivisionError, OverflowError, TypeError):
            # re-run the reference evaluator to locate the node
            return float(_eval(e, {n: float(a) for n, a in zip(names, args)}))

    return f


# --------------------------------------------------------------------------
# simplifying constructors


def _is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


def _num(e: Expr):
    """Numeric value of a constant or negated constant, else None."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg) and isinstance(e.arg, Const):
        return -e.arg.value
    return None


def _exact_const(v) -> Expr | None:
    if isinstance(v, Fraction):
        return const(v)
    return None


def neg(a: Expr) -> Expr:
    if isinstance(a, Neg):
        return a.arg
    v = _num(a)
    if v is not None:
        return const(-v) if isinstance(v, Fraction) else Neg(a)
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    va, vb = _num(a), _num(b)
    if va == 0:
        return b
    if vb == 0:
        return a
    if isinstance(va, Fraction) and isinstance(vb, Fraction):
        return const(va + vb)
    if isinstance(b, Neg):
        return Sub(a, b.arg)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    va, vb = _num(a), _num(b)
    if vb == 0:
        return a
    if va == 0:
        return neg(b)
    if isinstance(va, Fraction) and isinstance(vb, Fraction):
        return const(va - vb)
    if isinstance(b, Neg):
        return Add(a, b.arg)
    if a == b:
        return Const(Fraction(0))
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    va, vb = _num(a), _num(b)
    if va == 0 or vb == 0:
        return Const(Fraction(0))
    if va == 1:
        return b
    if vb == 1:
        return a
    if va == -1:
        return neg(b)
    if vb == -1:
        return neg(a)
    if isinstance(va, Fraction) and isinstance(vb, Fraction):
        return const(va * vb)
    if vb is not None and va is None:
        a, b, va, vb = b, a, vb, va
    if isinstance(va, Fraction) and isinstance(b, Mul) and isinstance(_num(b.left), Fraction):
        return mul(const(va * _num(b.left)), b.right)
    if isinstance(a, Neg) and va is None:
        return neg(mul(a.arg, b))
    if isinstance(b, Neg) and vb is None:
        return neg(mul(a, b.arg))
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    va, vb = _num(a), _num(b)
    if vb == 1:
        return a
    if va == 0 and vb != 0:
        return Const(Fraction(0))
    if isinstance(va, Fraction) and isinstance(vb, Fraction) and vb != 0:
        return const(va / vb)
    if isinstance(vb, Fraction) and vb != 0 and va is None:
        return mul(const(1 / vb), a)
    return Div(a, b)


def power(base: Expr, exponent) -> Expr:
    q = Fraction(exponent)
    if q == 0:
        return Const(Fraction(1))
    if q == 1:
        return base
    if isinstance(base, Call) and base.func == "sqrt" and q.denominator == 1 and q.numerator % 2 == 0:
        return power(base.arg, q / 2)
    vb = _num(base)
    if isinstance(vb, Fraction) and q.denominator == 1 and not (vb == 0 and q < 0):
        return const(vb ** q.numerator)
    return Pow(base, q)


def call(func: str, arg: Expr) -> Expr:
    if func not in FUNCTIONS:
        raise ValueError(f"unknown function {func!r}")
    v = _num(arg)
    if isinstance(v, Fraction):
        try:
            folded = _apply(func, v, None)
        except DomainError:
            return Call(func, arg)
        ex = _exact_const(folded)
        if ex is not None:
            return ex
    return Call(func, arg)


def simplify(e: Expr) -> Expr:
    """Bottom-up pass of the light rules: constant folding, 0/1 elimination."""
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Neg):
        return neg(simplify(e.arg))
    if isinstance(e, Add):
        return add(simplify(e.left), simplify(e.right))
    if isinstance(e, Sub):
        return sub(simplify(e.left), simplify(e.right))
    if isinstance(e, Mul):
        return mul(simplify(e.left), simplify(e.right))
    if isinstance(e, Div):
        return div(simplify(e.left), simplify(e.right))
    if isinstance(e, Pow):
        return power(simplify(e.base), e.exponent)
    if isinstance(e, Call):
        return call(e.func, simplify(e.arg))
    raise TypeError(f"not an expression node: {e!r}")


# --------------------------------------------------------------------------
# differentiation

_ZERO = Const(Fraction(0))
_ONE = Const(Fraction(1))


def differentiate(e: Expr, var: str = "x") -> Expr:
    """Symbolic derivative of ``e`` with respect to ``var``, lightly simplified."""
    if isinstance(e, Const):
        return _ZERO
    if isinstance(e, Var):
        return _ONE if e.name == var else _ZERO
    if isinstance(e, Neg):
        return neg(differentiate(e.arg, var))
    if isinstance(e, Add):
        return add(differentiate(e.left, var), differentiate(e.right, var))
    if isinstance(e, Sub):
        return sub(differentiate(e.left, var), differentiate(e.right, var))
    if isinstance(e, Mul):
        u, v = e.left, e.right
        return add(mul(differentiate(u, var), v), mul(u, differentiate(v, var)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        du, dv = differentiate(u, var), differentiate(v, var)
        if _num(dv) == 0:
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2))
    if isinstance(e, Pow):
        du = differentiate(e.base, var)
        if _num(du) == 0:
            return _ZERO
        q = e.exponent
        return mul(mul(const(q), power(e.base, q - 1)), du)
    if isinstance(e, Call):
        u = e.arg
        du = differentiate(u, var)
        if _num(du) == 0:
            return _ZERO
        if e.func == "sqrt":
            return div(du, mul(const(2), e))
        if e.func == "ln":
            return div(du, u)
        if e.func == "exp":
            return mul(e, du)
        if e.func == "sin":
            return mul(call("cos", u), du)
        if e.func == "cos":
            return neg(mul(call("sin", u), du))
    raise TypeError(f"not an expression node: {e!r}")


# --------------------------------------------------------------------------
# implicit polynomial relations and the a-e linearization

Poly = dict  # {(deg_x, deg_z): Fraction}


def _poly_add(p: Poly, q: Poly, sign: int = 1) -> Poly:
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, Fraction(0)) + sign * c
    return {k: c for k, c in out.items() if c != 0}


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, Fraction(0)) + c1 * c2
    return {k: c for k, c in out.items() if c != 0}


def to_polynomial(e: Expr, x: str, z: str) -> Poly:
    """Expand ``e`` into ``{(i, j): coeff}`` meaning sum of coeff * x^i * z^j."""
    if isinstance(e, Const):
        c = Fraction(e.value)
        return {(0, 0): c} if c != 0 else {}
    if isinstance(e, Var):
        if e.name == x:
            return {(1, 0): Fraction(1)}
        if e.name == z:
            return {(0, 1): Fraction(1)}
        raise NotPolynomialError(f"unexpected variable {e.name!r}")
    if isinstance(e, Neg):
        return {k: -c for k, c in to_polynomial(e.arg, x, z).items()}
    if isinstance(e, Add):
        return _poly_add(to_polynomial(e.left, x, z), to_polynomial(e.right, x, z))
    if isinstance(e, Sub):
        return _poly_add(to_polynomial(e.left, x, z), to_polynomial(e.right, x, z), -1)
    if isinstance(e, Mul):
        return _poly_mul(to_polynomial(e.left, x, z), to_polynomial(e.right, x, z))
    if isinstance(e, Div):
        den = to_polynomial(e.right, x, z)
        if set(den) - {(0, 0)} or not den:
            raise NotPolynomialError(f"division by a non-constant: {to_text(e.right)}")
        inv = 1 / den[(0, 0)]
        return {k: c * inv for k, c in to_polynomial(e.left, x, z).items()}
    if isinstance(e, Pow):
        q = e.exponent
        if q.denominator != 1 or q < 0:
            raise NotPolynomialError(f"non-integer or negative power {q}")
        out: Poly = {(0, 0): Fraction(1)}
        base = to_polynomial(e.base, x, z)
        for _ in range(q.numerator):
            out = _poly_mul(out, base)
        return out
    raise NotPolynomialError(f"{to_text(e)} is not polynomial")


@dataclass(frozen=True)
class ImplicitRelation:
    """The curve ``f(x, z) = 0`` for a polynomial ``f``.

    ``x`` names the abscissa and ``z`` the ordinate.
    """

    expr: Expr
    x: str = "x"
    z: str = "z"

    def __post_init__(self):
        extra = variables(self.expr) - {self.x, self.z}
        if extra:
            raise NotPolynomialError(f"relation uses variables outside ({self.x}, {self.z}): {sorted(extra)}")
        object.__setattr__(self, "_poly", to_polynomial(self.expr, self.x, self.z))

    @classmethod
    def from_text(cls, text: str, x: str = "x", z: str = "z") -> "ImplicitRelation":
        return cls(parse(text, (x, z)), x, z)

    @property
    def polynomial(self) -> Poly:
        return dict(self._poly)

    def __call__(self, x0, z0):
        return evaluate(self.expr, {self.x: x0, self.z: z0}, exact=True)


def _binomial_shift(point, degree: int) -> dict:
    """Coefficients of (point - h)^degree in powers of h."""
    return {k: math.comb(degree, k) * point ** (degree - k) * (-1) ** k for k in range(degree + 1)}


def barrow_expansion(rel: ImplicitRelation, x0, z0) -> Poly:
    """Full expansion of f(x0 - a, z0 - e) as ``{(deg_a, deg_e): coeff}``."""
    X, Z = Fraction(x0), Fraction(z0)
    out: Poly = {}
    for (i, j), c in rel._poly.items():
        xs, zs = _binomial_shift(X, i), _binomial_shift(Z, j)
        for p, cx in xs.items():
            for q, cz in zs.items():
                out[(p, q)] = out.get((p, q), Fraction(0)) + c * cx * cz
    return {k: v for k, v in out.items() if v != 0}


def barrow_linearize(rel: ImplicitRelation, x0, z0, on_curve_tol: float = 1e-9):
    """Slope e/a of the relation at (x0, z0) by the a-e rules.

    The abscissa is decreased by ``a`` and the ordinate by ``e``; the expansion
    is truncated to the terms linear in (a, e), the constant term f(x0, z0) is
    dropped, and the remaining linear equation is solved for e/a.

    Rational (``int``/``Fraction``) inputs give an exact ``Fraction``; float
    inputs give a float.
    """
    exact = all(isinstance(v, (int, Fraction)) for v in (x0, z0))
    terms = barrow_expansion(rel, x0, z0)
    residual = terms.get((0, 0), Fraction(0))
    if abs(residual) > on_curve_tol:
        raise NotOnCurveError(f"f({x0}, {z0}) = {float(residual):.3g} is not zero")
    kept = {k: v for k, v in terms.items() if sum(k) == 1}
    coeff_a = kept.get((1, 0), Fraction(0))
    coeff_e = kept.get((0, 1), Fraction(0))
    if coeff_e == 0:
        raise VerticalTangentError(f"no e-term at ({x0}, {z0}): tangent is vertical")
    slope = -coeff_a / coeff_e
    return slope if exact else float(slope)


def implicit_slope(rel: ImplicitRelation, x0, z0):
    """-(df/dx)/(df/dz) through symbolic differentiation."""
    fx = differentiate(rel.expr, rel.x)
    fz = differentiate(rel.expr, rel.z)
    exact = all(isinstance(v, (int, Fraction)) for v in (x0, z0))
    env = {rel.x: x0, rel.z: z0}
    gx = evaluate(fx, env, exact=exact)
    gz = evaluate(fz, env, exact=exact)
    if gz == 0:
        raise VerticalTangentError(f"df/d{rel.z} vanishes at ({x0}, {z0})")
    return -gx / gz
