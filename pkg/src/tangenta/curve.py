"""Plane curves and their tangent quantities.

One frame throughout: abscissa ``x`` to the right, ordinate upward.  The
subtangent is signed, ``t = c / c'``, so that ``t * n = c**2`` holds with the
subnormal ``n = c * c'``; the unsigned length drawn in a figure is ``|t|``.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

from . import expr as ex
from .errors import (
    DerivativeUndefinedError,
    DomainError,
    OutOfDomainError,
    PreconditionError,
    ZeroSlopeError,
)

MONOTONE = ("increasing", "decreasing", "constant", "neither")
CONVEXITY = ("convex", "concave", "neither")


@dataclass(frozen=True)
class AnalyticCurve:
    """``c = expr(x)`` on the closed interval ``domain``."""

    expr: ex.Expr
    domain: tuple[float, float]
    var: str = "x"
    monotone: str | None = None
    convexity: str | None = None

    def __post_init__(self):
        lo, hi = (float(v) for v in self.domain)
        if not lo < hi:
            raise PreconditionError(f"empty domain [{lo}, {hi}]")
        object.__setattr__(self, "domain", (lo, hi))
        extra = ex.variables(self.expr) - {self.var}
        if extra:
            raise PreconditionError(f"curve expression has extra variables {sorted(extra)}")

    @classmethod
    def from_text(cls, text: str, domain, var: str = "x", **annotations) -> "AnalyticCurve":
        return cls(ex.parse(text, (var,)), tuple(domain), var, **annotations)

    @cached_property
    def derivative(self) -> ex.Expr:
        return ex.differentiate(self.expr, self.var)

    @cached_property
    def second_derivative(self) -> ex.Expr:
        return ex.differentiate(self.derivative, self.var)

    @cached_property
    def f(self):
        return ex.compile_expr(self.expr, (self.var,))

    @cached_property
    def df(self):
        return ex.compile_expr(self.derivative, (self.var,))

    @cached_property
    def d2f(self):
        return ex.compile_expr(self.second_derivative, (self.var,))

    def value(self, x: float) -> float:
        _check_domain(self, x)
        return self.f(x)

    def slope(self, x: float) -> float:
        _check_domain(self, x)
        try:
            return self.df(x)
        except DomainError as err:
            raise DerivativeUndefinedError(f"derivative undefined at x={x}: {err}") from err

    def to_dict(self) -> dict:
        return {"kind": "analytic", "expr": ex.to_text(self.expr), "domain": list(self.domain)}

    def __str__(self):
        return ex.to_text(self.expr)


@dataclass(frozen=True)
class SampledCurve:
    """Piecewise-linear curve through ``(x[i], y[i])``."""

    x: tuple
    y: tuple
    monotone: str | None = None
    convexity: str | None = None

    def __post_init__(self):
        xs = tuple(float(v) for v in self.x)
        ys = tuple(float(v) for v in self.y)
        if len(xs) != len(ys):
            raise PreconditionError("sampled curve needs as many ordinates as abscissas")
        if len(xs) < 2:
            raise PreconditionError("sampled curve needs at least two points")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise PreconditionError("sampled abscissas must be strictly increasing")
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "y", ys)

    @property
    def domain(self) -> tuple[float, float]:
        return (self.x[0], self.x[-1])

    def value(self, x: float) -> float:
        _check_domain(self, x)
        xs, ys = self.x, self.y
        i = bisect.bisect_left(xs, x)
        if i < len(xs) and xs[i] == x:
            return ys[i]
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def slope(self, x: float) -> float:
        """Central difference at interior nodes, one-sided at the ends, segment slope between nodes."""
        _check_domain(self, x)
        xs, ys = self.x, self.y
        i = bisect.bisect_left(xs, x)
        if i < len(xs) and xs[i] == x:
            lo, hi = max(i - 1, 0), min(i + 1, len(xs) - 1)
        else:
            lo, hi = i - 1, i
        return (ys[hi] - ys[lo]) / (xs[hi] - xs[lo])

    def breakpoints(self, lo: float, hi: float) -> list:
        """Sample abscissas strictly inside (lo, hi)."""
        i = bisect.bisect_right(self.x, lo)
        j = bisect.bisect_left(self.x, hi)
        return list(self.x[i:j])

    def to_dict(self) -> dict:
        return {"kind": "sampled", "x": list(self.x), "y": list(self.y)}


PlaneCurve = Union[AnalyticCurve, SampledCurve]


def _check_domain(c, x: float) -> None:
    lo, hi = c.domain
    if not lo <= x <= hi:
        raise OutOfDomainError(f"x={x} outside the curve domain [{lo}, {hi}]")


def curve_from_dict(d: dict) -> PlaneCurve:
    kind = d.get("kind")
    if kind == "analytic":
        return AnalyticCurve.from_text(d["expr"], d["domain"], d.get("var", "x"))
    if kind == "sampled":
        return SampledCurve(tuple(d["x"]), tuple(d["y"]))
    raise PreconditionError(f"unknown curve kind {kind!r}")


def curve_from_json(text: str) -> PlaneCurve:
    return curve_from_dict(json.loads(text))


def curve_to_json(c: PlaneCurve) -> str:
    return json.dumps(c.to_dict())


def eval_curve(c: PlaneCurve, x: float) -> float:
    return c.value(x)


def slope_at(c: PlaneCurve, x: float) -> float:
    return c.slope(x)


@dataclass(frozen=True)
class TangentData:
    x: float
    c: float
    slope: float
    subtangent: float
    subnormal: float
    foot: float
    # c == 0 with nonzero slope: subtangent reported as 0 and flagged
    zero_ordinate: bool = False


def tangent_data_at(c: PlaneCurve, x: float) -> TangentData:
    cx = c.value(x)
    s = c.slope(x)
    if s == 0:
        raise ZeroSlopeError(f"slope vanishes at x={x}; the subtangent is infinite")
    t = cx / s
    return TangentData(x=x, c=cx, slope=s, subtangent=t, subnormal=cx * s, foot=x - t, zero_ordinate=cx == 0)


@dataclass(frozen=True)
class CharacteristicTriangle:
    dx: float
    dc: float
    chord: float


def characteristic_triangle(c: PlaneCurve, x: float, dx: float) -> CharacteristicTriangle:
    if dx == 0:
        raise PreconditionError("characteristic triangle needs a nonzero base")
    dc = c.value(x + dx) - c.value(x)
    return CharacteristicTriangle(dx, dc, math.hypot(dx, dc))


def _probe_grid(a: float, b: float, n: int) -> list:
    return [a + (b - a) * i / (n - 1) for i in range(n)]


def convexity_probe(c: PlaneCurve, interval: Sequence[float] | None = None, n_probes: int = 101) -> str:
    """Classify ``c`` on ``interval`` by second differences on a uniform grid."""
    if n_probes < 3:
        raise PreconditionError("convexity probe needs at least 3 points")
    a, b = interval if interval is not None else c.domain
    vals = [c.value(x) for x in _probe_grid(a, b, n_probes)]
    scale = max(1.0, max(abs(v) for v in vals))
    tol = 1e-12 * scale
    d2 = [vals[i - 1] - 2 * vals[i] + vals[i + 1] for i in range(1, len(vals) - 1)]
    if all(d >= -tol for d in d2):
        return "convex"
    if all(d <= tol for d in d2):
        return "concave"
    return "neither"


def monotonicity_probe(c: PlaneCurve, interval: Sequence[float] | None = None, n_probes: int = 201) -> str:
    """Classify ``c`` as increasing, decreasing, constant or neither on a uniform grid."""
    a, b = interval if interval is not None else c.domain
    vals = [c.value(x) for x in _probe_grid(a, b, n_probes)]
    scale = max(1.0, max(abs(v) for v in vals))
    tol = 1e-12 * scale
    diffs = [q - p for p, q in zip(vals, vals[1:])]
    up = all(d >= -tol for d in diffs)
    down = all(d <= tol for d in diffs)
    if up and down:
        return "constant"
    if up:
        return "increasing"
    if down:
        return "decreasing"
    return "neither"


def check_annotations(c: PlaneCurve) -> None:
    """Verify any monotonicity/convexity annotation against a probe."""
    if c.monotone is not None:
        found = monotonicity_probe(c)
        if found != c.monotone and not (found == "constant" and c.monotone != "neither"):
            raise PreconditionError(f"curve annotated {c.monotone} but probes as {found}")
    if c.convexity is not None:
        found = convexity_probe(c)
        if found != c.convexity:
            raise PreconditionError(f"curve annotated {c.convexity} but probes as {found}")
