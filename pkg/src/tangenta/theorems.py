"""Machine checks of the tangency and area theorems behind the quadratrix.

Each ``verify_*`` function returns a :class:`TheoremReport`.  Single-quantity
checks report the quantity itself against its tolerance.  Checks made of
several parts report each part as ``measured / allowed`` and hold when the
largest ratio is at most 1.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import expr as ex
from .curve import AnalyticCurve, PlaneCurve, check_annotations, monotonicity_probe
from .errors import GridEdgeError, MonotonicityError, PreconditionError
from .quadrature import (
    Partition,
    QuadratrixCurve,
    barrow_subtangent,
    certify_area,
    oscillation_sum,
    quadratrix,
    tagged_sum,
)

# absolute slack added to every certified comparison, scaled by the problem size
SCALE_SLACK = 1e-9


@dataclass(frozen=True)
class TheoremReport:
    theorem: str
    inputs: dict
    probes: int
    max_violation: float
    tolerance: float
    details: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    frame: str = "barrow"

    @property
    def holds(self) -> bool:
        return self.max_violation <= self.tolerance

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"

    def to_dict(self) -> dict:
        d = {
            "theorem": self.theorem,
            "inputs": self.inputs,
            "probes": self.probes,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "details": self.details,
        }
        if self.notes:
            d["notes"] = self.notes
        if self.frame != "barrow":
            d["frame"] = self.frame
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _domain_scale(y: PlaneCurve, interval, zmax: float = 0.0, n: int = 65) -> float:
    a, b = interval
    ymax = max(abs(y.value(a + (b - a) * k / (n - 1))) for k in range(n))
    return max(ymax, abs(zmax), b - a)


def _curve_label(y: PlaneCurve) -> str:
    if isinstance(y, AnalyticCurve):
        return ex.to_text(y.expr)
    return f"sampled[{len(y.x)}]"


# --------------------------------------------------------------------------
# tangency of the area curve


def verify_prop11(
    y: PlaneCurve,
    R: float,
    x0: float,
    probes: Sequence[float],
    tol: float = 1e-6,
) -> TheoremReport:
    """Tangent to the area curve at ``x0`` stays on one side of it.

    The tangent passes through ``(x0, z(x0))`` with slope ``y(x0) / R``.  For
    increasing ``y`` the area curve is convex and the line must lie on or
    below it at every probe; for decreasing ``y`` it is concave and the line
    lies on or above.
    """
    a, b = y.domain
    if not a < x0 < b:
        raise PreconditionError(f"tangency point {x0} must be interior to [{a}, {b}]")
    check_annotations(y)
    trend = monotonicity_probe(y)
    if trend == "neither":
        raise MonotonicityError(f"{_curve_label(y)} is not monotone on [{a}, {b}]")
    grid = [a + (b - a) * k / 200 for k in range(201)]
    if min(y.value(x) for x in grid) < 0:
        raise PreconditionError("ordinates must be non-negative")
    convex = trend != "decreasing"

    q = quadratrix(y, R, nodes=list(probes) + [x0], tol=tol)
    i0 = q.index(x0)
    z0, r0 = q.z_mid[i0], q.radii[i0]
    y0 = y.value(x0)
    slope = y0 / R
    scale = _domain_scale(y, (a, b), max(abs(v) for v in q.z_hi))
    tolerance = r0 + q.max_radius + SCALE_SLACK * scale

    details = []
    worst = -math.inf
    for x in probes:
        i = q.index(float(x))
        line = z0 + slope * (x - x0)
        zm = q.z_mid[i]
        violation = line - zm if convex else zm - line
        worst = max(worst, violation)
        details.append(
            {
                "x": x,
                "line": line,
                "z_lo": q.z_lo[i],
                "z_hi": q.z_hi[i],
                "violation": violation,
                "tangency": x == x0,
                "strict": -violation > tolerance,
            }
        )
    notes = []
    if trend == "constant":
        notes.append("degenerate: constant ordinate, the area curve is a straight line")
    if y0 == 0:
        notes.append("zero ordinate at the tangency point: subtangent reported as 0")
    inputs = {
        "y": _curve_label(y),
        "R": R,
        "x0": x0,
        "case": "convex" if convex else "concave",
        "subtangent": (R * z0 / y0) if y0 else 0.0,
    }
    return TheoremReport("prop11", inputs, len(details), worst, tolerance, details, notes)


def verify_prop19(y: PlaneCurve, R: float, p: Partition, tol: float = 1e-6) -> TheoremReport:
    """Rectangle sum against R times the rise of the area curve.

    The tagged sum (left endpoints unless ``p`` carries tags) may differ from
    ``R * (z(b) - z(a))`` by at most the oscillation sum.
    """
    if p.tags is None:
        p = p.with_tags(0.0)
    a, b = p.interval
    rect = tagged_sum(y, p)
    q = quadratrix(y, R, nodes=[a, b], tol=tol)
    lo = q.index(a)
    hi = q.index(b)
    rise = R * (q.z_mid[hi] - q.z_mid[lo])
    radius = R * (q.radii[hi] + q.radii[lo])
    gap = abs(rect - rise)
    osc = oscillation_sum(y, p)
    scale = _domain_scale(y, (a, b), rise)
    bound = osc + radius + SCALE_SLACK * scale
    detail = {
        "cells": p.n,
        "rectangle_sum": rect,
        "R_dz": rise,
        "gap": gap,
        "oscillation": osc,
        "bound_to_gap": (osc / gap) if gap else math.inf,
    }
    if gap == 0:
        detail["bound_to_gap"] = None
    inputs = {"y": _curve_label(y), "R": R, "domain": [a, b], "cells": p.n}
    return TheoremReport("prop19", inputs, p.n, gap, bound, [detail])


# --------------------------------------------------------------------------
# Leibniz's tangency law


def verify_leibniz_tangency(
    y: PlaneCurve,
    a_const: float,
    x0: float,
    delta: float,
    halvings: int = 3,
    tol: float = 1e-8,
) -> TheoremReport:
    """Inscribed rectangle against the rise of the area curve over one step.

    Computed in the canonical frame with ``R = a``.  ``EC_bar`` is the rise of
    the tangent over the step ``delta`` (by similar triangles through the
    subtangent), ``E_C`` the certified rise of the area curve.  Parts, each
    as a ratio to its allowance:

    * ``rectangle``: ``a * EC_bar`` against ``delta * y(x0)``, relative 1e-12;
    * ``inequality``: ``EC_bar - E_C`` against the certification slack;
    * ``rate``: under step halving, ``1 - EC_bar/E_C`` shrinks by a factor
      within [1.7, 2.3] and the ratio never decreases.
    """
    if delta <= 0:
        raise PreconditionError("step must be positive")
    if a_const <= 0:
        raise PreconditionError("constant a must be positive")
    a, b = y.domain
    if not a <= x0 < x0 + delta <= b:
        raise PreconditionError(f"[{x0}, {x0 + delta}] must lie inside [{a}, {b}]")
    trend = monotonicity_probe(y, (x0, x0 + delta))
    if trend not in ("increasing", "constant"):
        raise MonotonicityError(f"y must increase on [{x0}, {x0 + delta}]")
    y0 = y.value(x0)
    if y0 <= 0:
        raise PreconditionError(f"y({x0}) must be positive")

    q = quadratrix(y, a_const, nodes=[x0], tol=tol)
    z0 = q.z(x0)
    t = barrow_subtangent(q, x0) if z0 > 0 else None
    scale = _domain_scale(y, (a, x0 + delta), z0)

    def step(d: float) -> dict:
        # triangle E C C_bar is similar to the one cut off by the subtangent
        ec_bar = d * z0 / t if t else d * y0 / a_const
        inc = certify_area(y, (x0, x0 + d), tol)
        return {
            "delta": d,
            "EC": d,
            "EC_bar": ec_bar,
            "E_C": inc.value / a_const,
            "E_C_radius": inc.radius / a_const,
        }

    steps = [step(delta / 2**k) for k in range(halvings + 1)]
    first = steps[0]
    slack = first["E_C_radius"] + SCALE_SLACK * scale
    rect_rel = abs(a_const * first["EC_bar"] - delta * y0) / abs(delta * y0)
    parts = {"rectangle": rect_rel / 1e-12, "inequality": (first["EC_bar"] - first["E_C"]) / slack}
    boundary = abs(first["E_C"] - first["EC_bar"]) <= slack
    notes = []
    for s in steps:
        s["ratio"] = s["EC_bar"] / s["E_C"]
    if boundary:
        notes.append("boundary case: EC_bar equals E_C (constant ordinate)")
    else:
        ratios = [s["ratio"] for s in steps]
        rates = [(1 - r0) / (1 - r1) for r0, r1 in zip(ratios, ratios[1:]) if 1 - r1 > 0]
        monotone = all(r1 >= r0 - 1e-12 for r0, r1 in zip(ratios, ratios[1:]))
        rate = rates[-1] if rates else math.inf
        parts["rate"] = abs(rate - 2.0) / 0.3 if monotone else math.inf
        for s, r in zip(steps[1:], rates):
            s["rate"] = r
    strict = first["E_C"] - first["EC_bar"] > slack
    inputs = {
        "y": _curve_label(y),
        "R": a_const,
        "x0": x0,
        "delta": delta,
        "subtangent": t if t is not None else 0.0,
        "boundary_case": boundary,
        "strict": strict,
    }
    details = [{"check": k, "ratio": v} for k, v in parts.items()] + steps
    return TheoremReport("leibniz", inputs, len(steps), max(parts.values()), 1.0, details, notes)


# --------------------------------------------------------------------------
# curve of subnormals


def _ulp(v: float) -> float:
    return math.ulp(v) if v else math.ulp(0.0)


def subnormal_sums(y: PlaneCurve, p: Partition) -> dict:
    """Both sides of the discrete subnormal identity over a uniform partition.

    Uses right-endpoint ordinates: ``n_i = y_i * (y_i - y_{i-1}) / dx``.
    """
    dx = p.widths[0]
    if any(w != dx for w in p.widths):
        raise PreconditionError("subnormal sums need a uniform partition")
    ys = [y.value(x) for x in p.nodes]
    dys = [q - r for r, q in zip(ys, ys[1:])]
    subnormals = [yi * dyi / dx for yi, dyi in zip(ys[1:], dys)]
    return {
        "cells": p.n,
        "subnormal_sum": math.fsum(dx * n for n in subnormals),
        "ordinate_sum": math.fsum(yi * dyi for yi, dyi in zip(ys[1:], dys)),
        "scale": math.fsum(abs(yi * dyi) for yi, dyi in zip(ys[1:], dys)),
    }


def subnormal_curve(y: AnalyticCurve) -> AnalyticCurve:
    """``n(x) = y y'``, built as half the derivative of ``y**2``."""
    half = ex.const(ex.Fraction(1, 2))
    n_expr = ex.mul(half, ex.differentiate(ex.power(y.expr, 2), y.var))
    return AnalyticCurve(n_expr, y.domain, y.var)


def verify_subnormal_area(
    y: PlaneCurve,
    p: Partition,
    tol: float = 1e-6,
    refinements: int = 2,
    ulps: float = 4.0,
) -> TheoremReport:
    """Area under the subnormal curve equals half the squared final ordinate.

    Parts, each as a ratio to its allowance:

    * ``identity``: sum of dx * n_i against sum of y_i * dy_i, in units of the
      last place of sum |y_i * dy_i|, allowance ``ulps``;
    * ``convergence``: the gap to (y(b)^2 - y(a)^2) / 2 shrinks under each
      doubling of the cell count (ratio of successive gaps, allowance 1);
    * ``analytic``: certified area of y y' against the same target, allowance
      ``tol`` plus the certification radius (analytic curves only).
    """
    a, b = p.interval
    ya, yb = y.value(a), y.value(b)
    target = 0.5 * (yb * yb - ya * ya)
    scale = _domain_scale(y, (a, b), target)
    levels = [subnormal_sums(y, p)]
    for k in range(1, refinements + 1):
        levels.append(subnormal_sums(y, Partition.uniform(a, b, p.n * 2**k)))
    first = levels[0]
    err_ulps = abs(first["subnormal_sum"] - first["ordinate_sum"]) / _ulp(first["scale"])
    parts = {"identity": err_ulps / ulps}

    gaps = [lv["ordinate_sum"] - target for lv in levels]
    for lv, g in zip(levels, gaps):
        lv["gap"] = g
    floor = SCALE_SLACK * scale
    shrink = [g1 / g0 for g0, g1 in zip(gaps, gaps[1:]) if abs(g0) > floor]
    parts["convergence"] = max(shrink) if shrink else 0.0

    notes = []
    details = []
    if ya != 0:
        notes.append("y(a) != 0: target is (y(b)^2 - y(a)^2) / 2")
    if isinstance(y, AnalyticCurve):
        area = certify_area(subnormal_curve(y), (a, b), tol)
        diff = abs(area.value - target)
        parts["analytic"] = diff / (tol + area.radius + floor)
        details.append({"check": "analytic", "area": area.to_dict(), "target": target})
    else:
        notes.append("analytic cross-check skipped for a sampled curve")
    details = [{"check": k, "ratio": v} for k, v in parts.items()] + details + levels
    inputs = {"y": _curve_label(y), "domain": [a, b], "cells": p.n, "target": target, "err_ulps": err_ulps}
    return TheoremReport("subnormal", inputs, len(levels), max(parts.values()), 1.0, details, notes)


# --------------------------------------------------------------------------
# slope form of the fundamental theorem


def ftc_check(
    y: PlaneCurve,
    R: float,
    grid: Sequence[float],
    tol: float = 1e-4,
    step: float | None = None,
) -> TheoremReport:
    """Central-difference slope of the area curve against ``y / R``.

    For every grid point the node table holds ``x - h``, ``x``, ``x + h``
    and the residual is ``|R * z'(x) - y(x)|``.  The certification tolerance
    is tied to ``h`` so bracket width contributes at most a fifth of ``tol``.
    """
    a, b = y.domain
    h = step if step is not None else 5e-3 * (b - a)
    for x in grid:
        if x - h < a or x + h > b:
            raise GridEdgeError(f"grid point {x} is within one step ({h:g}) of the domain edge")
    nodes = sorted({v for x in grid for v in (x - h, x, x + h)})
    q = quadratrix(y, R, nodes=nodes, tol=0.4 * h * tol)
    details = []
    worst = 0.0
    for x in grid:
        il, i, ih = q.index(x - h), q.index(x), q.index(x + h)
        dz = (q.z_mid[ih] - q.z_mid[il]) / (q.nodes[ih] - q.nodes[il])
        yx = y.value(x)
        residual = abs(R * dz - yx)
        worst = max(worst, residual)
        row = {"x": x, "R_dz": R * dz, "y": yx, "residual": residual}
        z = q.z_mid[i]
        if yx != 0 and dz != 0 and z != 0:
            row["subtangent"] = R * z / yx
            row["subtangent_from_slope"] = z / dz
        details.append(row)
    inputs = {"y": _curve_label(y), "R": R, "domain": [a, b], "step": h}
    return TheoremReport("ftc", inputs, len(details), worst, tol, details)


# --------------------------------------------------------------------------
# Barrow's frame versus Leibniz's


class LeibnizFrame:
    """Renaming between the canonical (Barrow) names and Leibniz's.

    Barrow's abscissa ``x`` (AD) is Leibniz's ``y`` (AF), the given ordinate
    ``y`` (DE) is ``z`` (FH), the area ordinate ``z`` (DF) is ``x`` (FC) and
    the scale length ``R`` is ``a``.
    """

    TO_LEIBNIZ = {"x": "y", "y": "z", "z": "x", "R": "a"}
    TO_BARROW = {v: k for k, v in TO_LEIBNIZ.items()}
    SEGMENTS = {"AD": "AF", "DE": "FH", "DF": "FC", "DT": "T'F"}

    _KEY = re.compile(r"^([A-Za-z])(\d*|_.*)$")

    @classmethod
    def rename(cls, key: str, to: str) -> str:
        table = cls.TO_LEIBNIZ if to == "leibniz" else cls.TO_BARROW
        m = cls._KEY.match(key)
        if m and m.group(1) in table:
            return table[m.group(1)] + m.group(2)
        return key

    @classmethod
    def rename_dict(cls, d: dict, to: str) -> dict:
        return {cls.rename(k, to): v for k, v in d.items()}


@dataclass(frozen=True)
class FramedValues:
    """Named quantities tagged with the frame their names belong to."""

    values: dict
    frame: str = "barrow"


def _other(frame: str) -> str:
    return "barrow" if frame == "leibniz" else "leibniz"


def to_leibniz_frame(obj):
    """Rename ``obj`` into the other frame; applying it twice is the identity.

    Accepts :class:`TheoremReport`, :class:`QuadratrixCurve` and
    :class:`FramedValues`.
    """
    if isinstance(obj, FramedValues):
        to = _other(obj.frame)
        return FramedValues(LeibnizFrame.rename_dict(obj.values, to), to)
    if isinstance(obj, TheoremReport):
        to = _other(obj.frame)
        details = [LeibnizFrame.rename_dict(d, to) if isinstance(d, dict) else d for d in obj.details]
        return replace(obj, inputs=LeibnizFrame.rename_dict(obj.inputs, to), details=details, frame=to)
    if isinstance(obj, QuadratrixCurve):
        return replace(obj, frame=_other(obj.frame))
    raise TypeError(f"cannot rename {type(obj).__name__}")


def quadratrix_labels(q: QuadratrixCurve) -> tuple[str, str]:
    """Column names (abscissa, area ordinate) for ``q`` in its frame."""
    return ("x", "z") if q.frame == "barrow" else ("y", "x")


def tangency_values(q: QuadratrixCurve, x: float) -> FramedValues:
    """Canonical quantities at ``x``: x, y, z, R and the subtangent DT."""
    return FramedValues(
        {"x": x, "y": q.base.value(x), "z": q.z(x), "R": q.R, "DT": barrow_subtangent(q, x)}
    )


def leibniz_subtangent(values: FramedValues) -> dict:
    """Leibniz's subtangent ``t = BT`` two ways from values in his frame.

    ``t_law`` is ``z * y / a``; ``t_similar`` comes from Barrow's subtangent
    (``T'F``, carried over as ``DT``) through the similar triangles
    ``TBC`` and ``T'FC``: ``t = BC * FC / T'F = y * x / DT``.
    """
    if values.frame != "leibniz":
        values = to_leibniz_frame(values)
    v = values.values
    return {"t_law": v["z"] * v["y"] / v["a"], "t_similar": v["y"] * v["x"] / v["DT"]}
