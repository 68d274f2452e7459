"""Certified Riemann/Darboux integration and quadratrix (area curve) construction.

All rectangle sums are accumulated in exact rational arithmetic over the
float inputs (every double is a dyadic rational), then rounded once.  That
keeps ``upper - lower == oscillation`` an exact identity instead of a
rounding accident.
"""

from __future__ import annotations

import bisect
import csv
import heapq
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curve import AnalyticCurve, PlaneCurve, SampledCurve
from .errors import DomainError, IterationCapError, PreconditionError, ZeroOrdinateError

# slope samples per cell when hunting interior critical points
_SLOPE_SAMPLES = 5
_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class Partition:
    """Nodes ``a = x0 < x1 < ... < xn = b`` with per-cell widths and optional tags in [0, 1]."""

    nodes: tuple
    widths: tuple
    tags: tuple | None = None

    def __post_init__(self):
        nodes = tuple(float(v) for v in self.nodes)
        if len(nodes) < 2 or any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise PreconditionError("partition nodes must be strictly increasing, at least two")
        widths = tuple(float(w) for w in self.widths)
        if len(widths) != len(nodes) - 1 or any(w <= 0 for w in widths):
            raise PreconditionError("one positive width per cell is required")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "widths", widths)
        if self.tags is not None:
            tags = tuple(float(t) for t in self.tags)
            if len(tags) != len(widths) or any(not 0.0 <= t <= 1.0 for t in tags):
                raise PreconditionError("tags must be one value in [0, 1] per cell")
            object.__setattr__(self, "tags", tags)

    @classmethod
    def uniform(cls, a: float, b: float, n: int, tags=None) -> "Partition":
        """``n`` equal cells of width ``d = (b - a) / n``; ``tags`` may be a scalar."""
        if n < 1:
            raise PreconditionError("a partition needs at least one cell")
        d = (b - a) / n
        nodes = [a + i * d for i in range(n)] + [float(b)]
        if isinstance(tags, (int, float)):
            tags = (float(tags),) * n
        return cls(tuple(nodes), (d,) * n, tags)

    @classmethod
    def from_nodes(cls, nodes: Sequence[float], tags=None) -> "Partition":
        nodes = tuple(float(v) for v in nodes)
        widths = tuple(b - a for a, b in zip(nodes, nodes[1:]))
        if isinstance(tags, (int, float)):
            tags = (float(tags),) * len(widths)
        return cls(nodes, widths, tags)

    @property
    def interval(self) -> tuple[float, float]:
        return (self.nodes[0], self.nodes[-1])

    @property
    def n(self) -> int:
        return len(self.widths)

    def with_tags(self, tags) -> "Partition":
        if isinstance(tags, (int, float)):
            tags = (float(tags),) * self.n
        return Partition(self.nodes, self.widths, tags)

    def refined(self, i: int) -> "Partition":
        """Split cell ``i`` at its midpoint."""
        lo, hi = self.nodes[i], self.nodes[i + 1]
        mid = lo + (hi - lo) / 2
        if not lo < mid < hi:
            raise PreconditionError(f"cell [{lo!r}, {hi!r}] is too narrow to split in floating point")
        nodes = self.nodes[: i + 1] + (mid,) + self.nodes[i + 1 :]
        widths = self.widths[:i] + (mid - lo, hi - mid) + self.widths[i + 1 :]
        tags = None if self.tags is None else self.tags[:i] + (self.tags[i],) * 2 + self.tags[i + 1 :]
        return Partition(nodes, widths, tags)


# --------------------------------------------------------------------------
# cell extrema


def _safe(f, x):
    try:
        return f(x)
    except DomainError:
        return None


def _bisect_root(g, lo: float, hi: float, glo: float) -> float:
    while hi - lo > _BISECT_TOL * max(1.0, abs(lo), abs(hi)):
        mid = lo + (hi - lo) / 2
        gm = _safe(g, mid)
        if gm is None:
            break
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return lo + (hi - lo) / 2


def _sign_change_points(g, lo: float, hi: float, samples: int = _SLOPE_SAMPLES) -> list:
    """Abscissas in [lo, hi] where ``g`` vanishes or changes sign."""
    xs = [lo + (hi - lo) * k / (samples - 1) for k in range(samples)]
    pts = [(x, _safe(g, x)) for x in xs]
    pts = [(x, v) for x, v in pts if v is not None]
    out = [x for x, v in pts if v == 0]
    for (x0, g0), (x1, g1) in zip(pts, pts[1:]):
        if g0 != 0 and g1 != 0 and (g0 > 0) != (g1 > 0):
            out.append(_bisect_root(g, x0, x1, g0))
    return out


def cell_extrema(c: PlaneCurve, lo: float, hi: float) -> tuple[float, float]:
    """Infimum and supremum of ``c`` on [lo, hi].

    Sampled curves are piecewise linear, so endpoints and interior breakpoints
    suffice.  Analytic curves add interior critical points found by
    sign-change bisection of the slope.
    """
    vals = [c.value(lo), c.value(hi)]
    if isinstance(c, SampledCurve):
        vals += [c.value(x) for x in c.breakpoints(lo, hi)]
    else:
        for x in _sign_change_points(c.df, lo, hi):
            v = _safe(c.f, x)
            if v is not None:
                vals.append(v)
    return min(vals), max(vals)


@dataclass(frozen=True)
class DarbouxTable:
    """Per-cell bookkeeping of a curve over a partition."""

    partition: Partition
    infima: tuple
    suprema: tuple
    lower_exact: Fraction
    upper_exact: Fraction
    oscillation_exact: Fraction

    @property
    def lower(self) -> float:
        return float(self.lower_exact)

    @property
    def upper(self) -> float:
        return float(self.upper_exact)

    @property
    def oscillation(self) -> float:
        return float(self.oscillation_exact)

    @property
    def oscillations(self) -> tuple:
        return tuple(M - m for m, M in zip(self.infima, self.suprema))


def _exact_dot(ws, vs) -> Fraction:
    return sum((Fraction(w) * Fraction(v) for w, v in zip(ws, vs)), Fraction(0))


def darboux_table(c: PlaneCurve, p: Partition) -> DarbouxTable:
    ext = [cell_extrema(c, lo, hi) for lo, hi in zip(p.nodes, p.nodes[1:])]
    ms = tuple(m for m, _ in ext)
    Ms = tuple(M for _, M in ext)
    lower = _exact_dot(p.widths, ms)
    upper = _exact_dot(p.widths, Ms)
    osc = sum((Fraction(w) * (Fraction(M) - Fraction(m)) for w, m, M in zip(p.widths, ms, Ms)), Fraction(0))
    return DarbouxTable(p, ms, Ms, lower, upper, osc)


def darboux_sums(c: PlaneCurve, p: Partition) -> tuple[float, float]:
    t = darboux_table(c, p)
    return t.lower, t.upper


def tagged_sum(c: PlaneCurve, p: Partition) -> float:
    """Sum of ``width_i * c(x_{i-1} + tag_i * width_i)``."""
    if p.tags is None:
        raise PreconditionError("tagged sum needs a tag per cell")
    # clamp into the cell: uniform widths may differ from node gaps by an ulp
    pts = [min(x + t * w, nxt) for x, nxt, t, w in zip(p.nodes, p.nodes[1:], p.tags, p.widths)]
    return float(_exact_dot(p.widths, [c.value(x) for x in pts]))


def oscillation_sum(c: PlaneCurve, p: Partition) -> float:
    """Sum of ``width_i * (sup_i - inf_i)``, equal to upper minus lower."""
    return darboux_table(c, p).oscillation


# --------------------------------------------------------------------------
# certified area


@dataclass(frozen=True)
class CertifiedArea:
    lower: float
    upper: float
    cells: int = 0
    oscillation: float | None = None

    @property
    def value(self) -> float:
        return self.lower + (self.upper - self.lower) / 2

    @property
    def radius(self) -> float:
        return (self.upper - self.lower) / 2

    def contains(self, v: float) -> bool:
        return self.lower <= v <= self.upper

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "value": self.value, "radius": self.radius}


def _curvature_sign(c: AnalyticCurve, lo: float, hi: float) -> int:
    """+1 convex, -1 concave, 0 unknown/mixed on [lo, hi]."""
    vals = [_safe(c.d2f, lo + (hi - lo) * k / 4) for k in range(5)]
    vals = [v for v in vals if v is not None]
    if len(vals) < 3:
        return 0
    if all(v >= 0 for v in vals):
        return 1
    if all(v <= 0 for v in vals):
        return -1
    return 0


class _Cell:
    __slots__ = ("lo", "hi", "lower", "upper", "osc")

    def __init__(self, lo, hi, lower, upper, osc):
        self.lo, self.hi, self.lower, self.upper, self.osc = lo, hi, lower, upper, osc

    @property
    def width(self):
        return self.upper - self.lower


def _sampled_exact(c: SampledCurve, lo: float, hi: float) -> float:
    xs = [lo] + c.breakpoints(lo, hi) + [hi]
    ys = [c.value(x) for x in xs]
    return math.fsum((x1 - x0) * (y0 + y1) / 2 for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]))


def _make_cell(c: PlaneCurve, lo: float, hi: float, method: str) -> _Cell:
    m, M = cell_extrema(c, lo, hi)
    w = hi - lo
    lower, upper = w * m, w * M
    if method == "enclosure":
        if isinstance(c, SampledCurve):
            lower = upper = min(max(_sampled_exact(c, lo, hi), lower), upper)
        else:
            sign = _curvature_sign(c, lo, hi)
            if sign:
                fm = _safe(c.f, lo + w / 2)
                if fm is not None:
                    tangent = w * fm
                    trapezoid = w * (c.f(lo) + c.f(hi)) / 2
                    lo_b, hi_b = (tangent, trapezoid) if sign > 0 else (trapezoid, tangent)
                    lower, upper = max(lower, lo_b), min(upper, hi_b)
                    if lower > upper:
                        # rounding crossed the bounds on a (nearly) linear cell
                        lower = upper = (lower + upper) / 2
    return _Cell(lo, hi, lower, upper, w * (M - m))


def _refine(c: PlaneCurve, cells: list, tol: float, method: str, max_cells: int) -> list:
    """Bisect the widest cell (ties: smaller x) until the total width is within ``tol``."""
    heap = [(-cell.width, cell.lo, i) for i, cell in enumerate(cells)]
    heapq.heapify(heap)
    store = {i: cell for i, cell in enumerate(cells)}
    counter = len(cells)
    total = math.fsum(cell.width for cell in cells)
    while True:
        while total > tol and heap:
            _, _, key = heapq.heappop(heap)
            cell = store.pop(key)
            if len(store) + 2 > max_cells:
                raise IterationCapError(f"more than {max_cells} cells needed for tolerance {tol:g}")
            mid = cell.lo + (cell.hi - cell.lo) / 2
            if not cell.lo < mid < cell.hi:
                raise IterationCapError(f"cell at x={cell.lo} cannot be bisected further")
            kids = (_make_cell(c, cell.lo, mid, method), _make_cell(c, mid, cell.hi, method))
            total += kids[0].width + kids[1].width - cell.width
            for kid in kids:
                store[counter] = kid
                heapq.heappush(heap, (-kid.width, kid.lo, counter))
                counter += 1
        ordered = sorted(store.values(), key=lambda cell: cell.lo)
        exact = sum((Fraction(cell.upper) - Fraction(cell.lower) for cell in ordered), Fraction(0))
        if exact <= tol:
            return ordered
        total = max(float(exact), math.nextafter(tol, math.inf))


def certify_area(
    c: PlaneCurve,
    interval: Sequence[float] | None = None,
    tol: float = 1e-6,
    *,
    method: str = "enclosure",
    max_cells: int = 10**6,
) -> CertifiedArea:
    """Bracket the area under ``c`` on ``interval`` to total width ``tol``.

    ``method="darboux"`` uses plain inscribed/circumscribed rectangles, so the
    width is the oscillation sum.  The default ``"enclosure"`` intersects
    those rectangles with midpoint-tangent and trapezoid bounds on cells whose
    curvature sign is certified, which converges at second order.
    """
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    if method not in ("enclosure", "darboux"):
        raise ValueError(f"unknown method {method!r}")
    a, b = interval if interval is not None else c.domain
    if a == b:
        return CertifiedArea(0.0, 0.0, 0, 0.0)
    cells = _refine(c, [_make_cell(c, a, b, method)], tol, method, max_cells)
    return _summarize(cells)


def _summarize(cells) -> CertifiedArea:
    lower = sum((Fraction(cell.lower) for cell in cells), Fraction(0))
    upper = sum((Fraction(cell.upper) for cell in cells), Fraction(0))
    osc = sum((Fraction(cell.osc) for cell in cells), Fraction(0))
    return CertifiedArea(float(lower), float(upper), len(cells), float(osc))


# --------------------------------------------------------------------------
# quadratrix


@dataclass(frozen=True)
class QuadratrixCurve:
    """Area curve ``R * z(x) = area(a..x)`` of ``base``, certified per node.

    ``frame`` records the naming convention for export; the numbers are the
    same in both frames.
    """

    base: PlaneCurve
    R: float
    nodes: tuple
    z_lo: tuple
    z_hi: tuple
    tol: float
    frame: str = "barrow"

    @property
    def z_mid(self) -> tuple:
        return tuple(lo + (hi - lo) / 2 for lo, hi in zip(self.z_lo, self.z_hi))

    @property
    def radii(self) -> tuple:
        return tuple((hi - lo) / 2 for lo, hi in zip(self.z_lo, self.z_hi))

    @property
    def max_radius(self) -> float:
        return max(self.radii)

    def index(self, x: float) -> int | None:
        i = bisect.bisect_left(self.nodes, x)
        if i < len(self.nodes) and self.nodes[i] == x:
            return i
        return None

    def certified_at(self, x: float) -> tuple[float, float]:
        """Bounds on z(x); off-node abscissas extend the nearest node below."""
        i = self.index(x)
        if i is not None:
            return self.z_lo[i], self.z_hi[i]
        a, b = self.base.domain
        if not self.nodes[0] <= x <= b:
            raise PreconditionError(f"x={x} outside the quadratrix range")
        j = bisect.bisect_left(self.nodes, x) - 1
        extra = certify_area(self.base, (self.nodes[j], x), self.tol)
        return self.z_lo[j] + extra.lower / self.R, self.z_hi[j] + extra.upper / self.R

    def z(self, x: float) -> float:
        lo, hi = self.certified_at(x)
        return lo + (hi - lo) / 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "z_lo", "z_hi", "z_mid"])
        for row in zip(self.nodes, self.z_lo, self.z_hi, self.z_mid):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def as_sampled(self) -> SampledCurve:
        return SampledCurve(self.nodes, self.z_mid)


def quadratrix(
    y: PlaneCurve,
    R: float = 1.0,
    node_count: int = 51,
    tol: float = 1e-6,
    *,
    nodes: Sequence[float] | None = None,
    method: str = "enclosure",
    max_cells: int = 10**6,
) -> QuadratrixCurve:
    """Certified area curve of ``y`` scaled by ``R``.

    Every node interval is refined together until the summed bracket width
    over the whole domain is within ``tol`` (in area units), so each node's
    area carries a radius of at most ``tol / 2``.
    """
    if R <= 0:
        raise PreconditionError("scale length R must be positive")
    a, b = y.domain
    if nodes is None:
        if node_count < 2:
            raise PreconditionError("need at least two quadratrix nodes")
        nodes = [a + (b - a) * i / (node_count - 1) for i in range(node_count)]
        nodes[-1] = b
    else:
        nodes = sorted(set(float(v) for v in nodes) | {a})
        if nodes[0] < a or nodes[-1] > b:
            raise PreconditionError("quadratrix nodes outside the curve domain")
    cells = [_make_cell(y, lo, hi, method) for lo, hi in zip(nodes, nodes[1:])]
    cells = _refine(y, cells, tol, method, max_cells)
    z_lo, z_hi = [0.0], [0.0]
    acc_lo = acc_hi = Fraction(0)
    k = 1
    for cell in cells:
        acc_lo += Fraction(cell.lower)
        acc_hi += Fraction(cell.upper)
        if k < len(nodes) and cell.hi == nodes[k]:
            z_lo.append(float(acc_lo) / R)
            z_hi.append(float(acc_hi) / R)
            k += 1
    return QuadratrixCurve(y, float(R), tuple(nodes), tuple(z_lo), tuple(z_hi), tol)


def barrow_subtangent(q: QuadratrixCurve, x: float) -> float:
    """``R * z(x) / y(x)``, the subtangent of the area curve."""
    yx = q.base.value(x)
    if yx == 0:
        raise ZeroOrdinateError(f"ordinate vanishes at x={x}; subtangent undefined")
    return q.R * q.z(x) / yx
