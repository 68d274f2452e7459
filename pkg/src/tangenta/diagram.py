"""Scenes for the two classical area-curve figures and a small SVG writer.

Scenes live in curve coordinates (abscissa right, ordinate up).  The writer
flips the ordinate for the screen and maps the padded bounding box onto the
requested pixel width with a uniform scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

from .curve import PlaneCurve, monotonicity_probe
from .errors import FigureGeometryError, PreconditionError
from .quadrature import quadratrix

CURVE_SAMPLES = 201
LABEL_OFFSET_PX = 8
PAD = 0.05


@dataclass(frozen=True)
class Polyline:
    points: tuple
    style: str = "curve"


@dataclass(frozen=True)
class Segment:
    p: tuple
    q: tuple
    style: str = "construction"


@dataclass(frozen=True)
class Marker:
    p: tuple
    label: str


def _points(prim) -> tuple:
    if isinstance(prim, Polyline):
        return prim.points
    if isinstance(prim, Segment):
        return (prim.p, prim.q)
    return (prim.p,)


@dataclass
class Scene:
    primitives: list = field(default_factory=list)
    bbox: tuple | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bbox is None:
            self.bbox = self.fit()
        else:
            self.check_bbox()

    def fit(self):
        pts = [p for prim in self.primitives for p in _points(prim)]
        if not pts:
            return None
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        return (min(xs), min(ys), max(xs), max(ys))

    def check_bbox(self) -> None:
        if self.bbox is None:
            return
        x0, y0, x1, y1 = self.bbox
        for prim in self.primitives:
            for x, y in _points(prim):
                if not (x0 <= x <= x1 and y0 <= y <= y1):
                    raise FigureGeometryError(f"point ({x:g}, {y:g}) outside the scene box")

    @property
    def markers(self) -> dict:
        return {m.label: m.p for m in self.primitives if isinstance(m, Marker)}

    def mirrored(self) -> "Scene":
        """Reflection in the abscissa axis (the 180 degree turn about it)."""

        def flip(p):
            return (p[0], 0.0 - p[1])

        prims = []
        for prim in self.primitives:
            if isinstance(prim, Polyline):
                prims.append(Polyline(tuple(flip(p) for p in prim.points), prim.style))
            elif isinstance(prim, Segment):
                prims.append(Segment(flip(prim.p), flip(prim.q), prim.style))
            else:
                prims.append(Marker(flip(prim.p), prim.label))
        return Scene(prims, None, dict(self.metadata))


def _sample(c, lo: float, hi: float, n: int = CURVE_SAMPLES) -> tuple:
    return tuple((x, c(x)) for x in (lo + (hi - lo) * k / (n - 1) for k in range(n)))


def _cross(o, p, q) -> float:
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def barrow_figure(y: PlaneCurve, R: float, x0: float, delta: float, tol: float = 1e-8) -> Scene:
    """Curve ZGE, area curve AIF, tangent TF and the triangle I, L, K.

    P sits ``delta`` to the left of D.  I is the area curve above P, L the
    foot of the horizontal through I on DF, and K the point of that
    horizontal on the tangent.  For increasing ``y``, ``LK < LI``.
    """
    a, b = y.domain
    if delta <= 0:
        raise PreconditionError("step must be positive")
    if not a <= x0 - delta < x0 <= b:
        raise PreconditionError(f"need {a} <= x0 - delta < x0 <= {b}")
    trend = monotonicity_probe(y)
    if trend == "neither":
        raise PreconditionError("figure needs a monotone curve")
    y0 = y.value(x0)
    if y0 <= 0:
        raise PreconditionError(f"y({x0}) must be positive")
    q = quadratrix(y, R, node_count=CURVE_SAMPLES, tol=tol)
    xp = x0 - delta
    z0, zi = q.z(x0), q.z(xp)
    slope = y0 / R
    t = R * z0 / y0

    A, D, P = (a, 0.0), (x0, 0.0), (xp, 0.0)
    Z, E, G = (a, y.value(a)), (x0, y0), (xp, y.value(xp))
    F, I, L = (x0, z0), (xp, zi), (x0, zi)
    T = (x0 - t, 0.0)
    K = (x0 - (z0 - zi) / slope, zi)

    scale = max(abs(v) for pt in (A, D, E, F, T, K) for v in pt) or 1.0
    if abs(_cross(T, F, K)) > 1e-9 * scale * scale:
        raise FigureGeometryError("K is off the tangent through T and F")
    lk, li = x0 - K[0], delta
    slack = 1e-9 * scale + q.max_radius / slope
    if trend == "increasing" and not lk <= li + slack:
        raise FigureGeometryError(f"LK = {lk:g} exceeds LI = {li:g}")
    if trend == "decreasing" and not lk >= li - slack:
        raise FigureGeometryError(f"LK = {lk:g} below LI = {li:g}")

    prims: list = [
        Segment((min(a, T[0]), 0.0), (b, 0.0), "axis"),
        Polyline(_sample(y.value, a, b), "curve"),
        Polyline(tuple(zip(q.nodes, q.z_mid)), "quadratrix"),
        Segment(T, (b, z0 + slope * (b - x0)), "tangent"),
        Segment(D, (x0, max(y0, z0)), "construction"),
        Segment(P, (xp, max(G[1], zi)), "construction"),
        Segment(I, L, "construction"),
    ]
    for label, p in (("A", A), ("Z", Z), ("D", D), ("E", E), ("F", F), ("T", T),
                     ("P", P), ("G", G), ("I", I), ("L", L), ("K", K)):
        prims.append(Marker(p, label))
    meta = {
        "figure": "barrow",
        "R": R,
        "x0": x0,
        "delta": delta,
        "subtangent": t,
        "LK": lk,
        "LI": li,
        "case": "concave" if trend == "decreasing" else "convex",
        "omitted": [],
    }
    return Scene(prims, None, meta)


def leibniz_figure(
    y: PlaneCurve,
    a_const: float,
    x0: float,
    delta: float,
    orientation: str = "canonical",
    tol: float = 1e-8,
) -> Scene:
    """Curve AH(H), area curve C(C), tangent TC and the corrected endpoints.

    ``C_bar`` is where the tangent at C meets the ordinate through (F);
    ``(C)`` is the area curve itself above (F).  For increasing ``y``
    ``C_bar`` lies strictly between E and ``(C)``.  With
    ``orientation="leibniz"`` the scene is mirrored in the axis.
    """
    if orientation not in ("canonical", "leibniz"):
        raise PreconditionError(f"unknown orientation {orientation!r}")
    if delta == 0:
        raise PreconditionError("degenerate step: delta = 0")
    if delta < 0:
        raise PreconditionError("step must be positive")
    a, b = y.domain
    if not a <= x0 < x0 + delta <= b:
        raise PreconditionError(f"[{x0}, {x0 + delta}] must lie inside [{a}, {b}]")
    trend = monotonicity_probe(y, (x0, x0 + delta))
    if trend not in ("increasing", "constant"):
        raise PreconditionError(f"y must increase on [{x0}, {x0 + delta}]")
    y0 = y.value(x0)
    if y0 <= 0:
        raise PreconditionError(f"y({x0}) must be positive")
    x1 = x0 + delta
    grid = [a + (x1 - a) * k / 100 for k in range(101)]
    q = quadratrix(y, a_const, nodes=grid + [x0, x1], tol=tol)
    z0, z1 = q.z_mid[q.index(x0)], q.z_mid[q.index(x1)]
    slope = y0 / a_const
    zbar = z0 + slope * delta

    A = (a, 0.0)
    F, H, C = (x0, 0.0), (x0, y0), (x0, z0)
    F1, H1, C1 = (x1, 0.0), (x1, y.value(x1)), (x1, z1)
    E, Cbar = (x1, z0), (x1, zbar)
    T = (a, z0 - slope * (x0 - a))
    B = (a, z0)

    scale = max(abs(v) for pt in (H1, C1, Cbar, T) for v in pt) or 1.0
    slack = q.max_radius + 1e-9 * scale
    gap = z1 - zbar
    boundary = abs(gap) <= slack
    if not boundary and gap < 0:
        raise FigureGeometryError(f"C_bar above (C) by {-gap:g}")

    prims: list = [
        Segment((a, 0.0), (b, 0.0), "axis"),
        Segment((a, min(0.0, T[1])), (a, max(z1, zbar, H1[1])), "axis"),
        Polyline(_sample(y.value, a, x1), "curve"),
        Polyline(tuple(zip(q.nodes, q.z_mid)), "quadratrix"),
        Segment(T, Cbar, "tangent"),
        Segment(F, (x0, max(y0, z0)), "construction"),
        Segment(F1, (x1, max(H1[1], z1, zbar)), "construction"),
        Segment(B, C, "construction"),
        Segment(C, E, "construction"),
    ]
    markers = [("A", A), ("F", F), ("H", H), ("C", C), ("(F)", F1), ("(H)", H1),
               ("E", E), ("T", T), ("B", B)]
    if boundary:
        markers.append(("C̄ = (C)", Cbar))
    else:
        markers += [("C̄", Cbar), ("(C)", C1)]
    prims += [Marker(p, label) for label, p in markers]
    meta = {
        "figure": "leibniz",
        "a": a_const,
        "x0": x0,
        "delta": delta,
        "EC_bar": zbar - z0,
        "E_C": z1 - z0,
        "C_bar_ordinate": zbar,
        "C_ordinate": z1,
        "boundary_case": boundary,
        "orientation": orientation,
        "omitted": [
            "G: point of the inassignable triangle GLC, placement not fixed by the text",
            "GL: side of the inassignable triangle, placement not fixed by the text",
        ],
    }
    scene = Scene(prims, None, meta)
    return scene.mirrored() if orientation == "leibniz" else scene


# --------------------------------------------------------------------------
# SVG

STYLES = {
    "axis": 'stroke="#000000" stroke-width="1"',
    "curve": 'stroke="#000000" stroke-width="1.5"',
    "quadratrix": 'stroke="#1f4e9c" stroke-width="1.5"',
    "tangent": 'stroke="#b22222" stroke-width="1"',
    "construction": 'stroke="#808080" stroke-width="0.75" stroke-dasharray="3 2"',
}


def fmt(v: float) -> str:
    s = format(v, ".6g")
    return "0" if s in ("-0", "0") else s


def render_svg(scene: Scene, width_px: int = 480) -> bytes:
    """SVG 1.1 bytes; a pure function of ``scene`` and ``width_px``."""
    if width_px < 64:
        raise PreconditionError("width_px must be at least 64")
    x0, y0, x1, y1 = scene.bbox if scene.bbox is not None else (0.0, 0.0, 1.0, 1.0)
    w, h = x1 - x0, y1 - y0
    if w == 0 and h == 0:
        w = h = 1.0
    # a degenerate extent borrows the other one so the scale stays finite
    w, h = (w or h), (h or w)
    x0, x1 = x0 - PAD * w, x1 + PAD * w
    y0, y1 = y0 - PAD * h, y1 + PAD * h
    s = width_px / (x1 - x0)
    height = (y1 - y0) * s

    def X(x):
        return fmt((x - x0) * s)

    def Y(y):
        return fmt((y1 - y) * s)

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(width_px)}" '
        f'height="{fmt(height)}" viewBox="0 0 {fmt(width_px)} {fmt(height)}">',
    ]
    title = scene.metadata.get("figure")
    if title:
        out.append(f"<title>{escape(str(title))}</title>")
    for prim in scene.primitives:
        if isinstance(prim, Polyline):
            pts = " ".join(f"{X(x)},{Y(y)}" for x, y in prim.points)
            out.append(f'<polyline fill="none" {STYLES.get(prim.style, STYLES["curve"])} points="{pts}"/>')
        elif isinstance(prim, Segment):
            out.append(
                f'<line x1="{X(prim.p[0])}" y1="{Y(prim.p[1])}" x2="{X(prim.q[0])}" y2="{Y(prim.q[1])}" '
                f'{STYLES.get(prim.style, STYLES["construction"])}/>'
            )
    for prim in scene.primitives:
        if isinstance(prim, Marker):
            px, py = (prim.p[0] - x0) * s, (y1 - prim.p[1]) * s
            out.append(f'<circle cx="{fmt(px)}" cy="{fmt(py)}" r="2.5" fill="#000000"/>')
            out.append(
                f'<text x="{fmt(px + LABEL_OFFSET_PX)}" y="{fmt(py - LABEL_OFFSET_PX)}" '
                f'font-family="serif" font-size="12" data-label={quoteattr(prim.label)}>{escape(prim.label)}</text>'
            )
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def marker_ordinate(scene: Scene, label: str) -> float:
    """Distance of a marker from the abscissa axis."""
    return abs(scene.markers[label][1])


def scene_points(scene: Scene) -> Sequence[tuple]:
    return [p for prim in scene.primitives for p in _points(prim)]
