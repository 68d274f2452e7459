"""Kinematic model of the string-and-cam integrating device.

A pen at ``(x, z)`` is dragged by a taut string.  The string runs from a
point T on the axis up to the cylinder top (height ``ET``) and from T to the
pen C.  The total length ``ET + TC = U`` is fixed, so the in-plane reach is
``TC = U - ET`` and the pen drifts along ``TC`` with slope

    dz/dx = sigma * CR / TR,   CR = sqrt(TC**2 - x**2),   TR = x.

A cam profile ``ET(x) = U - x * sqrt(1 + w(x)**2)`` makes the slope equal to
``|w(x)|``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from . import expr as ex
from .curve import AnalyticCurve, PlaneCurve, SampledCurve
from .errors import InfeasibleCamError, PreconditionError, SimulationAccuracyError
from .quadrature import quadratrix
from .theorems import TheoremReport

FEASIBILITY_PROBES = 1001
RICHARDSON_BLOCK = 100
RICHARDSON_TOL = 1e-6
# stop this many steps short of a point where the string lies flat on the axis
SINGULAR_MARGIN = 10
ROUNDOFF = 1e-12
EPS = 2.0**-52


@dataclass(frozen=True)
class DeviceConfig:
    U: float
    h: float
    sigma: int = -1
    x0: float = 0.1
    z0: float = 0.0
    x1: float = 1.0

    def __post_init__(self):
        if not self.h > 0:
            raise PreconditionError("step size h must be positive")
        if not self.x0 > 0:
            raise PreconditionError("x0 must be positive: the slope is singular at x = 0")
        if not self.x1 > self.x0:
            raise PreconditionError("need x1 > x0")
        if self.sigma not in (1, -1):
            raise PreconditionError("sigma must be +1 or -1")
        if not self.U > 0:
            raise PreconditionError("string length U must be positive")


@dataclass(frozen=True)
class CamCurve:
    """Cylinder height ``ET`` as a curve over the device abscissa ``x = TR``."""

    ET: PlaneCurve
    U: float

    @property
    def domain(self):
        return self.ET.domain

    def reach(self, x: float) -> float:
        """``TC = U - ET(x)``."""
        return self.U - self.ET.value(x)

    def cr_squared(self, x: float) -> float:
        tc = self.reach(x)
        return tc * tc - x * x

    def check_feasible(self, lo: float | None = None, hi: float | None = None, n: int = FEASIBILITY_PROBES):
        a, b = self.domain
        lo = a if lo is None else lo
        hi = b if hi is None else hi
        slack = ROUNDOFF * self.U
        for k in range(n):
            x = lo + (hi - lo) * k / (n - 1)
            et = self.ET.value(x)
            if et < -slack:
                raise InfeasibleCamError(f"cam height ET({x:g}) = {et:g} is negative")
            if self.U - et < x - slack:
                raise InfeasibleCamError(f"string cannot reach the pen at x={x:g}: U - ET = {self.U - et:g} < x")

    def to_dict(self) -> dict:
        return {"U": self.U, "ET": self.ET.to_dict()}


def cam_from_slope_law(
    w: PlaneCurve | float,
    U: float,
    domain: Sequence[float] | None = None,
    a_const: float | None = None,
) -> CamCurve:
    """Cam encoding the slope law ``|dz/dx| = w(x)``.

    With ``a_const`` the target is the quadrature of ``w`` itself, and the
    slope law becomes ``w / a_const``.  A sampled ``w`` gives a sampled cam
    at the same abscissas.
    """
    if isinstance(w, (int, float)):
        if domain is None:
            raise PreconditionError("a constant slope law needs a domain")
        w = AnalyticCurve(_const(w), tuple(domain))
    lo, hi = tuple(domain) if domain is not None else w.domain
    wa, wb = w.domain
    if lo < wa or hi > wb:
        raise PreconditionError(f"cam domain [{lo}, {hi}] exceeds the slope law domain [{wa}, {wb}]")
    if isinstance(w, AnalyticCurve):
        law = w.expr if a_const is None else ex.div(w.expr, _const(a_const))
        x = ex.Var(w.var)
        et = ex.sub(_const(U), ex.mul(x, ex.call("sqrt", ex.add(ex.const(1), ex.power(law, 2)))))
        cam = CamCurve(AnalyticCurve(et, (lo, hi), w.var), float(U))
    else:
        scale = 1.0 if a_const is None else 1.0 / a_const
        pts = [(x, v * scale) for x, v in zip(w.x, w.y) if lo <= x <= hi]
        xs = [p[0] for p in pts]
        ets = [U - x * math.sqrt(1 + v * v) for x, v in pts]
        cam = CamCurve(SampledCurve(tuple(xs), tuple(ets)), float(U))
    cam.check_feasible()
    return cam


def _const(v: float) -> ex.Expr:
    # integral values go in exactly so the smart constructors can fold them
    v = float(v)
    return ex.const(ex.Fraction(int(v)) if v.is_integer() else v)


def constant_cam(U: float, ET: float, domain: Sequence[float]) -> CamCurve:
    """Constant cylinder height; the trace is a tractrix with ``a = U - ET``."""
    return CamCurve(AnalyticCurve(_const(ET), tuple(domain)), float(U))


class TraceState(NamedTuple):
    x: float
    z: float
    ET: float
    TC: float
    CR: float
    slope: float


@dataclass(frozen=True)
class DeviceTrace:
    states: tuple
    config: DeviceConfig
    truncated: bool = False
    notes: tuple = field(default_factory=tuple)

    @property
    def xs(self) -> list:
        return [s.x for s in self.states]

    @property
    def zs(self) -> list:
        return [s.z for s in self.states]

    def string_residual(self) -> float:
        """max |TC + ET - U| over the trace."""
        U = self.config.U
        return max(abs(s.TC + s.ET - U) for s in self.states)

    def pythagoras_residual(self) -> float:
        """max |TC^2 - x^2 - CR^2| over the trace."""
        return max(abs(s.TC * s.TC - s.x * s.x - s.CR * s.CR) for s in self.states)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TraceState._fields)
        for s in self.states:
            w.writerow([repr(float(v)) for v in s])
        return buf.getvalue()


def _grid(x0: float, x1: float, h: float) -> list:
    span = (x1 - x0) / h
    n = round(span)
    if abs(span - n) > 1e-9 * max(1.0, span):
        n = math.ceil(span)
    xs = [x0 + k * h for k in range(n)] + [x1]
    return xs


class _Field:
    """Right-hand side ``sigma * CR / x`` with the feasibility guard."""

    def __init__(self, cam: CamCurve, sigma: int):
        self.cam = cam
        self.sigma = sigma
        self.slack = ROUNDOFF * cam.U * cam.U

    def state(self, x: float, z: float) -> TraceState:
        et = self.cam.ET.value(x)
        tc = self.cam.U - et
        cr2 = (tc - x) * (tc + x)
        if cr2 < -self.slack:
            raise InfeasibleCamError(f"string too short at x={x:g}: CR^2 = {cr2:g}")
        # a string lying flat on the axis: treat roundoff-level CR^2 as zero.
        # TC = U - ET carries an error of a few ulps of U, not of TC
        if cr2 <= 4 * EPS * max(self.cam.U, abs(et), tc) * (abs(tc) + x):
            cr2 = 0.0
        cr = math.sqrt(cr2)
        return TraceState(x, z, et, tc, cr, self.sigma * cr / x)

    def __call__(self, x: float) -> float:
        return self.state(x, 0.0).slope


def _rk4(f: _Field, x: float, z: float, h: float) -> float:
    # the slope law depends on x only, but keep the classic stage structure
    k1 = f(x)
    k2 = f(x + h / 2)
    k3 = k2
    k4 = f(x + h)
    return z + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def _march(f: _Field, xs: Sequence[float], z: float) -> float:
    for xa, xb in zip(xs, xs[1:]):
        z = _rk4(f, xa, z, xb - xa)
    return z


def simulate_device(cam: CamCurve, cfg: DeviceConfig) -> DeviceTrace:
    """Fixed-step fourth-order integration of the pen trace.

    Every ``RICHARDSON_BLOCK`` steps the block is redone at half the step and
    the end values compared; a discrepancy above ``1e-6 * scale`` raises
    :class:`SimulationAccuracyError`.  If the string lies flat on the axis
    at ``x1`` the run stops ``10 h`` short and the trace is marked truncated.
    """
    if cam.U != cfg.U:
        raise PreconditionError(f"cam built for U={cam.U} but device has U={cfg.U}")
    a, b = cam.domain
    if cfg.x0 < a or cfg.x1 > b:
        raise PreconditionError(f"run [{cfg.x0}, {cfg.x1}] exceeds the cam domain [{a}, {b}]")
    f = _Field(cam, cfg.sigma)
    x1 = cfg.x1
    truncated = False
    notes = []
    if cam.cr_squared(x1) <= f.slack and cam.cr_squared(x1 - SINGULAR_MARGIN * cfg.h) > f.slack:
        x1 = x1 - SINGULAR_MARGIN * cfg.h
        truncated = True
        notes.append(f"string flat on the axis at x={cfg.x1:g}; stopped at x={x1:g}")
        if x1 <= cfg.x0:
            raise PreconditionError("run too short to stop before the singular end")
    xs = _grid(cfg.x0, x1, cfg.h)
    states = []
    z = cfg.z0
    try:
        states.append(f.state(xs[0], z))
        block_start = 0
        for k in range(1, len(xs)):
            z = _rk4(f, xs[k - 1], z, xs[k] - xs[k - 1])
            states.append(f.state(xs[k], z))
            if k - block_start == RICHARDSON_BLOCK or k == len(xs) - 1:
                _richardson(f, xs[block_start : k + 1], states[block_start].z, z)
                block_start = k
    except InfeasibleCamError as err:
        err.trace = DeviceTrace(tuple(states), cfg, True, tuple(notes))
        raise
    except SimulationAccuracyError as err:
        err.trace = DeviceTrace(tuple(states), cfg, True, tuple(notes))
        raise
    return DeviceTrace(tuple(states), cfg, truncated, tuple(notes))


def _richardson(f: _Field, xs: Sequence[float], z_start: float, z_end: float) -> None:
    fine = [xs[0]]
    for xa, xb in zip(xs, xs[1:]):
        fine += [xa + (xb - xa) / 2, xb]
    z_half = _march(f, fine, z_start)
    scale = max(1.0, abs(z_end), xs[-1] - xs[0])
    if abs(z_half - z_end) > RICHARDSON_TOL * scale:
        raise SimulationAccuracyError(
            f"step halving changed z by {abs(z_half - z_end):g} over [{xs[0]:g}, {xs[-1]:g}]"
        )


def tractrix_closed_form(a: float, x: float) -> float:
    """Tractrix height above the axis with ``z(a) = 0``: the antiderivative of ``-sqrt(a^2 - x^2) / x``."""
    if not 0 < x <= a:
        raise PreconditionError(f"tractrix needs 0 < x <= a, got x={x}, a={a}")
    r = math.sqrt(a * a - x * x)
    return a * math.log((a + r) / x) - r


def simulate_tractrix(a: float, h: float, x0: float, x1: float, U: float | None = None) -> DeviceTrace:
    """Constant cam with ``U - ET = a``, started on the closed form at ``x0``."""
    U = 2.0 * a if U is None else U
    cam = constant_cam(U, U - a, (x0, x1))
    cfg = DeviceConfig(U=U, h=h, sigma=-1, x0=x0, z0=tractrix_closed_form(a, x0), x1=x1)
    return simulate_device(cam, cfg)


def tractrix_error(trace: DeviceTrace, a: float) -> float:
    """sup |z - closed form| over the trace."""
    return max(abs(s.z - tractrix_closed_form(a, s.x)) for s in trace.states)


def verify_device_quadrature(
    f: PlaneCurve,
    a_const: float,
    U: float,
    domain: Sequence[float] | None = None,
    tol: float = 1e-5,
    h: float = 1e-3,
    max_nodes: int = 201,
) -> TheoremReport:
    """Trace of the cam built from ``w = f / a`` against the quadratrix of ``f``.

    Both sides start at zero at the left end of ``domain``.  The gap at the
    compared nodes must stay within ``tol`` plus the certification radius.
    """
    lo, hi = tuple(domain) if domain is not None else f.domain
    probe = [lo + (hi - lo) * k / 200 for k in range(201)]
    if min(f.value(x) for x in probe) < 0:
        raise PreconditionError("quadrature target must be non-negative")
    cam = cam_from_slope_law(f, U, (lo, hi), a_const=a_const)
    cfg = DeviceConfig(U=U, h=h, sigma=1, x0=lo, z0=0.0, x1=hi)
    trace = simulate_device(cam, cfg)
    states = trace.states
    stride = max(1, math.ceil((len(states) - 1) / (max_nodes - 1)))
    picked = list(states[::stride])
    if picked[-1] is not states[-1]:
        picked.append(states[-1])
    q = quadratrix(f, a_const, nodes=[s.x for s in picked], tol=tol)
    i0 = q.index(lo)
    zq0, r0 = q.z_mid[i0], q.radii[i0]
    details = []
    worst = 0.0
    for s in picked:
        i = q.index(s.x)
        gap = abs(s.z - (q.z_mid[i] - zq0))
        worst = max(worst, gap)
        details.append({"x": s.x, "z_trace": s.z, "z_quadratrix": q.z_mid[i] - zq0, "gap": gap})
    tolerance = tol + q.max_radius + r0
    inputs = {
        "f": str(f) if isinstance(f, AnalyticCurve) else f"sampled[{len(f.x)}]",
        "R": a_const,
        "U": U,
        "domain": [lo, hi],
        "step": h,
        "truncated": trace.truncated,
    }
    return TheoremReport("device", inputs, len(details), worst, tolerance, details, list(trace.notes))
