"""Command-line front end.

Exit codes: 0 success, 1 a theorem verdict fails, 2 usage error, 3 a
precondition or domain error.  Errors go to stderr as one JSON object.

Options may come from a JSON file given with ``--config``; flags on the
command line win over the file, and the file wins over ``DEFAULTS``.  When
``TANGENTA_OUT`` is set, output files are written into that directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .curve import AnalyticCurve, curve_from_dict
from .diagram import barrow_figure, leibniz_figure, render_svg
from .errors import PreconditionError, TangentaError
from .quadrature import Partition, darboux_table, quadratrix, tagged_sum
from .theorems import (
    ftc_check,
    verify_leibniz_tangency,
    verify_prop11,
    verify_prop19,
    verify_subnormal_area,
)
from .tractional import (
    DeviceConfig,
    cam_from_slope_law,
    simulate_device,
    simulate_tractrix,
    verify_device_quadrature,
)

DEFAULTS = {
    "R": 1.0,
    "a": 1.0,
    "tol": 1e-6,
    "probes": 50,
    "step": 1e-4,
    "nodes": 51,
    "cells": 100,
    "tag": 0.0,
    "delta": 0.25,
    "sigma": -1,
    "z0": 0.0,
    "width": 480,
    "orientation": "canonical",
    "roundtrip_step": 1e-3,
}

DEFAULT_NAMES = {
    "quadratrix": "quadratrix.csv",
    "verify": "report.json",
    "riemann": "riemann.json",
    "device": "trace.csv",
    "render": "figure.svg",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _help(key: str, text: str) -> str:
    return f"{text} (default {DEFAULTS[key]})" if key in DEFAULTS else text


def _add_curve(p: argparse.ArgumentParser, name: str = "curve") -> None:
    p.add_argument(f"--{name}", dest="curve", metavar="EXPR", help=f"{name} as an expression in x")
    p.add_argument(f"--{name}-file", dest="curve_file", metavar="JSON", help=f"{name} as a JSON curve file")
    p.add_argument("--domain", nargs=2, type=float, metavar=("A", "B"), help="closed interval [A, B]")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="JSON", help="JSON file of option values")
    p.add_argument("--out", metavar="PATH", help="output file (stdout when omitted)")


def _opt(p, name, typ, text, **kw):
    p.add_argument(f"--{name}", type=typ, default=None, help=_help(name, text), **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tangenta", description="Area curves, tangency checks and the tractional device.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("quadratrix", help="certified area curve as a node CSV")
    _add_curve(p)
    _add_common(p)
    _opt(p, "R", float, "scale length")
    _opt(p, "nodes", int, "number of nodes")
    _opt(p, "tol", float, "total certification tolerance (area units)")

    pv = sub.add_parser("verify", help="theorem checks, exit 0 iff the verdict holds")
    vsub = pv.add_subparsers(dest="theorem", required=True, parser_class=_Parser)
    p = vsub.add_parser("prop11", help="tangent to the area curve stays on one side")
    _add_curve(p)
    _add_common(p)
    _opt(p, "R", float, "scale length")
    p.add_argument("--x0", type=float, help="tangency point (default: domain midpoint)")
    _opt(p, "probes", int, "number of uniformly spaced probes")
    _opt(p, "tol", float, "certification tolerance")
    p = vsub.add_parser("prop19", help="rectangle sum against R times the rise")
    _add_curve(p)
    _add_common(p)
    _opt(p, "R", float, "scale length")
    _opt(p, "cells", int, "uniform cells")
    _opt(p, "tag", float, "tag position inside each cell, 0 = left end")
    _opt(p, "tol", float, "certification tolerance")
    p = vsub.add_parser("leibniz", help="inscribed rectangle against the area increment")
    _add_curve(p)
    _add_common(p)
    _opt(p, "a", float, "constant a (scale length)")
    p.add_argument("--x0", type=float, help="base point (default: domain midpoint)")
    _opt(p, "delta", float, "step")
    _opt(p, "tol", float, "certification tolerance")
    p = vsub.add_parser("subnormal", help="area under the subnormal curve")
    _add_curve(p)
    _add_common(p)
    _opt(p, "cells", int, "uniform cells")
    _opt(p, "tol", float, "certification tolerance")
    p = vsub.add_parser("ftc", help="slope of the area curve against y / R")
    _add_curve(p)
    _add_common(p)
    _opt(p, "R", float, "scale length")
    _opt(p, "probes", int, "number of interior grid points")
    _opt(p, "tol", float, "allowed residual")
    p.add_argument("--step", type=float, help="central difference step (default 0.005 (B - A))")

    p = sub.add_parser("riemann", help="Darboux sums, tagged sum and oscillation sum")
    _add_curve(p)
    _add_common(p)
    _opt(p, "cells", int, "uniform cells")
    _opt(p, "tag", float, "tag position inside each cell, 0 = left end")

    pd = sub.add_parser("device", help="string-and-cam integrator")
    dsub = pd.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    p = dsub.add_parser("cam", help="cam profile for a slope law, as curve JSON")
    _add_curve(p, "w")
    _add_common(p)
    p.add_argument("--U", type=float, required=False, help="total string length")
    p.add_argument("--a", type=float, help="quadrature constant: use w / a as the slope law")
    p = dsub.add_parser("simulate", help="trace CSV for a slope law")
    _add_curve(p, "w")
    _add_common(p)
    p.add_argument("--U", type=float, help="total string length")
    p.add_argument("--from", dest="x_from", type=float, help="start abscissa (default: domain start)")
    p.add_argument("--to", dest="x_to", type=float, help="end abscissa (default: domain end)")
    _opt(p, "step", float, "integration step")
    _opt(p, "sigma", int, "slope sign, +1 or -1", choices=(1, -1))
    _opt(p, "z0", float, "initial pen height")
    p = dsub.add_parser("tractrix", help="trace CSV for a constant cam")
    _add_common(p)
    _opt(p, "a", float, "in-plane string length")
    p.add_argument("--U", type=float, help="total string length (default 2a)")
    p.add_argument("--from", dest="x_from", type=float, required=False, help="start abscissa, 0 < from")
    p.add_argument("--to", dest="x_to", type=float, required=False, help="end abscissa, to <= a")
    _opt(p, "step", float, "integration step")
    p = dsub.add_parser("roundtrip", help="device trace against the quadratrix (report JSON)")
    _add_curve(p, "curve")
    _add_common(p)
    _opt(p, "a", float, "quadrature constant")
    p.add_argument("--U", type=float, help="total string length (default: twice the smallest feasible)")
    p.add_argument("--step", type=float, help=f"integration step (default {DEFAULTS['roundtrip_step']})")
    p.add_argument("--tol", type=float, help="allowed gap (default 1e-5)")

    pr = sub.add_parser("render", help="SVG figures")
    rsub = pr.add_subparsers(dest="figure", required=True, parser_class=_Parser)
    p = rsub.add_parser("barrow", help="area curve, tangent and characteristic triangle")
    _add_curve(p)
    _add_common(p)
    _opt(p, "R", float, "scale length")
    p.add_argument("--x0", type=float, help="tangency point (default: domain midpoint)")
    _opt(p, "delta", float, "offset of P to the left of D")
    _opt(p, "width", int, "image width in pixels")
    p = rsub.add_parser("leibniz", help="tangent, C_bar and (C)")
    _add_curve(p)
    _add_common(p)
    _opt(p, "a", float, "constant a")
    p.add_argument("--x0", type=float, help="base point (default: domain midpoint)")
    _opt(p, "delta", float, "step")
    _opt(p, "width", int, "image width in pixels")
    _opt(p, "orientation", str, "canonical or leibniz (mirrored)", choices=("canonical", "leibniz"))
    return parser


class Options:
    """Resolved options: command line, then config file, then ``DEFAULTS``."""

    def __init__(self, ns: argparse.Namespace, config: dict):
        self._ns = ns
        self._config = config

    def get(self, key, default=None):
        v = getattr(self._ns, key, None)
        if v is not None:
            return v
        if key in self._config:
            return self._config[key]
        return DEFAULTS.get(key, default)

    def given(self, key):
        """Command line or config value only, ignoring ``DEFAULTS``."""
        v = getattr(self._ns, key, None)
        return self._config.get(key) if v is None else v

    def require(self, key, flag=None):
        v = self.get(key)
        if v is None:
            raise UsageError(f"missing required option --{flag or key}")
        return v


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err.strerror}") from err
    except json.JSONDecodeError as err:
        raise UsageError(f"config {path} is not valid JSON: {err.msg}") from err
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _curve(opts: Options):
    expr, path = opts.get("curve"), opts.get("curve_file")
    if (expr is None) == (path is None):
        raise UsageError("give exactly one curve source: an expression or a JSON file")
    domain = opts.get("domain")
    if expr is not None:
        if domain is None:
            raise UsageError("--domain is required with an inline expression")
        return AnalyticCurve.from_text(str(expr), tuple(domain))
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise UsageError(f"cannot read curve file {path}: {err.strerror}") from err
    except json.JSONDecodeError as err:
        raise PreconditionError(f"curve file {path} is not valid JSON: {err.msg}") from err
    if domain is not None and data.get("kind") == "analytic":
        data = dict(data, domain=list(domain))
    return curve_from_dict(data)


def _positive(name: str, v: float) -> float:
    if not v > 0:
        raise UsageError(f"--{name} must be positive")
    return v


def _midpoint(c) -> float:
    a, b = c.domain
    return a + (b - a) / 2


def _report(rep) -> tuple[str, int]:
    return rep.to_json() + "\n", 0 if rep.holds else 1


def _run_verify(opts: Options, theorem: str) -> tuple[str, int]:
    y = _curve(opts)
    a, b = y.domain
    tol = _positive("tol", opts.get("tol"))
    if theorem == "prop11":
        n = opts.get("probes")
        probes = [a + (b - a) * k / (n - 1) for k in range(n)]
        probes[-1] = b
        return _report(verify_prop11(y, _positive("R", opts.get("R")), opts.get("x0", _midpoint(y)), probes, tol))
    if theorem == "prop19":
        p = Partition.uniform(a, b, opts.get("cells"), opts.get("tag"))
        return _report(verify_prop19(y, _positive("R", opts.get("R")), p, tol))
    if theorem == "leibniz":
        x0 = opts.get("x0", _midpoint(y))
        delta = min(opts.get("delta"), b - x0)
        return _report(verify_leibniz_tangency(y, _positive("a", opts.get("a")), x0, delta, tol=tol))
    if theorem == "subnormal":
        return _report(verify_subnormal_area(y, Partition.uniform(a, b, opts.get("cells")), tol))
    n = opts.get("probes")
    grid = [a + (b - a) * (k + 1) / (n + 1) for k in range(n)]
    return _report(ftc_check(y, _positive("R", opts.get("R")), grid, tol, opts.given("step")))


def _run_riemann(opts: Options) -> tuple[str, int]:
    y = _curve(opts)
    a, b = y.domain
    p = Partition.uniform(a, b, opts.get("cells"), opts.get("tag"))
    table = darboux_table(y, p)
    out = {
        "cells": p.n,
        "lower": table.lower,
        "upper": table.upper,
        "oscillation": table.oscillation,
        "tagged_sum": tagged_sum(y, p),
    }
    return json.dumps(out, indent=2) + "\n", 0


def _feasible_U(f, a_const: float, lo: float, hi: float) -> float:
    n = 201
    need = max(
        x * math.sqrt(1 + (f.value(x) / a_const) ** 2) for x in (lo + (hi - lo) * k / (n - 1) for k in range(n))
    )
    return 2.0 * need


def _run_device(opts: Options, mode: str) -> tuple[str, int]:
    if mode == "tractrix":
        a_len = _positive("a", opts.get("a"))
        x0 = opts.require("x_from", "from")
        x1 = opts.require("x_to", "to")
        trace = simulate_tractrix(a_len, _positive("step", opts.get("step")), x0, x1, opts.get("U"))
        return trace.to_csv(), 0
    w = _curve(opts)
    lo, hi = w.domain
    if mode == "roundtrip":
        a_const = _positive("a", opts.get("a"))
        U = opts.get("U") or _feasible_U(w, a_const, lo, hi)
        step = opts.get("step") or DEFAULTS["roundtrip_step"]
        tol = opts.get("tol") or 1e-5
        return _report(verify_device_quadrature(w, a_const, U, (lo, hi), tol, _positive("step", step)))
    U = opts.require("U")
    cam = cam_from_slope_law(w, U, (lo, hi), a_const=opts.get("a") if mode == "cam" else None)
    if mode == "cam":
        return json.dumps(cam.to_dict(), indent=2) + "\n", 0
    x0 = opts.get("x_from", lo)
    x1 = opts.get("x_to", hi)
    cfg = DeviceConfig(U=U, h=_positive("step", opts.get("step")), sigma=opts.get("sigma"),
                       x0=x0, z0=opts.get("z0"), x1=x1)
    return simulate_device(cam, cfg).to_csv(), 0


def _run_render(opts: Options, figure: str) -> tuple[bytes, int]:
    y = _curve(opts)
    x0 = opts.get("x0", _midpoint(y))
    delta = opts.get("delta")
    if figure == "barrow":
        scene = barrow_figure(y, _positive("R", opts.get("R")), x0, delta)
    else:
        scene = leibniz_figure(y, _positive("a", opts.get("a")), x0, delta, opts.get("orientation"))
    return render_svg(scene, opts.get("width")), 0


def _output_path(opts: Options, command: str) -> Path | None:
    out = opts.get("out")
    env = os.environ.get("TANGENTA_OUT")
    if env:
        return Path(env) / (Path(out).name if out else DEFAULT_NAMES[command])
    return Path(out) if out else None


def _emit(payload, path: Path | None) -> None:
    data = payload.encode("utf-8") if isinstance(payload, str) else payload
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _fail(code: int, payload: dict) -> int:
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        opts = Options(ns, _load_config(ns.config))
        cmd = ns.command
        if cmd == "quadratrix":
            y = _curve(opts)
            q = quadratrix(y, _positive("R", opts.get("R")), opts.get("nodes"), _positive("tol", opts.get("tol")))
            payload, code = q.to_csv(), 0
        elif cmd == "verify":
            payload, code = _run_verify(opts, ns.theorem)
        elif cmd == "riemann":
            payload, code = _run_riemann(opts)
        elif cmd == "device":
            payload, code = _run_device(opts, ns.mode)
        else:
            payload, code = _run_render(opts, ns.figure)
        _emit(payload, _output_path(opts, cmd))
        return code
    except UsageError as err:
        return _fail(2, {"error": "usage", "message": str(err)})
    except TangentaError as err:
        return _fail(3, err.to_dict())
    except OSError as err:
        return _fail(2, {"error": "io", "message": str(err)})


if __name__ == "__main__":
    sys.exit(main())
