"""Print convergence tables: Darboux gaps, central-difference residuals and
the tractrix step-halving ratios.

    python scripts/convergence_report.py [--json]
"""

import argparse
import json

from tangenta.curve import AnalyticCurve
from tangenta.quadrature import Partition, darboux_table
from tangenta.theorems import ftc_check
from tangenta.tractional import simulate_tractrix, tractrix_error


def darboux_rows(text="exp(x)", domain=(0.0, 1.0), cells=(4, 16, 64, 256, 1024)):
    y = AnalyticCurve.from_text(text, domain)
    rows = []
    for n in cells:
        t = darboux_table(y, Partition.uniform(*domain, n))
        rows.append({"cells": n, "lower": t.lower, "upper": t.upper, "gap": t.oscillation})
    return rows


def ftc_rows(text="exp(x)*sin(x) + 2", domain=(0.0, 2.0), steps=(0.04, 0.02, 0.01, 0.005)):
    y = AnalyticCurve.from_text(text, domain)
    rows = []
    for h in steps:
        # tight tol keeps the node brackets far below the truncation error
        rep = ftc_check(y, 1.0, [1.0], tol=1e-7, step=h)
        rows.append({"step": h, "residual": rep.max_violation})
    return rows


def tractrix_rows(a=1.0, x0=0.1, x1=0.9, steps=(1e-2, 5e-3, 2.5e-3, 1.25e-3)):
    rows = []
    for h in steps:
        rows.append({"step": h, "error": tractrix_error(simulate_tractrix(a, h, x0, x1), a)})
    return rows


def _with_ratios(rows, key):
    prev = None
    for r in rows:
        r["ratio"] = (prev / r[key]) if prev and r[key] else None
        prev = r[key]
    return rows


def _print(title, rows):
    print(title)
    cols = list(rows[0])
    print("  " + "  ".join(f"{c:>12}" for c in cols))
    for r in rows:
        cells = [f"{r[c]:12.5g}" if isinstance(r[c], float) else f"{str(r[c]):>12}" for c in cols]
        print("  " + "  ".join(cells))
    print()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="emit one JSON object instead of tables")
    args = ap.parse_args()
    report = {
        "darboux": _with_ratios(darboux_rows(), "gap"),
        "ftc": _with_ratios(ftc_rows(), "residual"),
        "tractrix": _with_ratios(tractrix_rows(), "error"),
    }
    if args.json:
        print(json.dumps(report, indent=2))
        return
    _print("Darboux gap U - L for exp on [0, 1] (first order: ratio 4 per 4x cells)", report["darboux"])
    _print("Central-difference residual |R z' - y| at x = 1 (second order: ratio 4)", report["ftc"])
    _print("Tractrix sup error of the device trace (fourth order: ratio 16)", report["tractrix"])


if __name__ == "__main__":
    main()
