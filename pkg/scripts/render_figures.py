"""Render the two area-curve figures for a few curves into a directory.

    python scripts/render_figures.py OUTDIR [--width 480]
"""

import argparse
from pathlib import Path

from tangenta.curve import AnalyticCurve
from tangenta.diagram import barrow_figure, leibniz_figure, render_svg

CURVES = {
    "line": ("x", (0.0, 2.0)),
    "parabola": ("x^2 + 0.5", (0.0, 2.0)),
    "exp": ("exp(x)", (0.0, 1.5)),
    "root": ("sqrt(x + 1)", (0.0, 3.0)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--width", type=int, default=480)
    ap.add_argument("--R", type=float, default=1.0)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, (text, domain) in CURVES.items():
        y = AnalyticCurve.from_text(text, domain)
        a, b = domain
        x0 = a + 0.6 * (b - a)
        delta = 0.2 * (b - a)
        scenes = {
            "barrow": barrow_figure(y, args.R, x0, delta),
            "leibniz": leibniz_figure(y, args.R, x0, delta),
            "leibniz-mirrored": leibniz_figure(y, args.R, x0, delta, orientation="leibniz"),
        }
        for kind, scene in scenes.items():
            path = args.outdir / f"{name}-{kind}.svg"
            path.write_bytes(render_svg(scene, args.width))
            print(path)


if __name__ == "__main__":
    main()
