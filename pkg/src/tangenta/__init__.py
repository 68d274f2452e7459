"""Certified area curves, tangency theorems and a kinematic integrator."""

from .curve import AnalyticCurve, SampledCurve, tangent_data_at
from .diagram import Scene, barrow_figure, leibniz_figure, render_svg
from .errors import TangentaError
from .expr import ImplicitRelation, barrow_linearize, differentiate, evaluate, implicit_slope, parse, to_text
from .quadrature import (
    CertifiedArea,
    Partition,
    QuadratrixCurve,
    barrow_subtangent,
    certify_area,
    darboux_sums,
    oscillation_sum,
    quadratrix,
    tagged_sum,
)
from .theorems import (
    LeibnizFrame,
    TheoremReport,
    ftc_check,
    to_leibniz_frame,
    verify_leibniz_tangency,
    verify_prop11,
    verify_prop19,
    verify_subnormal_area,
)
from .tractional import (
    CamCurve,
    DeviceConfig,
    DeviceTrace,
    cam_from_slope_law,
    simulate_device,
    simulate_tractrix,
    tractrix_closed_form,
    verify_device_quadrature,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticCurve",
    "CamCurve",
    "CertifiedArea",
    "DeviceConfig",
    "DeviceTrace",
    "ImplicitRelation",
    "LeibnizFrame",
    "Partition",
    "QuadratrixCurve",
    "SampledCurve",
    "Scene",
    "TangentaError",
    "TheoremReport",
    "barrow_figure",
    "barrow_linearize",
    "barrow_subtangent",
    "cam_from_slope_law",
    "certify_area",
    "darboux_sums",
    "differentiate",
    "evaluate",
    "ftc_check",
    "implicit_slope",
    "leibniz_figure",
    "oscillation_sum",
    "parse",
    "quadratrix",
    "render_svg",
    "simulate_device",
    "simulate_tractrix",
    "tagged_sum",
    "tangent_data_at",
    "to_leibniz_frame",
    "to_text",
    "tractrix_closed_form",
    "verify_device_quadrature",
    "verify_leibniz_tangency",
    "verify_prop11",
    "verify_prop19",
    "verify_subnormal_area",
]
