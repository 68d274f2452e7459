import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangenta.curve import AnalyticCurve, SampledCurve
from tangenta.errors import GridEdgeError, MonotonicityError, PreconditionError
from tangenta.quadrature import Partition, quadratrix
from tangenta.theorems import (
    FramedValues,
    LeibnizFrame,
    TheoremReport,
    ftc_check,
    leibniz_subtangent,
    subnormal_curve,
    subnormal_sums,
    tangency_values,
    to_leibniz_frame,
    verify_leibniz_tangency,
    verify_prop11,
    verify_prop19,
    verify_subnormal_area,
)


def curve(text, domain=(0.0, 1.0)):
    return AnalyticCurve.from_text(text, domain)


def uniform_probes(a, b, n=49):
    return [a + (b - a) * k / (n + 1) for k in range(1, n + 1)]


# -- report ---------------------------------------------------------------------


def test_report_verdict_and_json():
    r = TheoremReport("ftc", {"R": 1.0}, 3, 0.5, 1.0, [{"x": 0.1}])
    assert r.holds and r.verdict == "holds"
    d = json.loads(r.to_json())
    assert d["verdict"] == "holds" and d["probes"] == 3
    bad = TheoremReport("ftc", {}, 1, 2.0, 1.0, [])
    assert not bad.holds and bad.verdict == "fails"


# -- tangency ---------------------------------------------------------------------


def test_prop11_increasing_line_is_below():
    rep = verify_prop11(curve("x", (0, 2)), 1.0, 1.0, uniform_probes(0, 2))
    assert rep.holds and rep.inputs["case"] == "convex"
    assert rep.inputs["subtangent"] == pytest.approx(0.5, abs=1e-6)
    assert all(d["strict"] for d in rep.details if not d["tangency"])


def test_prop11_decreasing_line_is_above():
    rep = verify_prop11(curve("exp(-x)", (0, 3)), 2.0, 1.3, uniform_probes(0, 3))
    assert rep.holds and rep.inputs["case"] == "concave"


def test_prop11_constant_is_flagged_degenerate():
    rep = verify_prop11(curve("2", (0, 2)), 1.0, 1.0, uniform_probes(0, 2))
    assert rep.holds
    assert any("degenerate" in n for n in rep.notes)


def test_prop11_rejects_non_monotone_and_boundary():
    with pytest.raises(MonotonicityError):
        verify_prop11(curve("sin(x)", (0, 6)), 1.0, 1.0, [0.5, 2.0])
    with pytest.raises(PreconditionError):
        verify_prop11(curve("x", (0, 2)), 1.0, 0.0, [0.5])


def test_prop11_detects_a_wrong_slope():
    # the same probe table with the tangent slope doubled must fail
    y = curve("x^2", (0, 2))
    rep = verify_prop11(y, 0.5, 1.0, uniform_probes(0, 2))
    assert rep.holds
    q = quadratrix(y, 1.0, nodes=[0.2, 1.0], tol=1e-9)
    line = q.z(1.0) + 2 * y.value(1.0) * (0.2 - 1.0)
    assert line < q.z(0.2) - 0.1


# -- rectangle sums -----------------------------------------------------------------


@pytest.mark.parametrize("n", [10, 100])
def test_prop19_gap_for_identity_curve(n):
    rep = verify_prop19(curve("x"), 1.0, Partition.uniform(0, 1, n))
    d = rep.details[0]
    assert rep.holds
    assert d["gap"] == pytest.approx(1 / (2 * n), rel=1e-9)
    assert d["oscillation"] == pytest.approx(1 / n, rel=1e-12)
    assert d["bound_to_gap"] == pytest.approx(2.0, rel=1e-8)


def test_prop19_scales_with_R():
    p = Partition.uniform(0, 1, 20)
    r1 = verify_prop19(curve("exp(x)"), 1.0, p)
    r3 = verify_prop19(curve("exp(x)"), 3.0, p)
    assert r1.details[0]["R_dz"] == pytest.approx(r3.details[0]["R_dz"], rel=1e-9)
    assert r1.holds and r3.holds


# -- Leibniz tangency law -----------------------------------------------------------


def test_leibniz_identity_curve():
    rep = verify_leibniz_tangency(curve("x", (0, 2)), 1.0, 1.0, 0.1)
    assert rep.holds and rep.inputs["strict"]
    first = rep.details[len([d for d in rep.details if "check" in d])]
    assert first["EC_bar"] == pytest.approx(0.1, rel=1e-12)
    assert first["E_C"] == pytest.approx(0.105, rel=1e-8)


def test_leibniz_constant_is_boundary_case():
    rep = verify_leibniz_tangency(curve("3", (0, 2)), 1.0, 0.5, 0.2)
    assert rep.holds and rep.inputs["boundary_case"]
    assert not rep.inputs["strict"]


def test_leibniz_preconditions():
    with pytest.raises(PreconditionError):
        verify_leibniz_tangency(curve("x", (0, 2)), 1.0, 1.0, 0.0)
    with pytest.raises(PreconditionError):
        verify_leibniz_tangency(curve("x", (0, 2)), 0.0, 1.0, 0.1)
    with pytest.raises(MonotonicityError):
        verify_leibniz_tangency(curve("2 - x", (0, 2)), 1.0, 1.0, 0.1)
    with pytest.raises(PreconditionError):
        verify_leibniz_tangency(curve("x", (0, 2)), 1.0, 0.0, 0.1)


# -- subnormals ---------------------------------------------------------------------


def test_subnormal_sums_identity_curve():
    s = subnormal_sums(curve("x"), Partition.uniform(0, 1, 4))
    assert s["ordinate_sum"] == pytest.approx(0.5 + 1 / 8, rel=1e-15)


def test_subnormal_curve_of_parabola_is_one():
    n = subnormal_curve(curve("sqrt(2*x)", (0.5, 4)))
    for x in (0.5, 1.7, 3.9):
        assert n.value(x) == pytest.approx(1.0, rel=1e-14)


def test_subnormal_area_analytic():
    rep = verify_subnormal_area(curve("x^2 + 1", (0, 2)), Partition.uniform(0, 2, 16))
    assert rep.holds
    assert rep.inputs["target"] == pytest.approx((25 - 1) / 2)


def test_subnormal_area_sampled_skips_analytic():
    ys = tuple(math.sin(0.1 * k) for k in range(11))
    rep = verify_subnormal_area(SampledCurve(tuple(0.1 * k for k in range(11)), ys), Partition.uniform(0, 1, 10))
    assert rep.holds
    assert not any(d.get("check") == "analytic" for d in rep.details)


def test_subnormal_needs_uniform_partition():
    with pytest.raises(PreconditionError):
        subnormal_sums(curve("x"), Partition.from_nodes([0, 0.3, 1]))


# -- fundamental theorem, slope form ----------------------------------------------


def test_ftc_examples():
    rep = ftc_check(curve("x^2", (0, 2)), 1.0, [0.5, 1.0, 1.5])
    assert rep.holds
    # central difference of x^3/3 is exact up to h^2/3
    h = rep.inputs["step"]
    for d in rep.details:
        assert d["residual"] == pytest.approx(h * h / 3, rel=1e-2)


def test_ftc_is_second_order():
    y = curve("exp(x)*sin(x) + 2", (0, 2))
    r1 = ftc_check(y, 1.0, [1.0], step=0.02)
    r2 = ftc_check(y, 1.0, [1.0], step=0.01)
    assert r1.max_violation / r2.max_violation == pytest.approx(4.0, rel=0.05)


def test_ftc_grid_edge():
    with pytest.raises(GridEdgeError):
        ftc_check(curve("x", (0, 1)), 1.0, [0.001])


# -- frames ---------------------------------------------------------------------------


def test_frame_renaming():
    assert LeibnizFrame.rename("x0", "leibniz") == "y0"
    assert LeibnizFrame.rename("z_hi", "leibniz") == "x_hi"
    assert LeibnizFrame.rename("R", "leibniz") == "a"
    assert LeibnizFrame.rename("delta", "leibniz") == "delta"
    assert LeibnizFrame.rename("a", "barrow") == "R"


@settings(max_examples=100)
@given(st.dictionaries(st.sampled_from(["x", "y", "z", "R", "x0", "z_lo", "y_hi", "delta", "cells", "DT"]), st.floats(-5, 5)))
def test_frame_toggle_twice_is_identity(values):
    v = FramedValues(values)
    once = to_leibniz_frame(v)
    assert once.frame == "leibniz"
    assert to_leibniz_frame(once) == v


def test_report_round_trips_through_frames():
    rep = verify_prop11(curve("x", (0, 2)), 1.0, 1.0, [0.5, 1.5])
    lz = to_leibniz_frame(rep)
    assert lz.frame == "leibniz" and "y0" in lz.inputs and "a" in lz.inputs
    assert to_leibniz_frame(lz) == rep


def test_leibniz_subtangent_two_ways():
    q = quadratrix(curve("x", (0, 2)), 1.0, nodes=[1.0], tol=1e-10)
    t = leibniz_subtangent(tangency_values(q, 1.0))
    assert t["t_law"] == pytest.approx(1.0, rel=1e-8)
    assert t["t_similar"] == pytest.approx(1.0, rel=1e-8)
    q = quadratrix(curve("x^2 + 1", (0, 2)), 2.0, nodes=[1.5], tol=1e-10)
    t = leibniz_subtangent(tangency_values(q, 1.5))
    assert t["t_law"] == pytest.approx(t["t_similar"], rel=1e-8)
