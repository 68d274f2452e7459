import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tangenta.curve import (
    AnalyticCurve,
    SampledCurve,
    characteristic_triangle,
    check_annotations,
    convexity_probe,
    curve_from_json,
    curve_to_json,
    eval_curve,
    monotonicity_probe,
    slope_at,
    tangent_data_at,
)
from tangenta.errors import (
    DerivativeUndefinedError,
    OutOfDomainError,
    PreconditionError,
    UnknownIdentifierError,
    ZeroSlopeError,
)
from tangenta.expr import parse


def curve(text, domain=(0.0, 4.0)):
    return AnalyticCurve.from_text(text, domain)


def test_eval_curve_examples():
    assert eval_curve(curve("x^2"), 3) == 9
    assert eval_curve(SampledCurve((0, 1), (0, 2)), 0.5) == 1
    with pytest.raises(OutOfDomainError):
        eval_curve(curve("x", (0, 2)), 5)


def test_slope_examples():
    assert slope_at(curve("x^2"), 2) == 4
    assert slope_at(SampledCurve((0, 1, 2), (0, 1, 4)), 1) == 2
    # one-sided at the ends
    assert slope_at(SampledCurve((0, 1, 2), (0, 1, 4)), 0) == 1
    assert slope_at(SampledCurve((0, 1, 2), (0, 1, 4)), 2) == 3
    with pytest.raises(DerivativeUndefinedError):
        slope_at(curve("sqrt(x)"), 0)


def test_tangent_data_examples():
    td = tangent_data_at(curve("x"), 3)
    assert (td.subtangent, td.subnormal, td.foot) == (3, 3, 0)
    td = tangent_data_at(curve("x^2"), 2)
    assert (td.c, td.slope, td.subtangent, td.subnormal, td.foot) == (4, 4, 1, 16, 1)
    parabola = curve("sqrt(2*x)", (0, 10))
    for x in (0.5, 1, 2, 7.5):
        assert tangent_data_at(parabola, x).subnormal == pytest.approx(1, rel=1e-15)


def test_zero_slope_is_distinct_from_undefined():
    with pytest.raises(ZeroSlopeError):
        tangent_data_at(curve("(x - 1)^2"), 1)
    with pytest.raises(DerivativeUndefinedError):
        tangent_data_at(curve("sqrt(x)"), 0)


def test_zero_ordinate_is_flagged():
    td = tangent_data_at(curve("x"), 0)
    assert td.subtangent == 0 and td.zero_ordinate


def test_subtangent_sign_convention():
    up = tangent_data_at(curve("x", (0.5, 3)), 2)
    assert up.subtangent > 0 and up.foot < up.x
    down = tangent_data_at(curve("1/x", (0.5, 3)), 2)
    assert down.subtangent < 0 and down.foot > down.x


@given(x=st.floats(0.2, 3.5), text=st.sampled_from(["x^3 + 1", "exp(x)", "sqrt(x + 1)", "1/x", "sin(x) + 2", "ln(x + 1)"]))
def test_subtangent_times_subnormal_is_square(x, text):
    try:
        td = tangent_data_at(curve(text), x)
    except ZeroSlopeError:
        return
    assert td.subtangent * td.subnormal == pytest.approx(td.c**2, rel=1e-12)
    assert td.subtangent * td.slope == pytest.approx(td.c, rel=1e-15)


def test_characteristic_triangle_examples():
    t = characteristic_triangle(curve("x"), 1, 0.5)
    assert (t.dx, t.dc) == (0.5, 0.5) and t.chord == pytest.approx(math.sqrt(0.5))
    assert characteristic_triangle(curve("x^2"), 1, 0.1).dc == pytest.approx(0.21, rel=1e-14)
    with pytest.raises(PreconditionError):
        characteristic_triangle(curve("x"), 1, 0)
    with pytest.raises(OutOfDomainError):
        characteristic_triangle(curve("x", (0, 2)), 1.5, 1)


@given(dx=st.floats(-1, 1).filter(lambda v: abs(v) > 1e-6), dc=st.floats(-1e3, 1e3))
def test_chord_is_hypotenuse(dx, dc):
    t = characteristic_triangle(SampledCurve((0, 2), (0, 2 * dc)), 0.5 if dx > 0 else 1.5, dx)
    assert t.chord**2 == pytest.approx(t.dx**2 + t.dc**2, rel=4e-16)


@pytest.mark.parametrize("text,x", [("x^3", 1.0), ("sin(x)", 0.7), ("exp(x)", 1.3)])
def test_difference_quotient_converges_at_first_order(text, x):
    c = curve(text)
    s = slope_at(c, x)
    errs = []
    for k in range(4, 9):
        dx = 2.0**-k
        t = characteristic_triangle(c, x, dx)
        errs.append(abs(t.dc / t.dx - s))
    for e0, e1 in zip(errs, errs[1:]):
        assert 1.7 <= e0 / e1 <= 2.3


def test_convexity_probe_examples():
    assert convexity_probe(curve("x^2", (0, 2)), n_probes=101) == "convex"
    assert convexity_probe(curve("sqrt(x)", (0.1, 2))) == "concave"
    assert convexity_probe(curve("sin(x)", (0, 6))) == "neither"
    with pytest.raises(PreconditionError):
        convexity_probe(curve("x"), n_probes=2)


def test_monotonicity_probe():
    assert monotonicity_probe(curve("x^3")) == "increasing"
    assert monotonicity_probe(curve("1/(x + 1)")) == "decreasing"
    assert monotonicity_probe(curve("3")) == "constant"
    assert monotonicity_probe(curve("sin(x)")) == "neither"


def test_annotations_are_checked():
    check_annotations(AnalyticCurve.from_text("x^2", (0, 2), monotone="increasing", convexity="convex"))
    with pytest.raises(PreconditionError):
        check_annotations(AnalyticCurve.from_text("x^2", (0, 2), monotone="decreasing"))
    with pytest.raises(PreconditionError):
        check_annotations(AnalyticCurve.from_text("x^2", (0, 2), convexity="concave"))


def test_construction_invariants():
    with pytest.raises(PreconditionError):
        curve("x", (1, 1))
    with pytest.raises(PreconditionError):
        SampledCurve((0, 0), (1, 2))
    with pytest.raises(PreconditionError):
        SampledCurve((0,), (1,))
    with pytest.raises(UnknownIdentifierError):
        curve("x + z")
    with pytest.raises(PreconditionError):
        AnalyticCurve(parse("x + z", ("x", "z")), (0, 1))


def test_json_round_trip():
    for c in (curve("sqrt(2*x) + 1", (0, 3)), SampledCurve((0, 0.5, 2), (1, -1, 4))):
        text = curve_to_json(c)
        assert json.loads(text)["kind"] in ("analytic", "sampled")
        back = curve_from_json(text)
        assert back.to_dict() == c.to_dict()
