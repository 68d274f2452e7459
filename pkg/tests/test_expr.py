import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tangenta import expr as ex
from tangenta.errors import (
    DomainError,
    NotOnCurveError,
    NotPolynomialError,
    ParseError,
    UnboundVariableError,
    UnknownIdentifierError,
    VerticalTangentError,
)
from tangenta.expr import (
    Add,
    Call,
    Const,
    Div,
    ImplicitRelation,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    barrow_expansion,
    barrow_linearize,
    differentiate,
    evaluate,
    implicit_slope,
    parse,
    to_text,
)

X = Var("x")


# -- parsing ------------------------------------------------------------------


def test_parse_precedence():
    assert parse("x^2 + 3*x") == Add(Pow(X, Fraction(2)), Mul(Const(Fraction(3)), X))
    assert parse("sqrt(2*x)") == Call("sqrt", Mul(Const(Fraction(2)), X))
    # unary minus binds looser than power
    assert parse("-x^2") == Neg(Pow(X, Fraction(2)))
    assert parse("1 - 2 - 3") == Sub(Sub(Const(Fraction(1)), Const(Fraction(2))), Const(Fraction(3)))
    assert parse("8 / 4 / 2") == Div(Div(Const(Fraction(8)), Const(Fraction(4))), Const(Fraction(2)))


def test_parse_whitespace_insensitive():
    assert parse("  x ^ 2+3 *x ") == parse("x^2+3*x")


def test_parse_rational_exponents():
    assert parse("x^(1/3)") == Pow(X, Fraction(1, 3))
    assert parse("x^-2") == Pow(X, Fraction(-2))
    assert parse("x^(-3/2)") == Pow(X, Fraction(-3, 2))
    assert parse("x^0.5") == Pow(X, Fraction(1, 2))


def test_decimal_constants_are_exact():
    assert parse("0.1") == Const(Fraction(1, 10))


@pytest.mark.parametrize(
    "text,offset",
    [("x +", 3), ("", 0), ("(x", 2), ("x ** 2", 3), ("2x", 1), ("x^y", 2), ("sin x", 4)],
)
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as err:
        parse("x + tan(x)")
    assert err.value.offset == 4
    with pytest.raises(UnknownIdentifierError):
        parse("x + y", variables=("x",))


# -- evaluation -----------------------------------------------------------------


def test_evaluate_examples():
    assert evaluate(parse("x^2+3*x"), {"x": 2}) == 10
    assert evaluate(parse("sqrt(2*x)"), {"x": 8}) == 4
    assert evaluate(parse("x^(1/3)"), {"x": -8}) == pytest.approx(-2)


def test_exact_evaluation_on_rationals():
    assert evaluate(parse("x^2/3 + 1/7"), {"x": Fraction(1, 2)}, exact=True) == Fraction(1, 12) + Fraction(1, 7)


@pytest.mark.parametrize(
    "text,x,node",
    [("ln(x)", 0.0, "ln(x)"), ("1/(x - 1)", 1.0, "1/(x - 1)"), ("sqrt(x - 2)", 1.0, "sqrt(x - 2)"), ("x^(1/2)", -1.0, "x^(1/2)")],
)
def test_domain_errors_name_the_node(text, x, node):
    with pytest.raises(DomainError) as err:
        evaluate(parse(text), {"x": x})
    assert str(err.value.node) == node
    with pytest.raises(DomainError):
        ex.compile_expr(parse(text))(x)


def test_unbound_variable():
    with pytest.raises(UnboundVariableError):
        evaluate(parse("x + 1"), {})


# -- printing -----------------------------------------------------------------

_exponents = st.sampled_from([Fraction(2), Fraction(3), Fraction(-1), Fraction(1, 2), Fraction(-3, 2), Fraction(1, 3)])
_consts = st.one_of(
    st.integers(0, 50).map(lambda k: Const(Fraction(k))),
    st.integers(0, 999).map(lambda k: Const(Fraction(k, 100))),
)


def _extend(children):
    pair = st.tuples(children, children)
    return st.one_of(
        children.map(Neg),
        pair.map(lambda t: Add(*t)),
        pair.map(lambda t: Sub(*t)),
        pair.map(lambda t: Mul(*t)),
        pair.map(lambda t: Div(*t)),
        st.tuples(children, _exponents).map(lambda t: Pow(*t)),
        st.tuples(st.sampled_from(sorted(ex.FUNCTIONS)), children).map(lambda t: Call(*t)),
    )


trees = st.recursive(st.one_of(st.just(X), _consts), _extend, max_leaves=24).filter(lambda e: ex.depth(e) <= 6)


@settings(max_examples=400)
@given(trees)
def test_print_parse_round_trip(e):
    assert parse(to_text(e)) == e


@given(st.fractions(min_value=-1000, max_value=1000, max_denominator=50))
def test_negative_and_repeating_constants_round_trip_in_value(q):
    back = parse(to_text(ex.const(q)))
    assert evaluate(back, {}, exact=True) == q


# -- differentiation ----------------------------------------------------------


def test_derivative_examples():
    assert to_text(differentiate(parse("x^2 + 3*x"), "x")) == "2*x + 3"
    assert differentiate(parse("7"), "x") == Const(Fraction(0))
    d = differentiate(parse("sqrt(2*x)"), "x")
    assert evaluate(d, {"x": 8}) == pytest.approx(0.25, rel=1e-15)
    h = 1e-6
    fd = (math.sqrt(2 * (8 + h)) - math.sqrt(2 * (8 - h))) / (2 * h)
    assert evaluate(d, {"x": 8}) == pytest.approx(fd, rel=1e-8)


SMOOTH = ["x^3 - 2*x", "sin(x)*exp(-x)", "ln(x^2 + 1)", "sqrt(x + 4)/(x^2 + 1)", "cos(x)^3", "x^(5/2) + x^(-1)",
          "exp(sin(x))", "(x + 1)^(1/3)", "1/(2 + cos(x))"]


@pytest.mark.parametrize("text", SMOOTH)
@given(x=st.floats(0.1, 5.0))
def test_derivative_matches_central_difference(text, x):
    e = parse(text)
    f = ex.compile_expr(e)
    d = evaluate(differentiate(e, "x"), {"x": x})
    h = 1e-6
    fd = (f(x + h) - f(x - h)) / (2 * h)
    assert d == pytest.approx(fd, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("text", SMOOTH)
def test_derivative_matches_sympy(text):
    s = sympy.Symbol("x")
    oracle = sympy.diff(sympy.sympify(text.replace("^", "**").replace("ln", "log"), locals={"x": s}), s)
    d = differentiate(parse(text), "x")
    for x in (0.3, 1.1, 2.7):
        assert evaluate(d, {"x": x}) == pytest.approx(float(oracle.subs(s, x)), rel=1e-12, abs=1e-12)


# -- implicit relations and the a-e rules ---------------------------------------


@pytest.mark.parametrize(
    "text,point,slope",
    [("z - x^2", (1, 1), 2), ("z^2 - x^3", (4, 8), 3), ("x^2 + z^2 - 25", (3, 4), Fraction(-3, 4))],
)
def test_barrow_linearize_examples(text, point, slope):
    rel = ImplicitRelation.from_text(text)
    got = barrow_linearize(rel, *point)
    assert got == slope
    assert isinstance(got, Fraction)


def test_barrow_linearize_float_inputs():
    rel = ImplicitRelation.from_text("x^2 + z^2 - 25")
    assert barrow_linearize(rel, 3.0, 4.0) == pytest.approx(-0.75, rel=1e-12)


def test_expansion_has_the_substituted_form():
    # f(x0 - a, z0 - e) for f = z - x^2 at (1, 1): -e + 2a - a^2
    terms = barrow_expansion(ImplicitRelation.from_text("z - x^2"), 1, 1)
    assert terms == {(0, 1): -1, (1, 0): 2, (2, 0): -1}


def test_relation_errors():
    with pytest.raises(NotPolynomialError):
        ImplicitRelation.from_text("sin(x) - z")
    with pytest.raises(NotPolynomialError):
        ImplicitRelation.from_text("x^(1/2) - z")
    rel = ImplicitRelation.from_text("x^2 + z^2 - 25")
    with pytest.raises(NotOnCurveError):
        barrow_linearize(rel, 3, 5)
    with pytest.raises(VerticalTangentError):
        barrow_linearize(rel, 5, 0)
    with pytest.raises(VerticalTangentError):
        implicit_slope(rel, 5, 0)


_coef = st.fractions(min_value=-9, max_value=9, max_denominator=6)


@settings(max_examples=150)
@given(
    coeffs=st.dictionaries(
        st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda t: sum(t) <= 4), _coef, min_size=1, max_size=8
    ),
    x0=st.fractions(min_value=-5, max_value=5, max_denominator=4),
    z0=st.fractions(min_value=-5, max_value=5, max_denominator=4),
)
def test_linearization_equals_implicit_derivative(coeffs, x0, z0):
    value = sum(c * x0**i * z0**j for (i, j), c in coeffs.items())
    coeffs = dict(coeffs)
    coeffs[(0, 0)] = coeffs.get((0, 0), Fraction(0)) - value
    terms = [f"({c.numerator}/{c.denominator})*x^{i}*z^{j}" for (i, j), c in coeffs.items() if c]
    assume(terms)
    rel = ImplicitRelation.from_text(" + ".join(terms))
    fz = sum(c * j * x0**i * z0 ** (j - 1) for (i, j), c in coeffs.items() if j)
    assume(fz != 0)
    assert barrow_linearize(rel, x0, z0) == implicit_slope(rel, x0, z0)
