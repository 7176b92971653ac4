from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from artifact.parsing import ParseError
from artifact.series import (EPS, UNDETERMINED, EpsScalar, LaurentSeries, RationalFunction,
                             TruncationError, detect_rational, expand, fmt_series, format_rational,
                             p_to_z, parse_eps, parse_rational, parse_series, read_series_file,
                             write_series_file)

z = sympy.Symbol("z")


def sympy_z_series(expr, order):
    """Oracle: coefficients of expr(z) up to z^order as a LaurentSeries."""
    ser = sympy.series(expr, z, 0, order + 1).removeO()
    d = {}
    for term in sympy.Add.make_args(sympy.expand(ser)):
        c, e = term.as_coeff_exponent(z)
        d[int(e)] = Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1]))
    return LaurentSeries.make("z", d, order)


def test_eps_arithmetic():
    a, b, c, d = (Fraction(x) for x in (2, 3, 5, 7))
    x, y = EpsScalar(a, b), EpsScalar(c, d)
    assert x * y == EpsScalar(a * c, a * d + b * c)
    assert EPS * EPS == 0
    assert (x / y) * y == x
    assert parse_eps("(1/2+3e)") == EpsScalar(Fraction(1, 2), 3)
    assert str(parse_eps("-2e")) == "-2e"


def test_series_arithmetic_and_truncation():
    s = parse_series("z^2 + z^4 + O(z^6)") * parse_series("1+z")
    assert fmt_series(s) == "z^2 + z^3 + z^4 + z^5 + O(z^6)"
    assert parse_series("1 - p").inverse(5) == expand(parse_rational("1/(1-p)"), 0, 5)


def test_kz_substitution():
    assert parse_series("z^2 + z^4").scale_variable(2) == parse_series("4*z^2 + 16*z^4")
    assert parse_series("p + p^3").substitute_power(2) == parse_series("p^2 + p^6")


def test_expand_examples():
    assert expand(parse_rational("1/(1-p)"), 0, 3) == parse_series("1 + p + p^2 + p^3 + O(p^4)")
    got = expand(RationalFunction.make([1], [1, -1], -1), -1, 1)
    assert fmt_series(got) == "p^-1 + 1 + p + O(p^2)"
    exact = expand(parse_rational("p - 2 + p^-1"), -1, 1)
    assert exact.exact and fmt_series(exact) == "p^-1 - 2 + p"


def test_detect_rational_examples():
    rf = parse_rational("p/(1-p)^2")
    assert format_rational(detect_rational(expand(rf, 0, 20), 6)) == "p/(1-p)^2"
    i = sympy.Symbol("i", integer=True)
    p = sympy.Symbol("p")
    coeffs = {k: Fraction(int(sympy.summation(i ** 2 * p ** i, (i, 0, 20)).coeff(p, k)))
              for k in range(0, 21)}
    got = detect_rational(LaurentSeries.make("p", coeffs, 20), 6)
    closed = sympy.simplify(sympy.summation(i ** 2 * p ** i, (i, 0, sympy.oo)).args[0][0])
    assert got == RationalFunction.from_sympy(closed, p)
    assert format_rational(got) == "p*(1+p)/(1-p)^3"
    squares = LaurentSeries.make("p", {k * k: 1 for k in range(5)}, 20, low=0)
    assert detect_rational(squares, 5) == UNDETERMINED


def test_detect_rational_needs_enough_terms():
    with pytest.raises(TruncationError):
        detect_rational(expand(parse_rational("1/(1-p)"), 0, 1), 3)


def test_p_to_z_examples():
    got = p_to_z(parse_series("p^-1 - 2 + p"), 8)
    assert got == sympy_z_series(sympy.exp(z) - 2 + sympy.exp(-z), 8)
    assert fmt_series(got) == "z^2 + 1/12*z^4 + 1/360*z^6 + 1/20160*z^8 + O(z^9)"
    assert p_to_z(LaurentSeries.monomial("p", 0, 5), 4) == LaurentSeries.make("z", {0: 5}, 4)
    got = p_to_z(parse_rational("p/(1-p)^2"), 4)
    assert got == sympy_z_series(1 / (2 * sympy.sinh(z / 2)) ** 2, 4)
    assert fmt_series(got).startswith("z^-2 - 1/12 + 1/240*z^2")


def test_p_to_z_rejects_truncated_input():
    with pytest.raises(TruncationError):
        p_to_z(expand(parse_rational("1/(1-p)"), 0, 10), 3)


def test_commuting_square():
    rf = parse_rational("p/(1-p)^2")
    for k in (1, 2, 3):
        assert p_to_z(rf.substitute_power(k), 6) == p_to_z(rf, 6).scale_variable(k)


def test_series_file_round_trip():
    s = expand(parse_rational("p/(1-p)^2"), 0, 20)
    assert read_series_file(write_series_file(s)) == s


def test_series_parse_errors():
    with pytest.raises(ParseError) as exc:
        parse_series("z^2 + + z")
    assert "^" in exc.value.caret()


def test_t_dependent_coefficients():
    s = parse_series("(1+2e)*z^-1 + {1/(1-t)}*z")
    assert parse_series(fmt_series(s)) == s


small = st.integers(-4, 4)


@st.composite
def rationals(draw, deg=6):
    num = [Fraction(draw(small)) for _ in range(draw(st.integers(0, deg)) + 1)]
    den = [Fraction(1)] + [Fraction(draw(st.integers(-3, 3))) for _ in range(draw(st.integers(0, deg)))]
    rf = RationalFunction.make(num, den, draw(st.integers(-2, 2)))
    return rf


@settings(max_examples=60, deadline=None)
@given(rationals())
def test_detect_inverts_expand(rf):
    if rf.is_zero():
        return
    s = expand(rf, rf.shift, rf.shift + 40)
    assert detect_rational(s, 6) == rf


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.integers(-3, 3), st.integers(-5, 5), max_size=4))
def test_p_to_z_matches_exponential_oracle(coeffs):
    s = LaurentSeries.make("p", {e: Fraction(c) for e, c in coeffs.items()})
    oracle = sum((c * sympy.exp(e * z) for e, c in coeffs.items()), sympy.Integer(0))
    assert p_to_z(s, 6) == sympy_z_series(oracle, 6)


@settings(max_examples=40, deadline=None)
@given(rationals(3))
def test_format_rational_round_trip(rf):
    assert parse_rational(format_rational(rf)) == rf
