import random

import pytest
from hypothesis import given, settings, strategies as st

from artifact.parsing import ParseError
from artifact.rewrite.generate import random_bracket, random_expression
from artifact.rewrite.geometry import Geometry, GeometryError, effective_splits, parse_geometry
from artifact.rewrite.terms import Atom, BracketError, Expression, parse_bracket, parse_expr

EXAMPLE = "Z[PT,red]{K3xC}_(B+F,1)(q1(p)|0> || tau0(p.w))"


def test_example_bracket():
    t = parse_bracket(EXAMPLE)
    assert (t.theory, t.mode) == ("PT", "red")
    assert t.cls == (1, 1, 1)
    assert t.r == 1
    assert str(t) == EXAMPLE


@pytest.mark.parametrize("text", [
    "Z[XX,red]{K3xC}_(B+F,1)(q1(p)|0> || 1)",
    "Z[PT,bad]{K3xC}_(B+F,1)(q1(p)|0> || 1)",
    "Z[PT,red]{K3xC}_(B+F,1)(q1(p)|0> | 1)",
    "Z[PT,red]{Nowhere}_(1)(|| 1)",
    "Z[PT,red]{K3xC}_(B+F,1)(q1(p)|0> || tau0(p)",
])
def test_malformed_brackets_report_position(text):
    with pytest.raises(ParseError) as exc:
        parse_bracket(text)
    caret = exc.value.caret()
    assert "^" in caret and "column" in caret


def test_relins_count_checked():
    with pytest.raises((ParseError, BracketError)):
        parse_bracket("Z[PT,red]{K3xC[N=2]}_(B+F,1)(q1(p)|0> || 1)")


def test_geometry_presets():
    for text in ["P3", "P3/P2", "PN", "PN0", "PN~", "K3xC[g=1,N=2,alg=toy]"]:
        assert str(parse_geometry(text)) == text
    assert parse_geometry("PN~").rubber
    assert parse_geometry("P3").context == "absolute"
    assert parse_geometry("P3/P2").context == "log"
    with pytest.raises((ParseError, GeometryError)):
        parse_geometry("K3xC[q=1]")


@given(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 4))
def test_k3xc_degree_formula(g, N, b, f, d):
    geom = Geometry.of("K3xC", g=g, N=N)
    assert geom.d_beta((b, f, d)) == d * (2 - 2 * g)
    assert geom.div_sizes((b, f, d)) == [d] * N


def test_effective_splits():
    splits = effective_splits((1, 2))
    assert len(splits) == 6
    assert all(tuple(a + b for a, b in zip(x, y)) == (1, 2) for x, y in splits)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_bracket_round_trip(seed):
    b = random_bracket(random.Random(seed))
    assert parse_bracket(str(b)) == b
    assert str(parse_bracket(str(b))) == str(b)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_expression_round_trip(seed):
    e = random_expression(random.Random(seed))
    assert parse_expr(str(e)) == e


def test_expression_algebra():
    x = parse_bracket(EXAMPLE)
    e = Expression.of(x) + Expression.of(x)
    assert str(e) == f"[2] {EXAMPLE}"
    assert (e - e).is_zero()
    prod = Expression.of(Atom("V[lam]")) * Expression.of(x)
    assert parse_expr(str(prod)) == prod
