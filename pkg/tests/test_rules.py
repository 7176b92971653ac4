import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artifact.algebra import preset
from artifact.fock import hilb_diagonal, monomial, weighted_partitions
from artifact.rewrite import rules
from artifact.rewrite.compat import mcf_fixture, verify_correspondence_compat
from artifact.rewrite.generate import random_state
from artifact.rewrite.geometry import Geometry
from artifact.rewrite.rules import RuleError
from artifact.rewrite.terms import Atom, Bracket, Expression, const, parse_bracket
from artifact.descend import parse_monomial
from artifact.series import EpsScalar, LaurentSeries

P = parse_bracket


def brackets(e):
    return [f for factors, _ in e.terms for f in factors if isinstance(f, Bracket)]


# --- degeneration ---------------------------------------------------------------------

def test_trivial_split_is_identity():
    t = P("Z[PT,vir]{K3xC[N=1,alg=toy]}_(0,1)(q1(p)|0> || 1)")
    assert rules.degenerate(t, "trivial") == Expression.of(t)


def test_node_split_small():
    t = P("Z[GW,full]{K3xC[N=1,alg=toy]}_(0,1)(q1(p)|0> || 1)")
    e = rules.degenerate(t, "node[g1=0,A1=1]")
    # one class split times two diagonal terms
    assert len(e.terms) == 2
    assert all(len(factors) == 2 for factors, _ in e.terms)


def test_node_split_counts_class_splits():
    t = P("Z[GW,full]{K3xC[N=1,alg=toy]}_(B+F,1)(q1(p)|0> || 1)")
    e = rules.degenerate(t, "node[g1=0,A1=1]")
    assert len(e.terms) == 4 * len(hilb_diagonal(1, preset("toy")))


def test_node_split_degree_two_kunneth():
    alg = preset("toy")
    t = Bracket("PT", "vir", Geometry.of("K3xC", N=1, alg="toy"), (0, 0, 2),
                (monomial(weighted_partitions(2, alg)[0]),), parse_monomial("1"))
    e = rules.degenerate(t, "node[g1=0,A1=1]")
    assert len(e.terms) == len(hilb_diagonal(2, alg)) == 5


def test_symbolic_kunneth():
    t = P("Z[PT,vir]{K3xC[N=1,alg=toy]}_(0,1)(q1(p)|0> || 1)")
    e = rules.degenerate(t, "node[g1=0,A1=1]", kunneth_mode="symbolic")
    assert str(e) == ("[1] Z[PT,vir]{K3xC[N=2,alg=toy]}_(0,1)(q1(p)|0> | H[j] || 1) * "
                      "Z[PT,vir]{K3xC[alg=toy]}_(0,1)(Hv[j] || 1)")


def test_selfnode_and_normal_cone():
    t = P("Z[PT,vir]{K3xC[g=1,alg=toy]}_(0,1)(q1(p)|0> || 1)")
    e = rules.degenerate(t, "selfnode")
    assert {b.geom.get("g") for b in brackets(e)} == {0}
    assert {b.geom.get("N") for b in brackets(e)} == {3}
    p3 = P("Z[PT,vir]{P3}_(H)( || tau0(H))")
    e = rules.degenerate(p3, "normal-cone")
    # two class splits (h=0, 1): one and three diagonal terms, two marking splits each
    assert len(e.terms) == (1 + 3) * 2
    assert {b.geom.kind for b in brackets(e)} == {"P3/P2", "PN0"}


@pytest.mark.parametrize("text,split", [
    ("Z[PT,vir]{P3}_(H)( || 1)", "node"),
    ("Z[PT,vir]{K3xC}_(0,1)(q1(p)|0> || 1)", "selfnode"),
    ("Z[PT,vir]{K3xC}_(0,1)(q1(p)|0> || tau[mu1])", "node[g1=0,A1=1]"),
    ("Z[PT,vir]{K3xC}_(0,1)(q1(p)|0> || 1)", "node[g1=0,A1=2]"),
    ("Z[PT,vir]{K3xC}_(0,1)(q1(p)|0> || 1)", "normal-cone"),
])
def test_degeneration_errors(text, split):
    with pytest.raises(RuleError):
        rules.degenerate(P(text), split)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(0, 2), st.integers(1, 3), st.integers(1, 2))
def test_node_bookkeeping_balances(seed, g, N, d):
    rng = random.Random(seed)
    geom = Geometry.of("K3xC", g=g, N=N, alg="toy")
    alg = preset("toy")
    mono = parse_monomial(rng.choice(["1", "tau0(w)", "tau1(w) tau0(p.w)", "tau0(w) tau2(F.w)"]))
    c = (rng.randint(0, 2), rng.randint(0, 2), d)
    t = Bracket("PT", "vir", geom, c, tuple(random_state(rng, alg, d) for _ in range(N)), mono)
    A1 = tuple(sorted(rng.sample(range(1, N + 1), rng.randint(0, N))))
    g1 = rng.randint(0, g)
    e = rules.degenerate(t, f"node[g1={g1},A1={'+'.join(map(str, A1))}]")
    for factors, _ in e.terms:
        x, y = factors if factors[0].geom.get("g") == g1 and factors[0].geom.get("N") == len(A1) + 1 \
            else factors[::-1]
        assert x.geom.get("g") + y.geom.get("g") == g
        assert len(x.relins) + len(y.relins) == N + 2
        assert tuple(a + b for a, b in zip(x.cls[:2], y.cls[:2])) == c[:2]
        assert x.cls[-1] == y.cls[-1] == d
        assert x.r + y.r == t.r
        assert geom.d_beta(c) == x.geom.d_beta(x.cls) + y.geom.d_beta(y.cls) - 2 * d


# --- epsilon calculus -------------------------------------------------------------------

def _full(rel="q1(p)|0>", cls_="0,1"):
    return P(f"Z[PT,full]{{K3xC[alg=toy]}}_({cls_})({rel} || 1)")


def test_epsilon_product_rule():
    x, y = _full("q1(p)|0>"), _full("q1(1)|0>")
    a, b = Fraction(2), Fraction(3)
    e = Expression.build([((x, y), LaurentSeries.make("z", {0: EpsScalar(a, b)}))])
    vir, red = rules.epsilon_split(e)
    xv, yv, xr, yr = (w.with_(mode=m) for w, m in ((x, "vir"), (y, "vir"), (x, "red"), (y, "red")))
    assert vir == Expression.build([((xv, yv), const(a))])
    assert red == Expression.build([((xv, yv), const(b)), ((xr, yv), const(a)), ((xv, yr), const(a))])


def test_epsilon_pure_vir_has_no_red_part():
    v = _full().with_(mode="vir")
    vir, red = rules.epsilon_split(Expression.of(v))
    assert vir == Expression.of(v)
    assert red.is_zero()


def test_epsilon_vanishing_rules():
    # the standard part vanishes off beta = 0
    vir, red = rules.epsilon_split(Expression.of(_full(cls_="B,1")))
    assert vir.is_zero() and len(red.terms) == 1
    # reduced GW vanishes at beta = 0
    gw = _full().with_(theory="GW")
    vir, red = rules.epsilon_split(Expression.of(gw))
    assert len(vir.terms) == 1 and red.is_zero()


# --- diagonal splitting, rigidification, comparison ----------------------------------------------

DIAG = "Z[PT,vir]{P3/P2}_(H)(q1(1)|0> || tau0(H) tau1(1) * Drel(1,2))"


def test_split_diagonal_shape():
    t = P(DIAG)
    e = rules.split_diagonal(t)
    absolute = [f for f, c in e.terms if len(f) == 1]
    rubber = [(f, c) for f, c in e.terms if len(f) == 2]
    assert len(absolute) == 1 and "DX1[j]" in str(absolute[0][0])
    assert rubber and all(c == const(-1) for _, c in rubber)
    for factors, _ in rubber:
        rub = next(b for b in factors if b.geom.rubber)
        rest = next(b for b in factors if not b.geom.rubber)
        # both glued markings sit on the rubber side
        assert rub.r == 2 and rest.r == 0
        assert rub.cls[0] + rest.cls[0] == t.cls[0]


def test_split_diagonal_errors():
    with pytest.raises(RuleError, match="no diagonal factor"):
        rules.split_diagonal(P("Z[PT,vir]{P3/P2}_(H)(q1(1)|0> || tau0(H) tau1(1))"))
    with pytest.raises(RuleError):
        rules.split_diagonal(P("Z[PT,vir]{P3}_(H)( || tau0(H) tau1(1) * Drel(1,2))"))


def test_rigidify():
    r = P("Z[PT,vir]{PN~}_(0,1)(q1(1)|0> | q1(p)|0> || tau1(h))")
    out = rules.rigidify(r)
    assert str(out) == "Z[PT,vir]{PN}_(0,1)(q1(1)|0> | q1(p)|0> || tau1(D0.h))"
    with pytest.raises(RuleError):
        rules.rigidify(out)
    with pytest.raises(RuleError):
        rules.rigidify(P("Z[PT,vir]{PN~}_(0,1)(q1(1)|0> | q1(p)|0> || 1)"))


def test_comparison():
    c = P("Z[PT,vir]{P3}_(2H)( || tau0(H) tau1(H))")
    std = rules.comparison_simplify(c)
    assert std.std and str(std) == "Z[PT,vir;std]{P3}_(2H)(|| tau0(H) tau1(H))"
    assert rules.comparison_simplify(std, inverse=True) == c
    empty = P("Z[PT,vir]{P3}_(H)( || 1)")
    assert rules.comparison_simplify(empty) == empty
    with pytest.raises(RuleError):
        rules.comparison_simplify(P("Z[PT,vir]{P3}_(H)( || tau0(H) tau0(1) * Drel(1,2))"))


# --- multiple covers ---------------------------------------------------------------------------

@pytest.mark.parametrize("div,ks", [(1, [1]), (2, [1, 2]), (3, [1, 3]), (4, [1, 2, 4]), (6, [1, 2, 3, 6])])
def test_mcf_pt_divisors(div, ks):
    t = mcf_fixture(div)
    assert rules.divisibility(t) == div
    out = brackets(rules.mcf_pt(t))
    assert sorted(b.arg for b in out) == ks
    for b in out:
        assert rules.divisibility(b) == div // b.arg
        assert b.geom.get("phi") == b.arg and b.geom.get("prim") == 1
        assert b.cls[-1] == t.cls[-1]


def test_mcf_preconditions():
    with pytest.raises(RuleError):
        rules.mcf_pt(mcf_fixture(2, "GW"))
    with pytest.raises(RuleError):
        rules.mcf_gw(mcf_fixture(2, "PT"))
    with pytest.raises(RuleError):
        rules.mcf_pt(P("Z[PT,red]{K3xC}_(2B+2F,1)(q1(p)|0> || tau0(w))"))


def test_mcf_gw_prefactor_weights():
    assert rules.mcf_prefactor_check(mcf_fixture(2, "GW")) > 0
    assert len(rules.mcf_gw(mcf_fixture(2, "GW")).terms) == 2


def test_gwpt_primitive():
    prim = mcf_fixture(1)
    out = rules.gwpt_primitive(Expression.of(prim))
    assert brackets(out)[0].theory == "GW"
    # an imprimitive class without the primitive marker is left alone
    assert rules.gwpt_primitive(Expression.of(mcf_fixture(2))) == Expression.of(mcf_fixture(2))


# --- correspondence ------------------------------------------------------------------------------

def test_transform_bracket():
    t = P("Z[PT,vir]{P3}_(H)( || tau1(H))")
    e = rules.transform_bracket(t)
    assert str(e) == "[1] Z[GW,vir]{P3}_(H)(|| tau0(H.K[2;1])) + [z^-1] Z[GW,vir]{P3}_(H)(|| tau1(H))"
    rel = P("Z[PT,vir]{P3/P2}_(H)(q1(1)|0> || tau1(H))")
    assert "Klog[2;1]" in str(rules.transform_bracket(rel))
    with pytest.raises(RuleError):
        rules.transform_bracket(t.with_(theory="GW"))


@pytest.mark.parametrize("text,split", [
    ("Z[PT,vir]{K3xC[alg=toy]}_(0,1)(q1(p)|0> || tau0(w))", "trivial"),
    ("Z[PT,vir]{K3xC[alg=toy]}_(0,1)(q1(p)|0> || tau1(w))", "node[g1=0,A1=1]"),
    ("Z[PT,vir]{K3xC[alg=toy]}_(0,1)(q1(p)|0> || tau0(w) tau0(F.w))", "node[g1=0,A1=1]"),
    ("Z[PT,vir]{K3xC[g=1,alg=toy]}_(B,1)(q1(p)|0> || tau2(w) tau0(w))", "selfnode"),
    ("Z[PT,vir]{P3}_(H)( || tau1(H) tau0(H))", "normal-cone"),
])
def test_correspondence_compatibility(text, split):
    rep = verify_correspondence_compat(P(text), split)
    assert rep.ok
    assert rep.route_a.result == rep.route_b.result


def test_correspondence_bounds():
    with pytest.raises(RuleError):
        verify_correspondence_compat(P("Z[PT,vir]{P3}_(H)( || tau4(H))"))


# --- capped assembly ---------------------------------------------------------------------------

def test_capped_assemble():
    assert len(rules.capped_assemble(2, length=2).terms) == 3
    assert rules.capped_assemble(1, R_zero=True) == Expression.of(Atom("V[lam]"))
    assert rules.capped_assemble(1, V=False).is_zero()
    toy = rules.capped_assemble(2, alg="toy")
    assert len(toy.terms) == 1 + len(hilb_diagonal(2, preset("toy")))
    with pytest.raises(RuleError):
        rules.capped_assemble(2)
