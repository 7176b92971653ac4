import random
from collections import Counter
from fractions import Fraction
from math import factorial, prod

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from artifact.rewrite import capmatrix, prefactors, reduction
from artifact.rewrite.compat import verify_mcf_compat
from artifact.rewrite.derivation import Derivation, ReplayError, read_derivation, replay
from artifact.rewrite.generate import random_reducible
from artifact.rewrite.prefactors import Mono, gw_degeneration, pt_degeneration, pt_splitting, sign
from artifact.rewrite.rules import RuleError
from artifact.rewrite.terms import Expression, parse_bracket
from artifact.series import RationalFunction

P = parse_bracket
NODE = "Z[PT,vir]{K3xC[alg=toy]}_(0,1)(q1(p)|0> || tau0(w))"


# --- derivations ----------------------------------------------------------------------------

def test_derivation_records_and_replay():
    d = Derivation(Expression.of(P(NODE)))
    d.apply("degenerate:node[g1=0,A1=1]", (0, 0))
    lines = str(d).splitlines()
    assert lines[0] == f"root: [1] {NODE}"
    assert lines[1].startswith("step 1: rule=degenerate:node[g1=0,A1=1] at=0.0 -> ")
    root, steps = read_derivation(str(d))
    assert root == d.root and steps[0][:2] == ("degenerate:node[g1=0,A1=1]", (0, 0))
    assert replay(str(d)).result == d.result


def test_replay_detects_tampering():
    d = Derivation(Expression.of(P(NODE)))
    d.apply("degenerate:node[g1=0,A1=1]", (0, 0))
    bad = str(d).replace("q1(1)|0>", "q1(p)|0>", 1)
    with pytest.raises(ReplayError, match="step 1"):
        replay(bad)
    with pytest.raises(ReplayError):
        replay("step 1: rule=x at=0.0 -> 0")
    with pytest.raises(ReplayError):
        replay(f"root: [1] {NODE}\nstep 1: rule=no-such-rule at=0.0 -> 0")


def test_global_step_path():
    d = Derivation(Expression.of(P(NODE)))
    d.apply("degenerate-all:node[g1=0,A1=1]")
    assert d.steps[0].at() == "*"
    assert replay(str(d)).result == d.result


# --- reduction to caps -------------------------------------------------------------------------

def test_terminal_bracket_needs_no_steps():
    t = P("Z[PT,vir]{K3xC}_(0,1)(q1(p)|0> || tau0(w))")
    result, d = reduction.reduce_to_cap(t)
    assert d.steps == [] and result == Expression.of(t)


def test_genus_one_reduction():
    t = P("Z[PT,vir]{K3xC[g=1,N=0]}_(0,1)(|| tau0(w))")
    result, d = reduction.reduce_to_cap(t)
    rules_used = [s.rule for s in d.steps]
    assert rules_used[0] == "genus-node"
    after = [b for b in d.steps[0].output.brackets()]
    assert {(b.geom.get("g"), b.geom.get("N")) for b in after} == {(0, 2)}
    assert set(rules_used[1:]) == {"cap-invert"}
    assert all(b.measure == reduction.TERMINAL for b in result.brackets())
    assert reduction.measures_decrease(d)


def test_reduction_preconditions():
    with pytest.raises(RuleError):
        reduction.reduce_to_cap(P("Z[PT,vir]{K3xC[N=0]}_(0,1)(|| tau0(w))"))
    with pytest.raises(reduction.SupportError):
        reduction.reduce_to_cap(P("Z[PT,vir]{K3xC}_(0,1)(q1(p)|0> || tau0(p))"))
    with pytest.raises(RuleError):
        reduction.reduce_to_cap(P("Z[PT,full]{K3xC}_(0,1)(q1(p)|0> || tau0(w))"))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_reduction_terminates_with_decreasing_measure(seed):
    t = random_reducible(random.Random(seed))
    result, d = reduction.reduce_to_cap(t)
    assert reduction.measures_decrease(d)
    assert all(b.measure == reduction.TERMINAL for b in result.brackets())
    again = replay(str(d))
    assert str(again) == str(d)


# --- multiple cover compatibility --------------------------------------------------------------------

@pytest.mark.parametrize("div,steps", [(1, 1), (2, 4), (3, 4)])
def test_mcf_compat(div, steps):
    rep = verify_mcf_compat(div)
    assert rep.ok
    assert len(rep.derivation.steps) == steps
    assert rep.derivation.result.is_zero()
    assert replay(str(rep.derivation)).result.is_zero()


def test_mcf_square_with_other_function():
    rf = RationalFunction.make([1, 0, 1], [1, -3, 1])
    rep = verify_mcf_compat(2, rf=rf)
    assert all(ok for _, ok in rep.series_checks)


# --- prefactors ---------------------------------------------------------------------------------

def test_prefactor_examples():
    lhs, rhs = gw_degeneration(1, 1, 0, 0, 1, 1)
    assert lhs == rhs
    # the splitting identity with the whole rubber degree on the diagonal is the degeneration one
    for d1, d2, s, n1, n2 in [(2, 3, 1, 0, 4), (5, 0, 2, -1, 1)]:
        assert pt_splitting(d1, d2, s, n1, n2) == pt_degeneration(d1, d2, n1, n2, s)


def test_check_prefactors_clean():
    rep = prefactors.check_prefactors(1000, seed=1)
    assert rep.ok
    assert rep.checks["gw-degeneration"] == 1000


def test_prefactor_negative_control(monkeypatch):
    # dropping the (-1)^(l - |mu|) factor must be caught
    real = prefactors.gw_degeneration

    def unsigned(d1, d2, g1, g2, ell, size):
        lhs, rhs = real(d1, d2, g1, g2, ell, size)
        return lhs, rhs * sign(ell - size)

    monkeypatch.setattr(prefactors, "gw_degeneration", unsigned)
    rep = prefactors.check_prefactors(200, seed=3)
    assert not rep.ok
    assert {m[0] for m in rep.mismatches} == {"gw-degeneration"}


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20))
def test_mono_group_law(a, b, c, e):
    x, y = Mono(a, b), Mono(c, e)
    assert x * y == y * x
    assert (x * y).ipow == (a + c) % 4
    assert Mono(a, b) == Mono(a + 4, b)


# --- cap matrix ---------------------------------------------------------------------------------

def _aut_over_fact(lam):
    c = Counter(lam.pairs)
    return Fraction(prod(factorial(v) for v in c.values()), prod(factorial(k) for k, _ in lam.pairs))


@pytest.mark.parametrize("d,size", [(1, 2), (2, 5), (3, 10)])
def test_cap_matrix_toy(d, size):
    rep = capmatrix.check_cap_matrix(d, "toy")
    assert rep.ok and len(rep.labels) == size
    M = rep.matrix
    # rows and columns are sorted by rank, so block triangularity makes M lower triangular here
    assert M.is_lower
    assert rep.det_ratio == 1
    for lam, x in zip(rep.labels, rep.diagonal):
        want = _aut_over_fact(lam)
        assert x == sympy.Rational(want.numerator, want.denominator)


def test_cap_matrix_k3():
    rep = capmatrix.check_cap_matrix(2, "K3-truncation")
    assert rep.ok
    assert sympy.simplify(rep.matrix.det() - prod(rep.diagonal)) == 0


def test_cap_matrix_unknowns_are_symbols():
    _, M = capmatrix.cap_matrix(2, "toy")
    free = set().union(*(x.free_symbols for x in M))
    assert free and all(str(s).startswith("M[") for s in free)
