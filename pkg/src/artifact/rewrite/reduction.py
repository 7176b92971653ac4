"""Reduction of K3 x C brackets to caps by induction on (genus, number of divisors)."""
from __future__ import annotations

from fractions import Fraction

from ..fock import WeightedPartition
from .derivation import RULES, Derivation, register, run_to_fixpoint, split_id
from .rules import RuleError, is_zero_class
from .terms import Atom, Bracket, Expression, const

TERMINAL = (0, 1)


class SupportError(RuleError):
    pass


def check_reducible(t: Bracket):
    if t.geom.kind != "K3xC" or t.geom.get("prim") or t.arg != 1:
        raise RuleError(f"reduction starts from a K3xC bracket, not {t.geom}")
    if t.mode not in ("vir", "red"):
        raise RuleError("split full-mode brackets into vir and red parts first")
    if t.measure == (0, 0):
        raise RuleError("closed genus 0 base curve: nothing to degenerate")
    for _, c in t.mono.groups:
        if "w" not in c:
            raise SupportError(f"interior class {'.'.join(c) or '1'} is not supported on a fiber")
    for a in t.bag:
        if not a.startswith("tau["):
            raise SupportError(f"opaque insertion {a} is not supported on a fiber")


def _expand(ins):
    """Relative insertion as [(label, coefficient)] over weighted partitions."""
    if isinstance(ins, str):
        return [(ins, Fraction(1))]
    return [(str(WeightedPartition(ins.alg, pairs)), c) for pairs, c in ins.terms]


def _guard(t, out: Expression):
    for b in out.brackets():
        if not b.measure < t.measure:
            raise AssertionError(f"measure {b.measure} does not drop below {t.measure}")
    return out


@register("genus-node")
def genus_node(t: Bracket, step, arg=None) -> Expression:
    """Self-gluing degeneration of the base curve; both new divisors carry a Kunneth pair."""
    g, N = t.geom.get("g"), t.geom.get("N")
    if g < 1:
        raise RuleError("genus-node needs a base curve of positive genus")
    piece = t.geom.with_params(g=g - 1, N=N + 2)
    if t.geom.d_beta(t.cls) != piece.d_beta(t.cls) - 2 * t.cls[-1]:
        raise AssertionError("degree bookkeeping broken in genus-node")
    nu = f"nu{step}"
    b = t.with_(geom=piece, relins=t.relins + (f"H[{nu}]", f"Hv[{nu}]"))
    return _guard(t, Expression.of(b))


@register("cap-invert")
def cap_invert(t: Bracket, step, arg=None) -> Expression:
    """Trade the last relative condition for an interior insertion via the inverse cap matrix."""
    g, N = t.geom.get("g"), t.geom.get("N")
    if g != 0 or N < 2:
        raise RuleError("cap-invert needs genus 0 and at least two divisors")
    mu, mv, nu = f"mu{step}", f"mv{step}", f"nu{step}"
    rest = t.geom.with_params(N=N - 1)
    cap = t.geom.with_params(N=1)
    d = t.cls[-1]
    zero = (0,) * (len(t.cls) - 1) + (d,)
    items = []
    for lam, c in _expand(t.relins[-1]):
        minv = Atom(f"Minv[{mu};{lam}]")
        if t.mode == "vir":
            if not is_zero_class(t.geom, t.cls):
                continue
            main = t.with_(geom=rest, relins=t.relins[:-1], bag=t.bag + (f"tau[{mu}]",))
            items.append(((minv, main), const(c)))
            continue
        main = t.with_(geom=rest, relins=t.relins[:-1], bag=t.bag + (f"tau[{mu}]",))
        items.append(((minv, main), const(c)))
        capb = Bracket(t.theory, "red", cap, t.cls, (f"Hv[{nu}]",), bag=(f"tau[{mu}]",))
        comp = t.with_(mode="vir", geom=rest, cls=zero, relins=t.relins[:-1],
                       bag=t.bag + (f"tau[{mv}]",))
        items.append(((minv, Atom(f"Minv[{mv};{nu}]"), capb, comp), const(-c)))
    return _guard(t, Expression.build(items))


def _pending_genus(b):
    return b.geom.kind == "K3xC" and b.geom.get("g") > 0


def _pending_cap(b):
    return b.geom.kind == "K3xC" and b.measure != TERMINAL and b.geom.get("g") == 0


PLAN = [("genus-node", _pending_genus), ("cap-invert", _pending_cap)]


def reduce_to_cap(t: Bracket):
    """(expression in caps, derivation); genus steps are taken before inversion steps."""
    check_reducible(t)
    d = Derivation(Expression.of(t))
    run_to_fixpoint(d, PLAN)
    for b in d.result.brackets():
        if b.measure != TERMINAL:
            raise AssertionError(f"reduction stopped at measure {b.measure}")
    return d.result, d


def measures_decrease(d: Derivation) -> bool:
    """Audit: every step replaces one bracket by brackets of strictly smaller measure."""
    prev = d.root
    for n, s in enumerate(d.steps, 1):
        before = prev.factor_at(s.path)
        scope, fn = RULES[split_id(s.rule)[0]]
        local = fn(before, n, split_id(s.rule)[1])
        if any(not b.measure < before.measure for b in local.brackets()):
            return False
        prev = s.output
    return True
