"""Two-route consistency checks, each recorded as replayable derivations."""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra import preset
from ..fock import parse_state
from ..series import RationalFunction, p_to_z
from . import rules
from .derivation import Derivation, run_to_fixpoint
from .geometry import Geometry
from .terms import Bracket, Expression


def mcf_fixture(div=2, theory="PT"):
    """Reduced bracket of class div*(B+F) with relative conditions of total weight degree e+1."""
    alg = preset("K3-truncation")
    return Bracket(theory, "red", Geometry.of("K3xC", N=2), (div, div, 1),
                   (parse_state("q1(p)|0>", alg), parse_state("q1(F)|0>", alg)))


@dataclass
class MCFReport:
    derivation: Derivation
    series_checks: list  # (k, p^k then p = e^z agrees with z -> kz after p = e^z)

    @property
    def ok(self):
        return self.derivation.result.is_zero() and all(ok for _, ok in self.series_checks)


def _top(b):
    return not b.geom.get("prim")


def verify_mcf_compat(div=2, rf=None, order=6) -> MCFReport:
    """Z_PT - Z_GW is rewritten to 0 by the PT cover formula, the primitive axiom, the GW one."""
    pt = mcf_fixture(div)
    d = Derivation(Expression.of(pt) - Expression.of(pt.with_(theory="GW")))
    if rules.divisibility(pt) == 1:
        run_to_fixpoint(d, [("gwpt-primitive", lambda b: b.theory == "PT")])
    else:
        run_to_fixpoint(d, [("mcf-pt", lambda b: b.theory == "PT" and _top(b)),
                            ("gwpt-primitive", lambda b: b.theory == "PT"),
                            ("mcf-gw", lambda b: b.theory == "GW" and _top(b))])
    rf = rf or RationalFunction.make([0, 1], [1, -2, 1])
    checks = []
    for k in range(1, div + 1):
        if div % k == 0:
            lhs = p_to_z(rf.substitute_power(k), order)
            rhs = p_to_z(rf, order).scale_variable(k)
            checks.append((k, lhs == rhs))
    return MCFReport(d, checks)


@dataclass
class CompatReport:
    route_a: Derivation  # transform, then degenerate
    route_b: Derivation  # degenerate, then transform

    @property
    def ok(self):
        return self.route_a.result == self.route_b.result


def verify_correspondence_compat(t: Bracket, split="trivial", max_r=3, max_size=4) -> CompatReport:
    if not t.mono.is_pullback():
        raise rules.RuleError("compatibility is checked for pullback insertions only")
    if t.r > max_r or t.mono.size > max_size:
        raise rules.RuleError(f"bounds exceeded: r <= {max_r}, |alpha| <= {max_size}")
    split = str(split) if not isinstance(split, str) else split
    a = Derivation(Expression.of(t))
    a.apply("transform", (0, 0))
    if split != "trivial":
        a.apply(f"degenerate-all:{split}")
    b = Derivation(Expression.of(t))
    if split != "trivial":
        b.apply(f"degenerate:{split}", (0, 0))
    run_to_fixpoint(b, [("transform", lambda x: x.theory == "PT")])
    return CompatReport(a, b)
