"""Structural rewrite rules on bracket terms."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd

from .. import descend
from ..algebra import preset
from ..descend import DescendentMonomial, cls
from ..fock import WeightedPartition, hilb_diagonal
from ..parsing import Scanner
from ..series import EpsScalar, LaurentSeries
from .geometry import Geometry, effective_splits, is_zero_class
from .terms import Atom, Bracket, Expression, const


class RuleError(ValueError):
    pass


class PrefactorError(RuleError):
    pass


# --- helpers ----------------------------------------------------------------------------

def kunneth(n, alg_name, mode="eager", tag="j"):
    """(left, right, coefficient) triples for the diagonal of the Hilbert scheme of n points."""
    if mode == "eager":
        return [(t.left, t.right, t.coeff) for t in hilb_diagonal(n, preset(alg_name))]
    if mode == "symbolic":
        return [(f"H[{tag}]", f"Hv[{tag}]", Fraction(1))]
    raise RuleError(f"unknown Kunneth mode {mode!r}")


def group_splits(mono: DescendentMonomial):
    """Marking sets I over whole diagonal groups; a group split across both sides restricts to 0."""
    groups = [g for g, _ in mono.groups]
    out = []
    for k in range(len(groups) + 1):
        for pick in combinations(range(len(groups)), k):
            out.append(tuple(sorted(i for j in pick for i in groups[j])))
    return out


def complement(mono, I):
    return tuple(i for i in range(1, mono.r + 1) if i not in I)


LOG_ATOM = re.compile(r"^(K|c\d)(\[|$)")


def to_log(c):
    """Chern-class atoms of T_X become those of the log tangent bundle on a relative piece."""
    out = []
    for a in c:
        m = LOG_ATOM.match(a)
        if m and m.group(1) == "K":
            out.append("Klog" + a[1:])
        elif m:
            out.append(m.group(1) + "log" + a[len(m.group(1)):])
        else:
            out.append(a)
    return cls(*out)


def piece_mono(src_geom, piece_geom, mono):
    if src_geom.context == "absolute" and piece_geom.context == "log":
        return mono.map_classes(to_log)
    return mono


# --- degeneration -------------------------------------------------------------------------

@dataclass(frozen=True)
class Degeneration:
    kind: str
    g1: int = 0
    A1: tuple = ()

    def __str__(self):
        if self.kind == "node":
            return f"node[g1={self.g1},A1={'+'.join(map(str, self.A1))}]"
        return self.kind


def parse_degeneration(text: str) -> Degeneration:
    sc = Scanner(text)
    kind = sc.match(re.compile(r"[a-z\-]+"), "degeneration name")
    if kind not in ("trivial", "node", "selfnode", "normal-cone"):
        sc.error(f"unknown degeneration {kind!r}", 0)
    g1, A1 = 0, ()
    if kind == "node" and sc.accept("["):
        while not sc.accept("]"):
            key = sc.match(re.compile(r"g1|A1"), "g1 or A1")
            sc.expect("=")
            if key == "g1":
                g1 = sc.integer()
            else:
                vals = []
                m = sc.try_match(re.compile(r"\d+"))
                while m is not None:
                    vals.append(int(m))
                    if not sc.accept("+"):
                        break
                    m = sc.match(re.compile(r"\d+"), "divisor index")
                A1 = tuple(vals)
            sc.accept(",")
    sc.finish()
    return Degeneration(kind, g1, tuple(sorted(A1)))


def _assert_degree(lhs, rhs, what):
    if lhs != rhs:
        raise RuleError(f"degree bookkeeping broken in {what}: {lhs} != {rhs}")


def degenerate(t: Bracket, split, kunneth_mode="eager", tag="j") -> Expression:
    """Degeneration formula: class splits x marking splits x diagonal of the gluing divisor."""
    if isinstance(split, str):
        split = parse_degeneration(split)
    if split.kind == "trivial":
        return Expression.of(t)
    if t.bag:
        raise RuleError("opaque interior insertions cannot be distributed over a degeneration")
    if t.arg != 1:
        raise RuleError("degenerate a bracket before rescaling its argument")
    g = t.geom
    items = []
    if split.kind in ("node", "selfnode"):
        if g.kind != "K3xC":
            raise RuleError(f"{split.kind} degenerations apply to K3xC, not {g}")
        d = t.cls[-1]
        genus, N = g.get("g"), g.get("N")
        if split.kind == "selfnode":
            if genus < 1:
                raise RuleError("selfnode needs genus at least 1")
            piece = g.with_params(g=genus - 1, N=N + 2)
            _assert_degree(g.d_beta(t.cls), piece.d_beta(t.cls) - 2 * d, "selfnode")
            for L, R, k in kunneth(d, g.alg_name, kunneth_mode, tag):
                b = t.with_(geom=piece, relins=t.relins + (L, R),
                            mono=piece_mono(g, piece, t.mono))
                items.append(((b,), const(k)))
            return Expression.build(items)
        A1 = split.A1
        if any(not 1 <= a <= N for a in A1) or not 0 <= split.g1 <= genus:
            raise RuleError("node descriptor does not fit the geometry")
        A2 = tuple(a for a in range(1, N + 1) if a not in A1)
        G1 = g.with_params(g=split.g1, N=len(A1) + 1)
        G2 = g.with_params(g=genus - split.g1, N=len(A2) + 1)
        for b1, b2 in effective_splits(g.lattice(t.cls)):
            c1, c2 = b1 + (d,), b2 + (d,)
            _assert_degree(g.d_beta(t.cls), G1.d_beta(c1) + G2.d_beta(c2) - 2 * d, "node")
            for I in group_splits(t.mono):
                J = complement(t.mono, I)
                m1 = piece_mono(g, G1, t.mono.restrict(I))
                m2 = piece_mono(g, G2, t.mono.restrict(J))
                for L, R, k in kunneth(d, g.alg_name, kunneth_mode, tag):
                    x = t.with_(geom=G1, cls=c1, relins=tuple(t.relins[a - 1] for a in A1) + (L,),
                                mono=m1)
                    y = t.with_(geom=G2, cls=c2, relins=tuple(t.relins[a - 1] for a in A2) + (R,),
                                mono=m2)
                    items.append(((x, y), const(k)))
        return Expression.build(items)
    if split.kind == "normal-cone":
        if g.kind != "P3":
            raise RuleError(f"normal-cone degeneration is registered for P3, not {g}")
        h = t.cls[0]
        X1, P = Geometry("P3/P2"), Geometry("PN0")
        for a in range(h + 1):
            c1, c2 = (h - a,), (a, h)
            _assert_degree(g.d_beta(t.cls), X1.d_beta(c1) + P.d_beta(c2)
                           - X1.div_sizes(c1)[0] - P.div_sizes(c2)[0], "normal-cone")
            _assert_degree(X1.div_sizes(c1)[0], P.div_sizes(c2)[0], "normal-cone gluing")
            for I in group_splits(t.mono):
                J = complement(t.mono, I)
                for L, R, k in kunneth(h - a, "P2", kunneth_mode, tag):
                    x = t.with_(geom=X1, cls=c1, relins=(L,), mono=piece_mono(g, X1, t.mono.restrict(I)))
                    y = t.with_(geom=P, cls=c2, relins=(R,), mono=piece_mono(g, P, t.mono.restrict(J)))
                    items.append(((x, y), const(k)))
        return Expression.build(items)
    raise RuleError(f"unknown degeneration {split}")


# --- epsilon calculus -----------------------------------------------------------------------

def _part(c: LaurentSeries, which):
    return LaurentSeries.make(c.var, {e: EpsScalar(getattr(v, which)) for e, v in c.terms},
                              c.trunc)


def vanishes(b: Bracket) -> bool:
    """Vanishing of the standard class off beta = 0 on K3 targets (and of reduced GW at beta = 0)."""
    if b.geom.kind != "K3xC":
        return False
    zero = is_zero_class(b.geom, b.cls)
    if b.mode == "vir":
        return not zero
    if b.mode == "red" and b.theory == "GW":
        return zero
    return False


def epsilon_split(e: Expression):
    """Standard and epsilon parts of a full-mode expression, with the vanishing rules applied.

    A vir bracket counts as a full one with zero epsilon part.
    """
    vir, red = [], []
    for factors, c in e.terms:
        brs = [f for f in factors if isinstance(f, Bracket)]
        atoms = tuple(f for f in factors if not isinstance(f, Bracket))
        if any(b.mode not in ("full", "vir") for b in brs):
            raise RuleError("epsilon_split expects full or vir brackets only")
        V = [b.with_(mode="vir") for b in brs]
        std, eps = _part(c, "std"), _part(c, "eps")
        vir.append((atoms + tuple(V), std))
        red.append((atoms + tuple(V), eps))
        for i, b in enumerate(brs):
            if b.mode == "full":
                red.append((atoms + tuple(V[:i]) + (b.with_(mode="red"),) + tuple(V[i + 1:]), std))
    keep = lambda items: [(f, c) for f, c in items
                          if not any(isinstance(x, Bracket) and vanishes(x) for x in f)]
    return Expression.build(keep(vir)), Expression.build(keep(red))


# --- splitting of the relative diagonal -------------------------------------------------------

RUBBER_OF = {"P3/P2": "PN~"}


def _cut_pair(mono: DescendentMonomial, a, b, left_atom, right_atom):
    """Replace the diagonal factor gluing a and b by a Kunneth pair of pullbacks."""
    groups = []
    for g, c in mono.groups:
        if a in g and b in g:
            rest = tuple(i for i in g if i != b)
            groups.append((rest, cls(c, left_atom)))
            groups.append(((b,), cls(right_atom)))
        else:
            groups.append((g, c))
    return DescendentMonomial(mono.ks, tuple(groups))


def diagonal_pair(mono: DescendentMonomial):
    for g, _ in mono.groups:
        if len(g) >= 2:
            return g[0], g[1]
    return None


def split_diagonal(t: Bracket, pair=None, kunneth_mode="eager", tag="j") -> Expression:
    """Relative diagonal = absolute diagonal minus rubber corrections glued along D."""
    pair = pair or diagonal_pair(t.mono)
    if pair is None:
        raise RuleError("no diagonal factor to split")
    a, b = pair
    if t.mono.group_of(a)[0] != t.mono.group_of(b)[0]:
        raise RuleError(f"markings {a} and {b} are not glued")
    g = t.geom
    if g.kind not in RUBBER_OF:
        raise RuleError(f"no rubber geometry registered for {g}")
    if t.bag or t.arg != 1:
        raise RuleError("split_diagonal needs a plain interior insertion")
    rub = Geometry(RUBBER_OF[g.kind])
    items = [((t.with_(mono=_cut_pair(t.mono, a, b, f"DX1[{tag}]", f"DX2[{tag}]")),), const(1))]
    h = t.cls[0]
    d = g.div_sizes(t.cls)[0]
    cut = _cut_pair(t.mono, a, b, f"DD1[{tag}]", f"DD2[{tag}]")
    # groups of the cut monomial still containing a, plus b, must go to the rubber side
    for alpha in range(h + 1):
        rc, rest = (alpha, d), (h - alpha,)
        d0 = rub.div_sizes(rc)[0]
        if d0 < 0 or (alpha == 0 and d == 0):
            continue
        _assert_degree(g.d_beta(t.cls), g.d_beta(rest) + rub.d_beta(rc) - 2 * d0, "splitting")
        _assert_degree(g.div_sizes(rest)[0], d0, "splitting gluing")
        for I in group_splits(t.mono):
            if a not in I or b not in I:
                continue
            J = complement(t.mono, I)
            m1, m2 = cut.restrict(I), cut.restrict(J)
            for L, R, k in kunneth(d0, g.alg_name, kunneth_mode, tag + "d"):
                x = t.with_(geom=rub, cls=rc, relins=(L, t.relins[0]), mono=m1)
                y = t.with_(geom=g, cls=rest, relins=(R,), mono=m2)
                items.append(((x, y), const(-k)))
    return Expression.build(items)


# --- rigidification and comparison -------------------------------------------------------------

def rigidify(t: Bracket) -> Bracket:
    if not t.geom.rubber:
        raise RuleError("rigidify needs a rubber bracket")
    if t.r == 0:
        raise RuleError("rigidify needs at least one interior marking")
    groups = tuple((g, cls(c, "D0")) if 1 in g else (g, c) for g, c in t.mono.groups)
    return t.with_(geom=Geometry(t.geom.kind[:-1]), mono=DescendentMonomial(t.mono.ks, groups))


def comparison_simplify(t: Bracket, inverse=False) -> Bracket:
    if inverse:
        return t.with_(std=False)
    if not t.mono.is_pullback():
        raise RuleError("comparison needs a pure pullback class")
    if t.r == 0:
        return t
    return t.with_(std=True)


# --- multiple cover formulas -------------------------------------------------------------------

def divisibility(t: Bracket) -> int:
    lat = t.geom.lattice(t.cls)
    r = 0
    for n in lat:
        r = gcd(r, n)
    return r


def _mcf_pre(t, theory):
    if t.theory != theory or t.mode != "red":
        raise RuleError(f"multiple cover formula expects a {theory} reduced bracket")
    if t.geom.kind != "K3xC" or t.geom.get("prim") or t.arg != 1:
        raise RuleError("multiple cover formula expects an untwisted K3xC bracket")
    if t.r or t.bag:
        raise RuleError("multiple cover formula is stated without interior insertions")
    r = divisibility(t)
    if r == 0:
        raise RuleError("curve class must be nonzero")
    return r


def _cover_terms(t, r):
    out = []
    for k in range(1, r + 1):
        if r % k:
            continue
        lat = tuple(n // k for n in t.geom.lattice(t.cls))
        # class beta/k stands for a primitive class of the same square
        out.append(t.with_(geom=t.geom.with_params(phi=k, prim=1), cls=lat + (t.cls[-1],), arg=k))
    return out


def mcf_pt(t: Bracket) -> Expression:
    r = _mcf_pre(t, "PT")
    return Expression.build([((b,), const(1)) for b in _cover_terms(t, r)])


def _relins_degrees(t):
    """(e, sum of complex weight degrees) for each product of basis monomials in the insertions."""
    g_c = t.geom.get("g")
    d = t.cls[-1]
    combos = [(2 * d * (1 - g_c), 0)]
    for ins in t.relins:
        if isinstance(ins, str):
            return []
        alg = ins.alg
        nxt = []
        for e, deg in combos:
            for pairs, _ in ins.terms:
                lam = WeightedPartition(alg, pairs)
                nxt.append((e + lam.length - lam.size,
                            deg + sum(alg.degrees[i] // 2 for _, i in pairs)))
        combos = nxt
    return combos


def mcf_prefactor_check(t: Bracket, genera=range(0, 6)):
    """z -> kz on the genus-g prefactor z^(e+2g-2) must produce the cover weight k^(2g-3+deg)."""
    checked = 0
    for e, deg in _relins_degrees(t):
        if e + 1 != deg:
            continue
        for g in genera:
            if 2 * g - 2 + e != 2 * g - 3 + deg:
                raise PrefactorError(f"k-exponent mismatch at genus {g}: e={e}, deg={deg}")
            checked += 1
    return checked


def mcf_gw(t: Bracket) -> Expression:
    r = _mcf_pre(t, "GW")
    mcf_prefactor_check(t)
    return Expression.build([((b,), const(1)) for b in _cover_terms(t, r)])


def gwpt_primitive(e: Expression) -> Expression:
    """Primitive correspondence axiom: Z_PT(...)(p^k) = Z_GW(...)(kz) without interior insertions."""
    items = []
    for factors, c in e.terms:
        new = []
        for f in factors:
            if isinstance(f, Bracket) and f.theory == "PT" and f.mode == "red" \
                    and f.geom.kind == "K3xC" and not f.r and not f.bag \
                    and (f.geom.get("prim") or divisibility(f) == 1):
                f = f.with_(theory="GW")
            new.append(f)
        items.append((tuple(new), c))
    return Expression.build(items)


# --- correspondence on brackets ---------------------------------------------------------------

def transform_bracket(t: Bracket, K=descend.SHIPPED, context=None) -> Expression:
    """PT bracket -> GW brackets of the transformed insertion (coefficients in z)."""
    if t.theory != "PT":
        raise RuleError("the descendent transform starts from a PT bracket")
    if t.bag:
        raise RuleError("opaque insertions cannot be transformed")
    ctx = context or t.geom.context
    out = descend.transform_general(t.mono, K, ctx)
    return Expression.build([((t.with_(theory="GW", mono=m),), c) for m, c in out.terms])


def map_brackets(e: Expression, fn) -> Expression:
    """Apply fn: Bracket -> Expression to every bracket factor, multiplying out."""
    acc = Expression.zero()
    for factors, c in e.terms:
        prod = Expression.build([((), c)])
        for f in factors:
            prod = prod * (fn(f) if isinstance(f, Bracket) else Expression.of(f))
        acc = acc + prod
    return acc


# --- capped assembly --------------------------------------------------------------------------

def capped_assemble(d, alg=None, length=None, lam="lam", R_zero=False, V=True) -> Expression:
    """Vertex term plus vertex x rubber corrections over the diagonal of the Hilbert scheme."""
    if isinstance(lam, WeightedPartition) and lam.size != d:
        raise RuleError(f"insertion of size {lam.size} for degree {d}")
    if not V:
        return Expression.zero()
    lam_txt = str(lam).replace(" ", "")
    items = [((Atom(f"V[{lam_txt}]"),), const(1))]
    if R_zero:
        return Expression.build(items)
    if alg is not None:
        diag = [(str(t.mu), t.coeff) for t in hilb_diagonal(d, preset(alg))]
    else:
        if length is None:
            raise RuleError("give an algebra or the length of the diagonal list")
        diag = [(f"phi{i}", Fraction(1)) for i in range(1, length + 1)]
    for phi, k in diag:
        items.append(((Atom(f"V[{phi}]"), Atom(f"R[{lam_txt};{phi}v]"), Atom("Inv[t-PsiD0]")),
                      const(k)))
    return Expression.build(items)
