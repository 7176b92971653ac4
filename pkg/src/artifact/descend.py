"""Descendent correspondence: symbolic K-matrix, set-partition transforms and their inversion."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

from . import combinat
from .parsing import ParseError, Scanner
from .series import LaurentSeries, read_series, fmt_series

ATOM = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\[[^\]\s]*\])?")


class ExcessIntersectionError(ValueError):
    """A diagonal factor would be multiplied onto an already merged pair of markings."""

    def __init__(self, component, excess):
        super().__init__(f"repeated diagonal factor on markings {sorted(component, key=str)} "
                         f"(excess {excess})")
        self.component = component
        self.excess = excess


class LeadingTermError(ValueError):
    pass


# --- classes -----------------------------------------------------------------------

def cls(*atoms) -> tuple:
    """Commutative product of opaque atoms; () is the unit class."""
    out = []
    for a in atoms:
        if isinstance(a, tuple):
            out.extend(a)
        elif a in ("", "1"):
            continue
        else:
            out.append(a)
    return tuple(sorted(out))


def fmt_cls(c: tuple) -> str:
    return ".".join(c) if c else "1"


def read_cls(sc: Scanner) -> tuple:
    if sc.peek("1") and not ATOM.match(sc.text, sc.pos):
        sc.pos += 1
        return ()
    atoms = [sc.match(ATOM, "class atom")]
    while sc.accept("."):
        atoms.append(sc.match(ATOM, "class atom"))
    return cls(*atoms)


def zpow(k, c=1):
    return LaurentSeries.make("z", {k: c})


Z0 = LaurentSeries.make("z", {})
Z1 = zpow(0)


# --- descendent monomials -----------------------------------------------------------------

@dataclass(frozen=True)
class DescendentMonomial:
    """tau_{k_1}...tau_{k_r} applied to a normal-form class.

    groups: tuple of (markings, class); markings are 1-based, glued by small relative
    diagonals, and the class is pulled back along any one of them.
    """
    ks: tuple
    groups: tuple

    def __post_init__(self):
        gs = tuple(sorted(((tuple(sorted(m)), tuple(sorted(c))) for m, c in self.groups),
                          key=lambda g: g[0]))
        seen = sorted(i for m, _ in gs for i in m)
        if seen != list(range(1, len(self.ks) + 1)):
            raise ValueError("groups must partition the markings 1..r")
        if any(k < 0 for k in self.ks):
            raise ValueError("descendent indices must be non-negative")
        object.__setattr__(self, "ks", tuple(self.ks))
        object.__setattr__(self, "groups", gs)

    @staticmethod
    def pullback(ks, classes):
        return DescendentMonomial(tuple(ks), tuple(((i + 1,), cls(c)) for i, c in enumerate(classes)))

    @property
    def r(self):
        return len(self.ks)

    @property
    def alpha(self):
        return tuple(k + 1 for k in self.ks)

    @property
    def size(self):
        return sum(k + 1 for k in self.ks)

    def is_pullback(self):
        return all(len(m) == 1 for m, _ in self.groups)

    def group_of(self, i):
        for g in self.groups:
            if i in g[0]:
                return g
        raise KeyError(i)

    def classes(self):
        """Per-marking classes (pullback monomials only)."""
        if not self.is_pullback():
            raise ValueError("class has diagonal groups")
        return [c for _, c in self.groups]

    def canonical(self) -> "DescendentMonomial":
        sig = []
        for m, c in self.groups:
            sig.append((len(m), tuple(sorted(self.ks[i - 1] for i in m)), c))
        sig.sort()
        ks, groups, nxt = [], [], 1
        for _, kk, c in sig:
            marks = tuple(range(nxt, nxt + len(kk)))
            ks.extend(kk)
            groups.append((marks, c))
            nxt += len(kk)
        return DescendentMonomial(tuple(ks), tuple(groups))

    def relabel(self, mapping) -> "DescendentMonomial":
        """mapping: old marking -> new marking (a bijection onto 1..r)."""
        ks = [0] * self.r
        for old, new in mapping.items():
            ks[new - 1] = self.ks[old - 1]
        return DescendentMonomial(tuple(ks), tuple((tuple(mapping[i] for i in m), c)
                                                   for m, c in self.groups))

    def restrict(self, markings) -> "DescendentMonomial":
        """Sub-monomial on a union of whole groups, relabeled in order."""
        markings = sorted(markings)
        mapping = {old: new for new, old in enumerate(markings, 1)}
        gs = []
        for m, c in self.groups:
            inside = [i in mapping for i in m]
            if any(inside) and not all(inside):
                raise ValueError("restriction splits a diagonal group")
            if all(inside):
                gs.append((tuple(mapping[i] for i in m), c))
        return DescendentMonomial(tuple(self.ks[i - 1] for i in markings), tuple(gs))

    def map_classes(self, fn) -> "DescendentMonomial":
        return DescendentMonomial(self.ks, tuple((m, fn(c)) for m, c in self.groups))

    def __str__(self):
        return fmt_monomial(self)


def concat(*monos) -> DescendentMonomial:
    ks, groups, off = [], [], 0
    for m in monos:
        ks.extend(m.ks)
        groups.extend((tuple(i + off for i in g), c) for g, c in m.groups)
        off += m.r
    return DescendentMonomial(tuple(ks), tuple(groups))


EMPTY = DescendentMonomial((), ())


def fmt_monomial(m: DescendentMonomial) -> str:
    if m.r == 0:
        return "1"
    first = {g[0]: c for g, c in m.groups}
    toks = [f"tau{k}({fmt_cls(first.get(i, ()))})" for i, k in enumerate(m.ks, 1)]
    diags = [f"Drel({','.join(map(str, g))})" for g, _ in m.groups if len(g) > 1]
    out = " ".join(toks)
    if diags:
        out += " * " + " ".join(diags)
    return out


_TAU = re.compile(r"tau(\d+)\(")


def read_monomial(sc: Scanner, bag=False):
    """Read a monomial; with bag=True also collect non-tau atoms and return (monomial, atoms)."""
    ks, classes, diags, extra = [], [], [], []
    sc.ws()
    start = sc.pos
    if sc.peek("1") and not _TAU.match(sc.text, sc.pos):
        sc.pos += 1
        sc.ws()
        mono = EMPTY
        if bag:
            while True:
                sc.ws()
                a = sc.try_match(BAG_ATOM)
                if a is None:
                    break
                extra.append(a)
            return mono, tuple(extra)
        return mono
    while True:
        sc.ws()
        m = _TAU.match(sc.text, sc.pos)
        if m:
            sc.pos = m.end()
            ks.append(int(m.group(1)))
            classes.append(read_cls(sc))
            sc.expect(")")
            continue
        if bag:
            a = sc.try_match(BAG_ATOM)
            if a is not None:
                extra.append(a)
                continue
        break
    if not ks and not extra:
        sc.error("expected a monomial")
    sc.ws()
    if sc.accept("*"):
        sc.ws()
        while sc.accept("Drel("):
            idx = [sc.integer()]
            while sc.accept(","):
                idx.append(sc.integer())
            sc.expect(")")
            diags.append(idx)
            sc.ws()
        if not diags:
            sc.error("expected Drel(...) after '*'")
    mono = _assemble(ks, classes, diags, sc, start)
    return (mono, tuple(extra)) if bag else mono


BAG_ATOM = re.compile(r"(?!tau\d)[A-Za-z_][A-Za-z0-9_]*(?:\[[^\]\s]*\])?(?:\([^()\s|]*\))?")


def _assemble(ks, classes, diags, sc, start):
    r = len(ks)
    parent = list(range(r + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for d in diags:
        if len(d) < 2 or len(set(d)) != len(d) or any(not 1 <= i <= r for i in d):
            raise ParseError("bad diagonal marking list", sc.text, start)
        roots = {find(i) for i in d}
        if len(roots) != len(d):
            raise ParseError("repeated diagonal factor", sc.text, start)
        for i in d[1:]:
            parent[find(i)] = find(d[0])
    comps = {}
    for i in range(1, r + 1):
        comps.setdefault(find(i), []).append(i)
    groups = []
    for marks in comps.values():
        groups.append((tuple(marks), cls(*[classes[i - 1] for i in marks])))
    return DescendentMonomial(tuple(ks), tuple(groups))


def parse_monomial(text: str) -> DescendentMonomial:
    sc = Scanner(text)
    m = read_monomial(sc)
    sc.finish()
    return m


# --- formal sums ------------------------------------------------------------------------

@dataclass(frozen=True)
class DescSum:
    """Formal sum of canonical monomials with z-Laurent-polynomial coefficients."""
    terms: tuple  # sorted ((monomial, LaurentSeries), ...)
    context: str = "absolute"

    @staticmethod
    def build(mapping, context="absolute"):
        items = [(m, c) for m, c in mapping.items() if not c.is_zero()]
        items.sort(key=lambda mc: sort_key(mc[0]))
        return DescSum(tuple(items), context)

    @staticmethod
    def of(mono, coeff=None, context="absolute"):
        return DescSum.build({mono.canonical(): coeff if coeff is not None else Z1}, context)

    def as_dict(self):
        return dict(self.terms)

    def __add__(self, other):
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d[m] + c if m in d else c
        return DescSum.build(d, self.context)

    def scale(self, c):
        return DescSum.build({m: v * c for m, v in self.terms}, self.context)

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DescSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __str__(self):
        return fmt_sum(self)


def sort_key(m: DescendentMonomial):
    return (-m.size, m.r, m.ks, tuple((g, c) for g, c in m.groups))


def fmt_sum(s: DescSum) -> str:
    if not s.terms:
        return "0"
    return " + ".join(f"[{fmt_series(c)}] {fmt_monomial(m)}" for m, c in s.terms)


def parse_sum(text: str, context="absolute") -> DescSum:
    sc = Scanner(text)
    sc.ws()
    if sc.accept("0") and sc.at_end():
        return DescSum((), context)
    sc.pos = 0
    d = {}
    while True:
        sc.ws()
        sc.expect("[")
        inner_start = sc.pos
        body = sc.until("]", "coefficient")
        sc.expect("]")
        try:
            coeff = read_series(Scanner(body), "z")
        except ParseError as exc:
            raise ParseError(exc.message, sc.text, inner_start + exc.pos) from None
        mono = read_monomial(sc).canonical()
        d[mono] = d[mono] + coeff if mono in d else coeff
        sc.ws()
        if sc.at_end():
            break
        sc.expect("+")
    return DescSum.build(d, context)


# --- K-matrix ---------------------------------------------------------------------------------

def fmt_part(a):
    return ",".join(map(str, a))


@dataclass
class KMatrix:
    """Symbolic correspondence matrix; user values override the free atoms.

    An entry is a list of (z-coefficient, class atoms) terms; [] means zero.
    """
    values: dict = field(default_factory=dict)

    def entry(self, alpha, alpha_t, context="absolute"):
        alpha = tuple(sorted(alpha, reverse=True))
        alpha_t = tuple(sorted(alpha_t, reverse=True))
        n, m = sum(alpha), sum(alpha_t)
        if n < m:
            return []
        if n == m:
            if alpha == alpha_t and len(alpha) == 1:
                return [(zpow(len(alpha) - n), ())]
            return []
        if (alpha, alpha_t) in self.values:
            return list(self.values[(alpha, alpha_t)])
        return [(Z1, (atom_name(alpha, alpha_t, context),))]


def atom_name(alpha, alpha_t, context="absolute"):
    head = "Klog" if context == "log" else "K"
    return f"{head}[{fmt_part(alpha)};{fmt_part(alpha_t)}]"


def euler_atom(context):
    return "c3log" if context == "log" else "c3"


SHIPPED = KMatrix()


def kmatrix_entry(K: KMatrix, alpha, alpha_t, context="absolute"):
    return K.entry(alpha, alpha_t, context)


# --- transformations ----------------------------------------------------------------------------

def _candidates(alpha_T, K, context):
    """(alpha_tilde, entry terms) with nonzero entry for the block partition alpha_T."""
    out = []
    for alpha_t in combinat.partitions_upto(sum(alpha_T)):
        e = K.entry(alpha_T, alpha_t, context)
        if e:
            out.append((alpha_t, e))
    return out


def transform(m: DescendentMonomial, K: KMatrix = SHIPPED, context="absolute") -> DescSum:
    """Set-partition transform of a monomial with per-marking pullback classes."""
    if not m.is_pullback():
        raise ValueError("transform expects pullback classes; use transform_general")
    if m.r == 0:
        return DescSum.of(EMPTY, context=context)
    gammas = m.classes()
    alpha = m.alpha
    acc = {}
    for P in combinat.set_partitions(m.r):
        per_block = []
        for T in P.blocks:
            aT = tuple(sorted((alpha[i - 1] for i in T), reverse=True))
            gT = cls(*[gammas[i - 1] for i in T])
            opts = []
            for alpha_t, entry in _candidates(aT, K, context):
                for coeff, atoms in entry:
                    opts.append((alpha_t, coeff, cls(atoms, gT)))
            per_block.append(opts)
        for choice in product(*per_block):
            ks, groups, coeff = [], [], Z1
            for alpha_t, c, klass in choice:
                start = len(ks) + 1
                ks.extend(a - 1 for a in alpha_t)
                groups.append((tuple(range(start, len(ks) + 1)), klass))
                coeff = coeff * c
            mono = DescendentMonomial(tuple(ks), tuple(groups)).canonical()
            assert mono.size <= m.size
            acc[mono] = acc[mono] + coeff if mono in acc else coeff
    return DescSum.build(acc, context)


def transform_general(m: DescendentMonomial, K: KMatrix = SHIPPED, context="absolute",
                      excess="raise") -> DescSum:
    """Transform of a monomial whose class is in normal form (diagonal groups allowed).

    excess="raise" rejects repeated diagonal factors; excess="euler" replaces each
    independent repetition by the top Chern class atom of the log tangent bundle.
    """
    if excess not in ("raise", "euler"):
        raise ValueError("excess must be 'raise' or 'euler'")
    if m.r == 0:
        return DescSum.of(EMPTY, context=context)
    alpha = m.alpha
    acc = {}
    for P in combinat.set_partitions(m.r):
        per_block = []
        for T in P.blocks:
            aT = tuple(sorted((alpha[i - 1] for i in T), reverse=True))
            opts = []
            for alpha_t, entry in _candidates(aT, K, context):
                for coeff, atoms in entry:
                    opts.append((alpha_t, coeff, tuple(atoms)))
            per_block.append(opts)
        for choice in product(*per_block):
            mono, coeff = _gamma(m, P, choice, context, excess)
            assert mono.size <= m.size
            acc[mono] = acc[mono] + coeff if mono in acc else coeff
    return DescSum.build(acc, context)


def _gamma(m, P, choice, context, excess):
    """Merge blocks with fresh markings, cup in K entries, push forward the old markings."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    edges = []  # (vertex list, class)
    for i in range(1, m.r + 1):
        parent[("o", i)] = ("o", i)
    for g, c in m.groups:
        edges.append(([("o", i) for i in g], c))
    new_ks = []
    coeff = Z1
    for b, (T, (alpha_t, c, atoms)) in enumerate(zip(P.blocks, choice)):
        verts = [("o", i) for i in T]
        for j, a in enumerate(alpha_t):
            v = ("n", len(new_ks))
            parent[v] = v
            new_ks.append(a - 1)
            verts.append(v)
        edges.append((verts, atoms))
        coeff = coeff * c
    for verts, _ in edges:
        for v in verts[1:]:
            union(verts[0], v)
    comps = {}
    for v in parent:
        comps.setdefault(find(v), {"verts": [], "edges": []})["verts"].append(v)
    for verts, c in edges:
        comps[find(verts[0])]["edges"].append((verts, c))
    groups = []
    for comp in comps.values():
        excess_n = sum(len(v) - 1 for v, _ in comp["edges"]) - (len(comp["verts"]) - 1)
        atoms = [c for _, c in comp["edges"]]
        if excess_n:
            if excess == "raise":
                raise ExcessIntersectionError({v[1] if v[0] == "o" else f"new{v[1]}"
                                               for v in comp["verts"]}, excess_n)
            atoms.extend([(euler_atom(context),)] * excess_n)
        new = sorted(v[1] + 1 for v in comp["verts"] if v[0] == "n")
        groups.append((tuple(new), cls(*atoms)))
    return DescendentMonomial(tuple(new_ks), tuple(groups)).canonical(), coeff


def transform_sum(s: DescSum, K: KMatrix = SHIPPED, context=None, excess="raise") -> DescSum:
    context = context or s.context
    out = DescSum((), context)
    for mono, c in s.terms:
        out = out + transform_general(mono, K, context, excess).scale(c)
    return out


def invert(expr: DescSum, K: KMatrix = SHIPPED, context=None) -> DescSum:
    """Solve transform(X) = expr by induction on |alpha|, peeling off the largest terms."""
    context = context or expr.context
    rest = expr.as_dict()
    solution = {}
    while rest:
        rest = {m: c for m, c in rest.items() if not c.is_zero()}
        if not rest:
            break
        pivot = min(rest, key=sort_key)
        c = rest[pivot]
        t = transform_general(pivot, K, context, excess="euler")
        lead = t.as_dict().get(pivot)
        expected = zpow(pivot.r - pivot.size)
        if lead is None or lead != expected:
            raise LeadingTermError(f"leading coefficient of {pivot} is {lead}, not a unit")
        factor = c * zpow(pivot.size - pivot.r)
        solution[pivot] = solution[pivot] + factor if pivot in solution else factor
        for mono, v in t.terms:
            delta = v * factor
            rest[mono] = rest[mono] - delta if mono in rest else -delta
        if pivot in rest and not rest[pivot].is_zero():
            raise LeadingTermError("pivot did not cancel")
        rest.pop(pivot, None)
    return DescSum.build(solution, context)


def higher_expand(a_vectors, classes) -> DescendentMonomial:
    """One diagonal group per tuple, carrying the matching class."""
    if len(a_vectors) != len(classes):
        raise ValueError("one class per tuple")
    ks, groups = [], []
    for a, c in zip(a_vectors, classes):
        a = tuple(a)
        if not a:
            raise ValueError("tuples must be nonempty")
        start = len(ks) + 1
        ks.extend(a)
        groups.append((tuple(range(start, len(ks) + 1)), cls(c) if isinstance(c, str) else tuple(c)))
    return DescendentMonomial(tuple(ks), tuple(groups))


def leading_term_ok(m: DescendentMonomial, out: DescSum) -> bool:
    """transform(m) minus its leading term only involves strictly smaller sizes."""
    lead = m.canonical()
    for mono, c in out.terms:
        if mono == lead:
            if c != zpow(m.r - m.size):
                return False
        elif mono.size >= m.size:
            return False
    return lead in out.as_dict()
