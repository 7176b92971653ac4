"""Bracket terms, formal expressions and their text grammar.

    term := 'Z' '[' theory ',' mode (';std')? ']' '{' geom '}' '_' '(' class ')'
            '(' relins (' | ' relins)* ' || ' monomial ')' ('(p^k)' | '(kz)')?

An expression is a sum of `[coefficient] factor * factor ...` terms; index symbols that
appear in placeholder names (j1, nu3, ...) are implicitly summed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace

from ..algebra import preset
from ..descend import (BAG_ATOM, EMPTY, DescendentMonomial, Z0, Z1, fmt_cls,
                       read_monomial)
from ..fock import FockState, read_state, render_state
from ..parsing import ParseError, Scanner
from ..series import EpsScalar, LaurentSeries, fmt_series, read_series
from .geometry import Geometry, GeometryError, read_geometry

THEORIES = ("GW", "PT")
MODES = ("vir", "red", "full")

SYMBOL = re.compile(r"(?!q\d)[A-Za-z_][A-Za-z0-9_]*(?:\[[^\]\s]*\])?")
ATOM = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\[(?:[^\[\]\s]|\[[^\[\]\s]*\])*\])?(?:\([^()\s]*\))?")


class BracketError(ValueError):
    pass


@dataclass(frozen=True)
class Bracket:
    theory: str
    mode: str
    geom: Geometry
    cls: tuple
    relins: tuple
    mono: DescendentMonomial = EMPTY
    bag: tuple = ()
    std: bool = False
    arg: int = 1

    def __post_init__(self):
        if self.theory not in THEORIES:
            raise BracketError(f"theory must be GW or PT, not {self.theory!r}")
        if self.mode not in MODES:
            raise BracketError(f"mode must be vir, red or full, not {self.mode!r}")
        if len(self.cls) != len(self.geom.gens) + (1 if self.geom.fibered else 0):
            raise BracketError("curve class does not fit the geometry lattice")
        if len(self.relins) != self.geom.n_div:
            raise BracketError(f"{self.geom} needs {self.geom.n_div} relative insertions, "
                               f"got {len(self.relins)}")
        sizes = self.geom.div_sizes(self.cls)
        for ins, n in zip(self.relins, sizes):
            if isinstance(ins, FockState):
                if ins.size is not None and ins.size != n:
                    raise BracketError(f"relative insertion of size {ins.size} on a divisor "
                                       f"meeting the class {n} times")
            elif not isinstance(ins, str):
                raise BracketError("relative insertions are Fock states or symbols")
        if self.arg < 1:
            raise BracketError("argument scaling must be positive")
        object.__setattr__(self, "mono", self.mono.canonical())
        object.__setattr__(self, "bag", tuple(sorted(self.bag)))

    @property
    def measure(self):
        return (self.geom.genus, self.geom.n_div)

    @property
    def r(self):
        return self.mono.r

    def with_(self, **kw):
        return replace(self, **kw)

    def __str__(self):
        return fmt_bracket(self)


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


def fmt_relins(ins) -> str:
    if isinstance(ins, str):
        return ins
    return render_state(ins).replace(" |0>", "|0>")


def fmt_bracket(b: Bracket) -> str:
    head = f"Z[{b.theory},{b.mode}{';std' if b.std else ''}]"
    body = " | ".join(fmt_relins(x) for x in b.relins)
    mono = fmt_inner(b.mono, b.bag)
    inner = f"{body} || {mono}" if body else f"|| {mono}"
    out = f"{head}{{{b.geom}}}_({b.geom.fmt_class(b.cls)})({inner})"
    if b.arg != 1:
        out += f"(p^{b.arg})" if b.theory == "PT" else f"({b.arg}z)"
    return out


def fmt_inner(mono, bag) -> str:
    if mono.r == 0 and not bag:
        return "1"
    first = {g[0]: c for g, c in mono.groups}
    toks = [f"tau{k}({fmt_cls(first.get(i, ()))})" for i, k in enumerate(mono.ks, 1)]
    toks.extend(bag)
    out = " ".join(toks)
    diags = [f"Drel({','.join(map(str, g))})" for g, _ in mono.groups if len(g) > 1]
    if diags:
        out += " * " + " ".join(diags)
    return out


def read_bracket(sc: Scanner) -> Bracket:
    start = sc.pos
    sc.ws()
    sc.expect("Z[")
    tpos = sc.pos
    theory = sc.match(re.compile(r"[A-Za-z]+"), "theory")
    if theory not in THEORIES:
        sc.error(f"unknown theory {theory!r} (expected GW or PT)", tpos)
    sc.expect(",")
    mpos = sc.pos
    mode = sc.match(re.compile(r"[A-Za-z]+"), "mode")
    if mode not in MODES:
        sc.error(f"unknown mode {mode!r} (expected vir, red or full)", mpos)
    std = sc.accept(";std")
    sc.expect("]")
    sc.expect("{")
    geom = read_geometry(sc)
    sc.expect("}")
    sc.expect("_(")
    cls = geom.read_class(sc)
    sc.ws()
    sc.expect(")")
    sc.expect("(")
    alg = None
    relins = []
    sc.ws()
    if not sc.peek("||"):
        while True:
            sc.ws()
            if SYMBOL.match(sc.text, sc.pos):
                relins.append(sc.match(SYMBOL, "symbol"))
            else:
                if alg is None:
                    alg = preset(geom.alg_name)
                relins.append(read_state(sc, alg))
            sc.ws()
            if sc.peek("||"):
                break
            sc.expect("|")
    sc.expect("||")
    mono, bag = read_monomial(sc, bag=True)
    sc.ws()
    sc.expect(")")
    arg = 1
    m = re.compile(r"\(p\^(\d+)\)|\((\d+)z\)").match(sc.text, sc.pos)
    if m:
        sc.pos = m.end()
        arg = int(m.group(1) or m.group(2))
        if (theory == "PT") != (m.group(1) is not None):
            sc.error("argument scaling does not match the theory variable", m.start())
    try:
        return Bracket(theory, mode, geom, cls, tuple(relins), mono, bag, std, arg)
    except (BracketError, GeometryError, ValueError) as exc:
        raise ParseError(str(exc), sc.text, start) from None


def parse_bracket(text: str) -> Bracket:
    sc = Scanner(text)
    b = read_bracket(sc)
    sc.finish()
    return b


# --- expressions --------------------------------------------------------------------

def const(c) -> LaurentSeries:
    return LaurentSeries.make("z", {0: EpsScalar.of(c) if not isinstance(c, EpsScalar) else c})


def factor_key(f):
    return (0 if isinstance(f, Bracket) else 1, str(f))


@dataclass(frozen=True)
class Expression:
    """Formal sum of products of brackets and opaque atoms, canonically ordered."""
    terms: tuple  # ((factors tuple, LaurentSeries coeff), ...)

    @staticmethod
    def build(items):
        acc = {}
        for factors, c in items:
            key = tuple(sorted(factors, key=factor_key))
            acc[key] = acc[key] + c if key in acc else c
        clean = [(k, v) for k, v in acc.items() if not v.is_zero()]
        clean.sort(key=lambda kv: [factor_key(f) for f in kv[0]])
        return Expression(tuple(clean))

    @staticmethod
    def of(*factors, coeff=None):
        return Expression.build([(tuple(factors), coeff if coeff is not None else Z1)])

    @staticmethod
    def zero():
        return Expression(())

    def __add__(self, other):
        return Expression.build(list(self.terms) + list(other.terms))

    def scale(self, c):
        if not isinstance(c, LaurentSeries):
            c = const(c)
        return Expression.build([(f, v * c) for f, v in self.terms])

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        return Expression.build([(f + g, a * b) for f, a in self.terms for g, b in other.terms])

    def is_zero(self):
        return not self.terms

    def brackets(self):
        for factors, _ in self.terms:
            for f in factors:
                if isinstance(f, Bracket):
                    yield f

    def factor_at(self, path):
        t, f = path
        return self.terms[t][0][f]

    def replace_at(self, path, expr: "Expression") -> "Expression":
        """Substitute expr for the factor at (term, factor), distributing over the sum."""
        t, f = path
        items = []
        for i, (factors, c) in enumerate(self.terms):
            if i != t:
                items.append((factors, c))
                continue
            rest = factors[:f] + factors[f + 1:]
            for g, d in expr.terms:
                items.append((rest + g, c * d))
        return Expression.build(items)

    def __eq__(self, other):
        if not isinstance(other, Expression):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __str__(self):
        return fmt_expr(self)


def fmt_expr(e: Expression) -> str:
    if not e.terms:
        return "0"
    out = []
    for factors, c in e.terms:
        body = " * ".join(str(f) for f in factors) if factors else "1"
        out.append(f"[{fmt_series(c)}] {body}")
    return " + ".join(out)


def read_factor(sc: Scanner):
    sc.ws()
    if sc.peek("Z["):
        return read_bracket(sc)
    return Atom(sc.match(ATOM, "bracket or atom"))


def parse_expr(text: str) -> Expression:
    sc = Scanner(text)
    sc.ws()
    if sc.peek("0") and Scanner(text, sc.pos + 1).at_end():
        return Expression.zero()
    items = []
    while True:
        sc.ws()
        sc.expect("[")
        inner = sc.pos
        body = sc.until("]", "coefficient")
        sc.expect("]")
        try:
            coeff = read_series(Scanner(body), "z")
            if coeff.var != "z":
                raise ParseError("coefficients are series in z", body, 0)
        except ParseError as exc:
            raise ParseError(exc.message, text, inner + exc.pos) from None
        sc.ws()
        factors = []
        if sc.peek("1") and not sc.peek("1/"):
            sc.pos += 1
        else:
            factors.append(read_factor(sc))
            while True:
                sc.ws()
                if not sc.accept("*"):
                    break
                factors.append(read_factor(sc))
        items.append((tuple(factors), coeff))
        sc.ws()
        if sc.at_end():
            break
        sc.expect("+")
    return Expression.build(items)


__all__ = ["Bracket", "Atom", "Expression", "BracketError", "parse_bracket", "read_bracket",
           "fmt_bracket", "parse_expr", "fmt_expr", "const", "Z0", "Z1", "BAG_ATOM"]
