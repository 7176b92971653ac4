"""Laurent series and rational functions in p or z over Q(t)[eps]/(eps^2)."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import sympy

from .parsing import ParseError, Scanner, fmt_frac

T = sympy.Symbol("t")


class TDependenceError(ValueError):
    """Raised where a t-free coefficient field is required."""


class TruncationError(ValueError):
    pass


# --- coefficient field Q(t) ----------------------------------------------------

def qt(x):
    """Normalize a Q(t) element: Fraction when constant, canceled sympy expression otherwise."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    x = sympy.cancel(sympy.sympify(x))
    if x.is_Rational:
        return Fraction(int(x.p), int(x.q))
    if x.free_symbols - {T}:
        raise ValueError(f"unexpected symbols in coefficient {x}")
    return x


def depends_on_t(x):
    return not isinstance(x, Fraction)


def fmt_qt(x):
    if isinstance(x, Fraction):
        return fmt_frac(x)
    return "{" + str(x).replace(" ", "") + "}"


@dataclass(frozen=True)
class EpsScalar:
    std: object = Fraction(0)
    eps: object = Fraction(0)

    @staticmethod
    def of(x):
        if isinstance(x, EpsScalar):
            return x
        return EpsScalar(qt(x), Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "std", qt(self.std))
        object.__setattr__(self, "eps", qt(self.eps))

    def __add__(self, o):
        o = EpsScalar.of(o)
        return EpsScalar(self.std + o.std, self.eps + o.eps)

    __radd__ = __add__

    def __neg__(self):
        return EpsScalar(-self.std, -self.eps)

    def __sub__(self, o):
        return self + (-EpsScalar.of(o))

    def __rsub__(self, o):
        return EpsScalar.of(o) - self

    def __mul__(self, o):
        o = EpsScalar.of(o)
        return EpsScalar(self.std * o.std, self.std * o.eps + self.eps * o.std)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = EpsScalar.of(o)
        if o.std == 0:
            raise ZeroDivisionError("standard part of divisor is zero")
        return EpsScalar(self.std / o.std, (self.eps * o.std - self.std * o.eps) / (o.std * o.std))

    def __bool__(self):
        return self.std != 0 or self.eps != 0

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = EpsScalar.of(o)
        if not isinstance(o, EpsScalar):
            return NotImplemented
        return sympy.simplify(self.std - o.std) == 0 and sympy.simplify(self.eps - o.eps) == 0 \
            if (depends_on_t(self.std) or depends_on_t(self.eps)
                or depends_on_t(o.std) or depends_on_t(o.eps)) \
            else (self.std == o.std and self.eps == o.eps)

    def __hash__(self):
        return hash((str(self.std), str(self.eps)))

    def is_rational(self):
        return not depends_on_t(self.std) and not depends_on_t(self.eps)

    def __str__(self):
        return fmt_eps(self)


ZERO = EpsScalar()
ONE = EpsScalar(Fraction(1))
EPS = EpsScalar(Fraction(0), Fraction(1))


def fmt_eps(c: EpsScalar) -> str:
    if c.eps == 0:
        return fmt_qt(c.std)
    e = fmt_qt(c.eps)
    if c.std == 0:
        return f"{e}e"
    sign = "" if e.startswith("-") else "+"
    return f"({fmt_qt(c.std)}{sign}{e}e)"


_QT = re.compile(r"-?\d+(?:/\d+)?")


def read_qt(sc: Scanner):
    if sc.accept("{"):
        start = sc.pos
        body = sc.until("}", "expression")
        sc.expect("}")
        try:
            return qt(sympy.sympify(body, locals={"t": T}))
        except (sympy.SympifyError, TypeError, ValueError):
            raise ParseError(f"bad t-expression {body!r}", sc.text, start) from None
    return Fraction(sc.match(_QT, "rational"))


def read_eps(sc: Scanner) -> EpsScalar:
    """Parse a coefficient: q, qe, or (q+qe)."""
    if sc.accept("("):
        std = read_qt(sc)
        sc.accept("+")
        eps = read_qt(sc)
        sc.expect("e")
        sc.expect(")")
        return EpsScalar(std, eps)
    v = read_qt(sc)
    if sc.accept("e"):
        return EpsScalar(Fraction(0), v)
    return EpsScalar(v)


def parse_eps(text: str) -> EpsScalar:
    sc = Scanner(text)
    v = read_eps(sc)
    sc.finish()
    return v


# --- Laurent series ---------------------------------------------------------------

@dataclass(frozen=True)
class LaurentSeries:
    """Coefficients known for every exponent <= trunc (all exponents when trunc is None).

    Exponents below `low` are zero.
    """
    var: str
    terms: tuple  # sorted ((exp, EpsScalar), ...), nonzero only
    trunc: object = None
    low: object = None

    @staticmethod
    def make(var, mapping, trunc=None, low=None):
        if var not in ("p", "z"):
            raise ValueError("variable must be p or z")
        items = []
        for e, c in mapping.items():
            c = EpsScalar.of(c)
            if c and (trunc is None or e <= trunc):
                items.append((int(e), c))
        items.sort()
        if low is None:
            low = items[0][0] if items else (0 if trunc is None else min(0, trunc))
        if items and items[0][0] < low:
            raise ValueError("nonzero coefficient below the lowest exponent")
        return LaurentSeries(var, tuple(items), trunc, low)

    @staticmethod
    def monomial(var, exp=0, coeff=1):
        return LaurentSeries.make(var, {exp: coeff})

    @staticmethod
    def zero(var):
        return LaurentSeries.make(var, {})

    def as_dict(self):
        return dict(self.terms)

    def coeff(self, e):
        if self.trunc is not None and e > self.trunc:
            raise TruncationError(f"coefficient of {self.var}^{e} beyond truncation {self.trunc}")
        return self.as_dict().get(e, ZERO)

    @property
    def exact(self):
        return self.trunc is None

    @property
    def valuation(self):
        return self.terms[0][0] if self.terms else None

    def is_zero(self):
        return not self.terms

    def _joint(self, other):
        if other.var != self.var:
            raise ValueError("series in different variables")

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.make(self.var, {0: other})
        self._joint(other)
        trunc = _min_trunc(self.trunc, other.trunc)
        d = self.as_dict()
        for e, c in other.terms:
            d[e] = d.get(e, ZERO) + c
        return LaurentSeries.make(self.var, d, trunc, min(self.low, other.low))

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.var, tuple((e, -c) for e, c in self.terms), self.trunc, self.low)

    def __sub__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.make(self.var, {0: other})
        return self + (-other)

    def scale(self, c):
        c = EpsScalar.of(c)
        return LaurentSeries.make(self.var, {e: c * v for e, v in self.terms}, self.trunc, self.low)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return self.scale(other)
        self._joint(other)
        la = self.low
        lb = other.low
        cands = []
        if self.trunc is not None:
            cands.append(self.trunc + lb)
        if other.trunc is not None:
            cands.append(other.trunc + la)
        trunc = min(cands) if cands else None
        d = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if trunc is not None and e > trunc:
                    continue
                d[e] = d.get(e, ZERO) + c1 * c2
        return LaurentSeries.make(self.var, d, trunc, la + lb)

    __rmul__ = __mul__

    def shift(self, k):
        return LaurentSeries.make(self.var, {e + k: c for e, c in self.terms},
                                  None if self.trunc is None else self.trunc + k, self.low + k)

    def truncate(self, order):
        if self.trunc is not None and order > self.trunc:
            raise TruncationError("cannot extend a truncated series")
        return LaurentSeries.make(self.var, dict(self.terms), order, min(self.low, order))

    def substitute_power(self, k: int):
        """var -> var^k for k >= 1."""
        if k < 1:
            raise ValueError("k must be positive")
        trunc = None if self.trunc is None else k * (self.trunc + 1) - 1
        return LaurentSeries.make(self.var, {k * e: c for e, c in self.terms}, trunc, k * self.low)

    def scale_variable(self, k):
        """var -> k*var."""
        k = Fraction(k)
        return LaurentSeries.make(self.var, {e: c * (k ** e) for e, c in self.terms},
                                  self.trunc, self.low)

    def inverse(self, order):
        """1/self known through var^order."""
        if not self.terms:
            raise ZeroDivisionError("inverse of zero series")
        v, c0 = self.terms[0]
        if c0.std == 0:
            raise ZeroDivisionError("leading coefficient has zero standard part")
        need = order + v  # coefficients of the unit part up to degree order + v
        if self.trunc is not None and self.trunc - v < need:
            raise TruncationError("not enough known coefficients to invert")
        unit = {e - v: c for e, c in self.terms}
        inv = [ONE / c0]
        for n in range(1, need + 1):
            s = ZERO
            for i in range(1, n + 1):
                ci = unit.get(i)
                if ci:
                    s = s + ci * inv[n - i]
            inv.append(-(s / c0))
        return LaurentSeries.make(self.var, {i - v: c for i, c in enumerate(inv)}, order, -v)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.var, self.terms, self.trunc) == (other.var, other.terms, other.trunc)

    def __hash__(self):
        return hash((self.var, self.terms, self.trunc))

    def agrees(self, other, order=None):
        """Coefficientwise equality through `order` (default: joint truncation)."""
        self._joint(other)
        t = _min_trunc(self.trunc, other.trunc)
        if order is not None:
            t = order if t is None else min(t, order)
        a, b = self.as_dict(), other.as_dict()
        keys = {e for e in set(a) | set(b) if t is None or e <= t}
        return all(a.get(e, ZERO) == b.get(e, ZERO) for e in keys)

    def __str__(self):
        return fmt_series(self)


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def fmt_series(s: LaurentSeries) -> str:
    out = []
    for e, c in s.terms:
        mono = "" if e == 0 else (s.var if e == 1 else f"{s.var}^{e}")
        txt = fmt_eps(c)
        if not mono:
            piece = txt
        elif txt == "1":
            piece = mono
        elif txt == "-1":
            piece = "-" + mono
        else:
            piece = f"{txt}*{mono}"
        if out and piece.startswith("-") and not piece.startswith("-{"):
            out.append(" - " + piece[1:])
        elif out:
            out.append(" + " + piece)
        else:
            out.append(piece)
    body = "".join(out) if out else "0"
    if s.trunc is not None:
        body += f" + O({s.var}^{s.trunc + 1})"
    return body


def parse_series(text: str, var: str = None) -> LaurentSeries:
    sc = Scanner(text)
    s = read_series(sc, var)
    sc.finish()
    return s


def read_series(sc: Scanner, var=None) -> LaurentSeries:
    terms, trunc = {}, None
    first = True
    while True:
        sc.ws()
        neg = False
        if not first:
            if sc.accept("+"):
                pass
            elif sc.accept("-"):
                neg = True
            else:
                break
            sc.ws()
        elif sc.peek("-") and not _starts_number(sc, 1):
            sc.pos += 1
            neg = True
        if sc.accept("O("):
            v = sc.match(re.compile(r"[pz]"), "variable")
            var = var or v
            if v != var:
                sc.error("mixed variables")
            if sc.accept("^"):
                trunc = sc.integer() - 1
            else:
                trunc = 0
            sc.expect(")")
            first = False
            continue
        if sc.peek("p") or sc.peek("z"):
            coeff = ONE
        else:
            coeff = read_eps(sc)
            if not sc.accept("*"):
                if neg:
                    coeff = -coeff
                terms[0] = terms.get(0, ZERO) + coeff
                first = False
                continue
        v = sc.match(re.compile(r"[pz]"), "variable")
        var = var or v
        if v != var:
            sc.error("mixed variables")
        e = 1
        if sc.accept("^"):
            e = sc.integer()
        if neg:
            coeff = -coeff
        terms[e] = terms.get(e, ZERO) + coeff
        first = False
    if var is None:
        var = "p"
    return LaurentSeries.make(var, terms, trunc)


def _starts_number(sc, offset):
    i = sc.pos + offset
    return i < len(sc.text) and sc.text[i].isdigit()


# --- polynomials over Q (coefficient lists, ascending) -----------------------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_add(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_divmod(a, b):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        c = r[-1] / b[-1]
        k = len(r) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r = _trim(r)
    return _trim(q), r


def poly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    return [x / a[-1] for x in a]


def poly_eval_series(poly, var, order, shift=0):
    """sum_i poly[i] e^{(i+shift) z} through z^order."""
    d = {}
    for i, c in enumerate(poly):
        if c == 0:
            continue
        m = i + shift
        for k in range(order + 1):
            d[k] = d.get(k, Fraction(0)) + c * Fraction(m ** k, factorial(k))
    return LaurentSeries.make(var, d, order, 0)


# --- rational functions ---------------------------------------------------------------

@dataclass(frozen=True)
class RationalFunction:
    """p^shift * num(p)/den(p) with num(0) != 0 (unless zero), den(0) = 1, gcd(num, den) = 1."""
    num: tuple
    den: tuple
    shift: int = 0

    @staticmethod
    def make(num, den=(1,), shift=0):
        num = _trim(Fraction(x) for x in num)
        den = _trim(Fraction(x) for x in den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return RationalFunction((), (Fraction(1),), 0)
        while num and num[0] == 0:
            num.pop(0)
            shift += 1
        while den[0] == 0:
            den.pop(0)
            shift -= 1
        g = poly_gcd(num, den)
        if len(g) > 1:
            num = poly_divmod(num, g)[0]
            den = poly_divmod(den, g)[0]
        c = den[0]
        num = [x / c for x in num]
        den = [x / c for x in den]
        return RationalFunction(tuple(num), tuple(den), shift)

    @staticmethod
    def from_sympy(expr, p=None):
        p = p or sympy.Symbol("p")
        n, d = sympy.fraction(sympy.cancel(sympy.together(sympy.sympify(expr))))
        shift = 0
        pn = sympy.Poly(n, p)
        pd = sympy.Poly(d, p)
        num = [Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q))
               for c in reversed(pn.all_coeffs())]
        den = [Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q))
               for c in reversed(pd.all_coeffs())]
        return RationalFunction.make(num, den, shift)

    def to_sympy(self, p=None):
        p = p or sympy.Symbol("p")
        n = sum(sympy.Rational(c.numerator, c.denominator) * p ** i for i, c in enumerate(self.num))
        d = sum(sympy.Rational(c.numerator, c.denominator) * p ** i for i, c in enumerate(self.den))
        return p ** self.shift * n / d

    @property
    def num_degree(self):
        return len(self.num) - 1

    @property
    def den_degree(self):
        return len(self.den) - 1

    def is_zero(self):
        return not self.num

    def substitute_power(self, k):
        """p -> p^k."""
        def spread(poly):
            out = [Fraction(0)] * (k * (len(poly) - 1) + 1) if poly else []
            for i, c in enumerate(poly):
                out[k * i] = c
            return out
        return RationalFunction.make(spread(self.num), spread(self.den), k * self.shift)

    def __str__(self):
        return format_rational(self)


def expand(rf: RationalFunction, lo: int, hi: int) -> LaurentSeries:
    """Laurent expansion around p = 0 on the window [lo, hi]."""
    if hi < lo:
        raise ValueError("hi < lo")
    if rf.is_zero():
        return LaurentSeries.make("p", {}, hi, lo)
    if rf.shift < lo:
        raise ValueError(f"window starting at {lo} would drop the term p^{rf.shift}")
    n = hi - rf.shift
    coeffs = []
    for j in range(n + 1):
        s = rf.num[j] if j < len(rf.num) else Fraction(0)
        for i in range(1, min(j, len(rf.den) - 1) + 1):
            s -= rf.den[i] * coeffs[j - i]
        coeffs.append(s)
    # a Laurent polynomial seen in full is known exactly
    exact = rf.den == (1,) and hi >= rf.shift + len(rf.num) - 1
    return LaurentSeries.make("p", {rf.shift + j: c for j, c in enumerate(coeffs)},
                              None if exact else hi, lo)


UNDETERMINED = "undetermined"


def berlekamp_massey(seq):
    """Shortest linear recurrence over Q: returns (connection polynomial C with C[0]=1, L)."""
    C = [Fraction(1)]
    B = [Fraction(1)]
    L, m, b = 0, 1, Fraction(1)
    for n in range(len(seq)):
        d = seq[n]
        for i in range(1, L + 1):
            if i < len(C):
                d += C[i] * seq[n - i]
        if d == 0:
            m += 1
            continue
        coef = d / b
        T_ = list(C)
        shifted = [Fraction(0)] * m + [coef * x for x in B]
        C = [(C[i] if i < len(C) else 0) - (shifted[i] if i < len(shifted) else 0)
             for i in range(max(len(C), len(shifted)))]
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T_, d, 1
        else:
            m += 1
    C = _trim(C)
    return C, L


def detect_rational(s: LaurentSeries, max_deg: int):
    """Rational function with num/den degree <= max_deg reproducing every known coefficient."""
    if s.var != "p":
        raise ValueError("detect_rational expects a series in p")
    if any(c.eps != 0 for _, c in s.terms):
        raise ValueError("epsilon parts present: split standard and epsilon parts first")
    if any(depends_on_t(c.std) for _, c in s.terms):
        raise TDependenceError("t-dependent coefficients: joint reconstruction in (p,t) is out of scope")
    lo = s.low
    hi = s.trunc
    if hi is None:
        hi = (s.terms[-1][0] if s.terms else lo) + 2 * max_deg + 1
    count = hi - lo + 1
    if count < 2 * max_deg + 1:
        raise TruncationError(f"need at least {2 * max_deg + 1} known coefficients, have {count}")
    d = s.as_dict()
    seq = [d[e].std if e in d else Fraction(0) for e in range(lo, hi + 1)]
    if all(x == 0 for x in seq):
        return RationalFunction.make([], [1])
    C, L = berlekamp_massey(seq)
    if 2 * L >= count:
        return UNDETERMINED
    num = poly_mul(seq[:L], C)[:L]
    rf = RationalFunction.make(num, C, lo)
    if rf.num_degree > max_deg or rf.den_degree > max_deg:
        return UNDETERMINED
    check = expand(rf, min(lo, rf.shift), hi)
    if not check.agrees(s):
        return UNDETERMINED
    return rf


def p_to_z(s, order: int) -> LaurentSeries:
    """Substitute p = e^z, keeping coefficients through z^order."""
    if isinstance(s, RationalFunction):
        return _rf_to_z(s, order)
    if s.var != "p":
        raise ValueError("p_to_z expects a series in p")
    if s.trunc is not None:
        raise TruncationError("a truncated p-series does not determine any z-coefficient")
    d = {}
    for m, c in s.terms:
        for k in range(order + 1):
            d[k] = d.get(k, ZERO) + c * Fraction(m ** k, factorial(k))
    return LaurentSeries.make("z", d, order, min(0, order))


def _rf_to_z(rf: RationalFunction, order: int) -> LaurentSeries:
    if rf.is_zero():
        return LaurentSeries.make("z", {}, order)
    extra = 2 * rf.den_degree + 2
    work = order + extra
    num = poly_eval_series(list(rf.num), "z", work, rf.shift)
    den = poly_eval_series(list(rf.den), "z", work)
    v = den.valuation
    if v is None:
        raise ZeroDivisionError("denominator vanishes identically after p = e^z")
    q = num * den.inverse(order)
    return q.truncate(order)


def format_rational(rf: RationalFunction) -> str:
    if rf.is_zero():
        return "0"
    p = sympy.Symbol("p")
    n = sum(sympy.Rational(c.numerator, c.denominator) * p ** i for i, c in enumerate(rf.num))
    d = sum(sympy.Rational(c.numerator, c.denominator) * p ** i for i, c in enumerate(rf.den))
    cn, fn = sympy.factor_list(n, p)
    cd, fd = sympy.factor_list(d, p)
    const = sympy.Rational(cn) / sympy.Rational(cd)
    num_f, const = _normalize_factors(fn, const, p)
    den_f, c2 = _normalize_factors(fd, sympy.Integer(1), p)
    const = const / c2
    if rf.shift > 0:
        num_f.insert(0, ("p", rf.shift, True))
    elif rf.shift < 0:
        den_f.insert(0, ("p", -rf.shift, True))
    num_txt = _join_factors(num_f)
    den_txt = _join_factors(den_f)
    sign = "-" if const < 0 else ""
    const = abs(const)
    if const != 1:
        num_txt = f"{const}*{num_txt}" if num_txt else str(const)
    if not num_txt:
        num_txt = "1"
    out = sign + num_txt
    if den_txt:
        out += "/" + (den_txt if len(den_f) == 1 else f"({den_txt})")
    return out


def _normalize_factors(factors, const, p):
    out = []
    for f, mult in factors:
        poly = sympy.Poly(f, p)
        coeffs = list(reversed(poly.all_coeffs()))
        if coeffs[0] == 0:
            lead = coeffs[-1]
        else:
            lead = coeffs[0]
        if lead < 0:
            coeffs = [-c for c in coeffs]
            const = const * (-1) ** mult
        out.append((_poly_text(coeffs), mult, len([c for c in coeffs if c != 0]) == 1))
    out.sort(key=lambda x: (len(x[0]), x[0]))
    return out, const


def _poly_text(coeffs):
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if i == 0 else ("p" if i == 1 else f"p^{i}")
        a = abs(c)
        body = str(a) if not mono else (mono if a == 1 else f"{a}*{mono}")
        if parts:
            parts.append(("-" if c < 0 else "+") + body)
        else:
            parts.append(("-" if c < 0 else "") + body)
    return "".join(parts)


def _join_factors(factors):
    out = []
    for text, mult, mono in factors:
        base = text if mono else f"({text})"
        if mono and mult > 1 and not text.isalnum():
            base = f"({text})"
        out.append(base if mult == 1 else f"{base}^{mult}")
    return "*".join(out)


def parse_rational(text: str) -> RationalFunction:
    p = sympy.Symbol("p")
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"p": p})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ParseError(f"cannot parse rational function: {exc}", text, 0) from None
    if expr.free_symbols - {p}:
        raise ParseError("rational function may only involve p", text, 0)
    return RationalFunction.from_sympy(expr, p)


# --- series files ------------------------------------------------------------------------

def _fmt_file_entry(x):
    if isinstance(x, Fraction):
        return fmt_frac(x)
    n, d = sympy.fraction(sympy.cancel(x))
    return f"{str(sympy.expand(n)).replace(' ', '')}|{str(sympy.expand(d)).replace(' ', '')}"


def _parse_file_entry(tok, lineno):
    try:
        if "|" in tok:
            a, b = tok.split("|", 1)
            return qt(sympy.sympify(a, locals={"t": T}) / sympy.sympify(b, locals={"t": T}))
        return Fraction(tok)
    except (ValueError, ZeroDivisionError, sympy.SympifyError) as exc:
        raise ParseError(f"line {lineno}: bad entry {tok!r} ({exc})", tok, 0) from None


def write_series_file(s: LaurentSeries) -> str:
    lines = [f"var={s.var}", f"trunc={'exact' if s.trunc is None else s.trunc}"]
    if s.low is not None:
        lines.append(f"low={s.low}")
    for e, c in s.terms:
        lines.append(f"{e} {_fmt_file_entry(c.std)} {_fmt_file_entry(c.eps)}")
    return "\n".join(lines) + "\n"


def read_series_file(text: str) -> LaurentSeries:
    var, trunc, low = None, None, None
    terms = {}
    seen_trunc = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("var="):
            var = line[4:].strip()
            if var not in ("p", "z"):
                raise ParseError(f"line {lineno}: var must be p or z", raw, 4)
            continue
        if line.startswith("trunc="):
            v = line[6:].strip()
            trunc = None if v == "exact" else int(v)
            seen_trunc = True
            continue
        if line.startswith("low="):
            low = int(line[4:].strip())
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"line {lineno}: expected 'exponent std [eps]'", raw, 0)
        e = int(parts[0])
        std = _parse_file_entry(parts[1], lineno)
        eps = _parse_file_entry(parts[2], lineno) if len(parts) == 3 else Fraction(0)
        terms[e] = terms.get(e, ZERO) + EpsScalar(std, eps)
    if var is None or not seen_trunc:
        raise ParseError("missing var= or trunc= header", text, 0)
    if low is None and trunc is not None:
        low = min(terms) if terms else trunc
    return LaurentSeries.make(var, terms, trunc, low)
