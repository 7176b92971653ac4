"""Graded Frobenius algebras standing in for the even cohomology of a surface."""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

TOP_DEGREE = 4
PRESET_DIR = Path(__file__).parent / "presets"
PRESET_ENV = "GWPT_PRESET_PATH"


class AlgebraError(ValueError):
    pass


class PresetError(AlgebraError):
    pass


def _frac(text):
    return Fraction(text.strip())


@dataclass(frozen=True, eq=False)
class FrobeniusAlgebra:
    name: str
    names: tuple
    degrees: tuple
    pairing: tuple  # tuple of row tuples
    cup_table: dict  # (i, j) -> tuple of coefficients
    unit_index: int

    def __hash__(self):
        return hash((self.name, self.names))

    def __eq__(self, other):
        if not isinstance(other, FrobeniusAlgebra):
            return NotImplemented
        return (self.name, self.names, self.degrees, self.pairing) == (
            other.name, other.names, other.degrees, other.pairing) and \
            self.cup_table == other.cup_table

    @property
    def dim(self):
        return len(self.names)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise AlgebraError(f"unknown basis element {name!r} in {self.name}") from None

    def basis(self, i):
        if isinstance(i, str):
            i = self.index(i)
        coeffs = [Fraction(0)] * self.dim
        coeffs[i] = Fraction(1)
        return GradedClass(self, tuple(coeffs))

    def element(self, spec):
        """Build a class from {name: coeff} or a basis name."""
        if isinstance(spec, str):
            return self.basis(spec)
        coeffs = [Fraction(0)] * self.dim
        for name, c in spec.items():
            coeffs[self.index(name)] += Fraction(c)
        return GradedClass(self, tuple(coeffs))

    def zero(self):
        return GradedClass(self, (Fraction(0),) * self.dim)

    def unit(self):
        return self.basis(self.unit_index)

    def gram_inverse(self):
        return invert_matrix(self.pairing)

    def dual_basis(self):
        """phi_i^vee such that pair(phi_i, phi_j^vee) = delta_ij."""
        inv = self.gram_inverse()
        n = self.dim
        return [GradedClass(self, tuple(inv[j][i] for j in range(n))) for i in range(n)]

    def dual_label(self, i):
        """Name of the basis element equal to phi_i^vee, or None if it is a combination."""
        dual = self.dual_basis()[i]
        nz = [j for j, c in enumerate(dual.coeffs) if c != 0]
        if len(nz) == 1 and dual.coeffs[nz[0]] == 1:
            return self.names[nz[0]]
        return None


@dataclass(frozen=True)
class GradedClass:
    alg: FrobeniusAlgebra
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.alg.dim:
            raise AlgebraError("coefficient vector length differs from basis size")

    def _check(self, other):
        if not isinstance(other, GradedClass) or other.alg != self.alg:
            raise AlgebraError("classes live in different algebras")

    def __add__(self, other):
        self._check(other)
        return GradedClass(self.alg, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return GradedClass(self.alg, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return GradedClass(self.alg, tuple(-a for a in self.coeffs))

    def scale(self, c):
        return GradedClass(self.alg, tuple(c * a for a in self.coeffs))

    __rmul__ = scale

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def support(self):
        return [(i, c) for i, c in enumerate(self.coeffs) if c != 0]

    @property
    def degree(self):
        degs = {self.alg.degrees[i] for i, _ in self.support()}
        if len(degs) == 1:
            return degs.pop()
        return None if not degs else "mixed"

    def __str__(self):
        parts = []
        for i, c in self.support():
            name = self.alg.names[i]
            parts.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(parts) if parts else "0"


def cup(a: GradedClass, b: GradedClass) -> GradedClass:
    a._check(b)
    alg = a.alg
    out = [Fraction(0)] * alg.dim
    for i, ca in a.support():
        for j, cb in b.support():
            for k, c in enumerate(alg.cup_table.get((i, j), ())):
                if c:
                    out[k] += ca * cb * c
    return GradedClass(alg, tuple(out))


def pair(a: GradedClass, b: GradedClass):
    a._check(b)
    g = a.alg.pairing
    return sum((ca * cb * g[i][j] for i, ca in a.support() for j, cb in b.support()),
               Fraction(0))


def kunneth_diagonal(alg: FrobeniusAlgebra):
    """Pairs (phi_i, phi_i^vee) with sum_i phi_i x phi_i^vee the diagonal class."""
    dual = alg.dual_basis()
    return [(alg.basis(i), dual[i]) for i in range(alg.dim)]


def invert_matrix(rows):
    n = len(rows)
    m = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise AlgebraError("degenerate pairing")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(r[n:]) for r in m)


def determinant(rows):
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


@dataclass
class Violation:
    identity: str
    witness: tuple
    detail: str = ""

    def __str__(self):
        return f"{self.identity} at {self.witness}: {self.detail}"


@dataclass
class ValidationReport:
    algebra: str
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def validate(alg: FrobeniusAlgebra) -> ValidationReport:
    rep = ValidationReport(alg.name)
    names = alg.names
    n = alg.dim
    e = [alg.basis(i) for i in range(n)]
    if determinant(alg.pairing) == 0:
        rep.violations.append(Violation("nondegeneracy", (), "Gram determinant is 0"))
    for i, j in product(range(n), repeat=2):
        g = alg.pairing[i][j]
        if g != alg.pairing[j][i]:
            rep.violations.append(Violation("symmetry", (names[i], names[j])))
        if g != 0 and alg.degrees[i] + alg.degrees[j] != TOP_DEGREE:
            rep.violations.append(Violation("pairing grading", (names[i], names[j]), str(g)))
    u = e[alg.unit_index]
    for i in range(n):
        if cup(u, e[i]) != e[i] or cup(e[i], u) != e[i]:
            rep.violations.append(Violation("unit", (names[i],)))
    for i, j in product(range(n), repeat=2):
        ab = cup(e[i], e[j])
        if ab != cup(e[j], e[i]):
            rep.violations.append(Violation("commutativity", (names[i], names[j])))
        for k, c in ab.support():
            if alg.degrees[k] != alg.degrees[i] + alg.degrees[j]:
                rep.violations.append(Violation("cup grading", (names[i], names[j]), names[k]))
    for i, j, k in product(range(n), repeat=3):
        if cup(cup(e[i], e[j]), e[k]) != cup(e[i], cup(e[j], e[k])):
            rep.violations.append(Violation("associativity", (names[i], names[j], names[k])))
        if pair(cup(e[i], e[j]), e[k]) != pair(e[i], cup(e[j], e[k])):
            rep.violations.append(Violation("frobenius", (names[i], names[j], names[k])))
    return rep


# --- preset files -----------------------------------------------------------

_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*([A-Za-z_][\w]*)")


def _parse_combination(text, index, dim, lineno):
    out = [Fraction(0)] * dim
    text = text.strip()
    if text == "0":
        return tuple(out)
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or (pos > 0 and not m.group(1)):
            raise PresetError(f"line {lineno}: cannot parse combination {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(3) not in index:
            raise PresetError(f"line {lineno}: unknown generator {m.group(3)!r}")
        out[index[m.group(3)]] += sign * coeff
        pos = m.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return tuple(out)


def parse_preset(text: str, name: str = "custom") -> FrobeniusAlgebra:
    section = None
    basis, pairing_entries, cup_entries = [], {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("name "):
            name = line.split(None, 1)[1].strip()
            continue
        if line in ("basis", "pairing", "cup"):
            section = line
            continue
        if section == "basis":
            parts = line.split()
            if len(parts) != 2:
                raise PresetError(f"line {lineno}: expected 'name degree'")
            deg = int(parts[1])
            if deg % 2:
                raise PresetError(f"line {lineno}: odd degree {deg} (only even cohomology)")
            if deg < 0 or deg > TOP_DEGREE:
                raise PresetError(f"line {lineno}: degree {deg} out of range")
            basis.append((parts[0], deg))
        elif section == "pairing":
            parts = line.split()
            if len(parts) != 3:
                raise PresetError(f"line {lineno}: expected 'a b value'")
            a, b, v = parts[0], parts[1], _frac(parts[2])
            for key in ((a, b), (b, a)):
                if key in pairing_entries and pairing_entries[key] != v:
                    raise PresetError(f"line {lineno}: non-symmetric pairing entry {a} {b}")
            pairing_entries[(a, b)] = v
            pairing_entries[(b, a)] = v
        elif section == "cup":
            if "->" not in line:
                raise PresetError(f"line {lineno}: expected 'a b -> combination'")
            lhs, rhs = line.split("->", 1)
            ab = lhs.split()
            if len(ab) != 2:
                raise PresetError(f"line {lineno}: expected two factors")
            cup_entries[tuple(ab)] = (rhs, lineno, True)
            cup_entries.setdefault((ab[1], ab[0]), (rhs, lineno, False))
        else:
            raise PresetError(f"line {lineno}: content outside a section")
    names = tuple(b for b, _ in basis)
    if len(set(names)) != len(names):
        raise PresetError("duplicate basis names")
    index = {b: i for i, b in enumerate(names)}
    units = [i for i, (_, d) in enumerate(basis) if d == 0]
    if len(units) != 1:
        raise PresetError("missing unit: need exactly one degree-0 generator")
    unit = units[0]
    n = len(names)
    for a, b in pairing_entries:
        if a not in index or b not in index:
            raise PresetError(f"unknown generator in pairing entry {a} {b}")
    gram = tuple(tuple(pairing_entries.get((a, b), Fraction(0)) for b in names) for a in names)
    table = {}
    for i in range(n):
        e = tuple(Fraction(int(k == i)) for k in range(n))
        table[(unit, i)] = e
        table[(i, unit)] = e
    explicit = {k for k, v in cup_entries.items() if v[2]}
    for key, (rhs, lineno, _) in cup_entries.items():
        if key[0] not in index or key[1] not in index:
            raise PresetError(f"line {lineno}: unknown generator in {key}")
        ij = (index[key[0]], index[key[1]])
        if unit in ij and key not in explicit:
            continue
        table[ij] = _parse_combination(rhs, index, n, lineno)
    return FrobeniusAlgebra(name, names, tuple(d for _, d in basis), gram, table, unit)


def preset_dirs():
    dirs = []
    env = os.environ.get(PRESET_ENV)
    if env:
        dirs.extend(Path(p) for p in env.split(os.pathsep) if p)
    dirs.append(PRESET_DIR)
    return dirs


def load_preset(name: str) -> FrobeniusAlgebra:
    for d in preset_dirs():
        path = d / f"{name}.alg"
        if path.is_file():
            return parse_preset(path.read_text(), name)
    raise PresetError(f"no preset named {name!r}")


def preset_names():
    found = set()
    for d in preset_dirs():
        if d.is_dir():
            found.update(p.stem for p in d.glob("*.alg"))
    return sorted(found)


_cache = {}


def preset(name: str) -> FrobeniusAlgebra:
    if name not in _cache:
        _cache[name] = load_preset(name)
    return _cache[name]
