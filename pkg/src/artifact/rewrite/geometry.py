"""Target geometries: curve-class lattices, d_beta, divisor intersections."""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from ..parsing import ParseError, Scanner


class GeometryError(ValueError):
    pass


# kind -> (lattice generators, carries a fiber degree, default params)
KINDS = {
    "K3xC": (("B", "F"), True, (("g", 0), ("N", 1), ("alg", "K3-truncation"), ("phi", 1), ("prim", 0))),
    "P3": (("H",), False, ()),
    "P3/P2": (("H",), False, ()),
    "PN": (("h",), True, ()),
    "PN0": (("h",), True, ()),
    "PN~": (("h",), True, ()),
}

_KIND = re.compile(r"K3xC|P3/P2|P3|PN~|PN0|PN")
_PARAM = re.compile(r"[A-Za-z]+")
_VALUE = re.compile(r"[A-Za-z0-9_.\-]+")


@dataclass(frozen=True)
class Geometry:
    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GeometryError(f"unknown geometry {self.kind!r}")
        defaults = dict(KINDS[self.kind][2])
        given = dict(self.params)
        for k in given:
            if k not in defaults:
                raise GeometryError(f"geometry {self.kind} has no parameter {k!r}")
        merged = {**defaults, **given}
        for k in ("g", "N", "phi", "prim"):
            if k in merged:
                merged[k] = int(merged[k])
                if merged[k] < (1 if k == "phi" else 0):
                    raise GeometryError(f"bad value for {k}")
        object.__setattr__(self, "params", tuple((k, merged[k]) for k, _ in KINDS[self.kind][2]))

    @staticmethod
    def of(kind, **params):
        return Geometry(kind, tuple(params.items()))

    def get(self, key):
        return dict(self.params)[key]

    def with_params(self, **changes):
        return Geometry(self.kind, tuple({**dict(self.params), **changes}.items()))

    @property
    def gens(self):
        return KINDS[self.kind][0]

    @property
    def fibered(self):
        return KINDS[self.kind][1]

    @property
    def rubber(self):
        return self.kind.endswith("~")

    @property
    def genus(self):
        return self.get("g") if self.kind == "K3xC" else 0

    @property
    def n_div(self):
        if self.kind == "K3xC":
            return self.get("N")
        return {"P3": 0, "P3/P2": 1, "PN": 2, "PN~": 2, "PN0": 1}[self.kind]

    @property
    def alg_name(self):
        if self.kind == "K3xC":
            return self.get("alg")
        return "P2"

    @property
    def context(self):
        return "log" if self.n_div else "absolute"

    def d_beta(self, c):
        if self.kind == "K3xC":
            return c[-1] * (2 - 2 * self.get("g"))
        if self.kind in ("P3", "P3/P2"):
            return 4 * c[0]
        a, d = c
        return 2 * d + 2 * a

    def div_sizes(self, c):
        """D.beta for each relative divisor component, in insertion order."""
        if self.kind == "K3xC":
            return [c[-1]] * self.get("N")
        if self.kind == "P3":
            return []
        if self.kind == "P3/P2":
            return [c[0]]
        a, d = c
        return [d - a] if self.kind == "PN0" else [d - a, d]

    def __str__(self):
        defaults = dict(KINDS[self.kind][2])
        shown = [f"{k}={v}" for k, v in self.params if defaults[k] != v]
        return self.kind + (f"[{','.join(shown)}]" if shown else "")

    # --- curve classes ----------------------------------------------------------

    def fmt_class(self, c) -> str:
        lat = c[:-1] if self.fibered else c
        parts = []
        for n, g in zip(lat, self.gens):
            if n == 0:
                continue
            mag = "" if abs(n) == 1 else str(abs(n))
            sign = "-" if n < 0 else ("+" if parts else "")
            parts.append(f"{sign}{mag}{g}")
        body = "".join(parts) or "0"
        return f"{body},{c[-1]}" if self.fibered else body

    def read_class(self, sc: Scanner):
        sc.ws()
        lat = [0] * len(self.gens)
        if sc.accept("0"):
            pass
        else:
            first = True
            while True:
                sc.ws()
                sign = 1
                if sc.accept("-"):
                    sign = -1
                elif sc.accept("+"):
                    pass
                elif not first:
                    break
                sc.ws()
                m = sc.try_match(re.compile(r"\d+"))
                n = int(m) if m else 1
                for i, g in enumerate(self.gens):
                    if sc.accept(g):
                        lat[i] += sign * n
                        break
                else:
                    sc.error(f"expected a curve-class generator of {self.kind}")
                first = False
        if self.fibered:
            sc.ws()
            sc.expect(",")
            sc.ws()
            lat.append(sc.integer())
        return tuple(lat)

    def lattice(self, c):
        return c[:-1] if self.fibered else c


def read_geometry(sc: Scanner) -> Geometry:
    start = sc.pos
    kind = sc.match(_KIND, "geometry name")
    params = []
    if sc.accept("["):
        while True:
            k = sc.match(_PARAM, "parameter name")
            sc.expect("=")
            v = sc.match(_VALUE, "parameter value")
            params.append((k, v))
            if not sc.accept(","):
                break
        sc.expect("]")
    try:
        return Geometry(kind, tuple(params))
    except (GeometryError, ValueError) as exc:
        raise ParseError(str(exc), sc.text, start) from None


def parse_geometry(text: str) -> Geometry:
    sc = Scanner(text)
    g = read_geometry(sc)
    sc.finish()
    return g


def effective_splits(c):
    """All (c1, c2) with c1 + c2 = c and nonnegative lattice coefficients."""
    if any(n < 0 for n in c):
        raise GeometryError("class splitting needs nonnegative coefficients")
    out = []
    for c1 in product(*[range(n + 1) for n in c]):
        out.append((tuple(c1), tuple(n - m for n, m in zip(c, c1))))
    return out


def is_zero_class(geom: Geometry, c) -> bool:
    return all(n == 0 for n in geom.lattice(c))
