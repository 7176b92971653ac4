"""Random well-formed brackets and expressions for round-trip and audit runs."""
from __future__ import annotations

from fractions import Fraction

from ..algebra import preset
from ..combinat import set_partitions
from ..descend import DescendentMonomial, cls
from ..fock import FockState, weighted_partitions
from ..series import EpsScalar, LaurentSeries
from .geometry import KINDS, Geometry
from .terms import Atom, Bracket, Expression

CLASS_ATOMS = ["p", "F", "B", "w", "H", "D0", "c3", "K[2,1;1]", "Klog[1,1;2]", "DX1[j2]"]
BAG_ATOMS = ["tau[mu1]", "tau[mv3]", "PsiD0", "S0[t]", "Inv(t-PsiD0)"]
SYMBOLS = ["lam", "H[nu1]", "Hv[nu2]", "DD1[j4]"]
FACTOR_ATOMS = ["Minv[mu1;{(1,p)}]", "M[lam;nu]", "Minv[mu2;H[nu1]]", "V[phi1]"]


def _frac(rng):
    return Fraction(rng.randint(-5, 5) or 1, rng.choice([1, 1, 2, 3, 4]))


def random_state(rng, alg, n):
    if n == 0:
        return FockState.build(alg, {(): Fraction(1)}, 0)
    wps = weighted_partitions(n, alg)
    picks = rng.sample(wps, min(len(wps), rng.randint(1, 2)))
    return FockState.build(alg, {w.pairs: _frac(rng) for w in picks}, n)


def random_geometry(rng):
    kind = rng.choice(sorted(KINDS))
    if kind != "K3xC":
        return Geometry(kind)
    return Geometry.of("K3xC", g=rng.randint(0, 3), N=rng.randint(0, 3),
                       alg=rng.choice(["K3-truncation", "toy"]), phi=rng.randint(1, 3),
                       prim=rng.randint(0, 1))


def random_class(rng, geom):
    if geom.kind == "K3xC":
        return (rng.randint(-2, 3), rng.randint(-2, 3), rng.randint(0, 3))
    if geom.kind in ("P3", "P3/P2"):
        return (rng.randint(0, 3),)
    d = rng.randint(0, 3)
    return (rng.randint(0, d), d)


def random_monomial(rng, r_max=3):
    r = rng.randint(0, r_max)
    if r == 0:
        return DescendentMonomial((), ())
    ks = tuple(rng.randint(0, 4) for _ in range(r))
    P = rng.choice(set_partitions(r))
    groups = tuple((tuple(T), cls(*rng.sample(CLASS_ATOMS, rng.randint(0, 2))))
                   for T in P.blocks)
    return DescendentMonomial(ks, groups)


def random_bracket(rng) -> Bracket:
    geom = random_geometry(rng)
    c = random_class(rng, geom)
    alg = preset(geom.alg_name)
    relins = []
    for n in geom.div_sizes(c):
        relins.append(rng.choice(SYMBOLS) if rng.random() < 0.25 else random_state(rng, alg, n))
    bag = tuple(rng.sample(BAG_ATOMS, rng.choice([0, 0, 1, 2])))
    return Bracket(rng.choice(["GW", "PT"]), rng.choice(["vir", "red", "full"]), geom, c,
                   tuple(relins), random_monomial(rng), bag, rng.random() < 0.2,
                   rng.choice([1, 1, 1, 2, 3]))


def random_coeff(rng):
    d = {}
    for _ in range(rng.randint(1, 3)):
        d[rng.randint(-2, 3)] = EpsScalar(_frac(rng), _frac(rng) if rng.random() < 0.3 else 0)
    trunc = rng.choice([None, None, 4])
    return LaurentSeries.make("z", d, trunc)


def random_expression(rng, terms=3) -> Expression:
    items = []
    for _ in range(rng.randint(1, terms)):
        factors = [random_bracket(rng) for _ in range(rng.randint(0, 2))]
        factors += [Atom(a) for a in rng.sample(FACTOR_ATOMS, rng.randint(0, 2))]
        items.append((tuple(factors), random_coeff(rng)))
    return Expression.build(items)


def random_reducible(rng, g_max=3, N_max=3, d_max=3) -> Bracket:
    """Bracket over K3 x C with fiber-supported insertions, (g, N) != (0, 0)."""
    while True:
        g, N = rng.randint(0, g_max), rng.randint(0, N_max)
        if (g, N) != (0, 0):
            break
    geom = Geometry.of("K3xC", g=g, N=N)
    d = rng.randint(1, d_max)
    c = (rng.randint(0, 2), rng.randint(0, 2), d)
    alg = preset(geom.alg_name)
    relins = tuple(random_state(rng, alg, d) for _ in range(N))
    r = rng.randint(0, 2)
    ks = tuple(rng.randint(0, 3) for _ in range(r))
    groups = tuple(((i,), cls("w", rng.choice(["1", "p", "F", "B"]))) for i in range(1, r + 1))
    return Bracket(rng.choice(["GW", "PT"]), rng.choice(["vir", "red"]), geom, c, relins,
                   DescendentMonomial(ks, groups))
