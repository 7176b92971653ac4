"""Exact bookkeeping of partition-function prefactors under gluing.

A prefactor is a signed Laurent monomial i^a z^b (or i^a p^(b/2) on the PT side),
stored as (a mod 4, b).
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod

from ..algebra import preset
from ..fock import WeightedPartition, diagonal_coefficient


@dataclass(frozen=True)
class Mono:
    ipow: int
    exp: int

    def __post_init__(self):
        object.__setattr__(self, "ipow", self.ipow % 4)

    def __mul__(self, o):
        return Mono(self.ipow + o.ipow, self.exp + o.exp)


def sign(k):
    return Mono(2 * k, 0)


def minus_i(k):
    return Mono(3 * k, 0)


def zpow(k):
    return Mono(0, k)


def gw_closed(d, g):
    """(-i)^d z^d (-1)^(g-1) z^(2g-2)."""
    return minus_i(d) * zpow(d) * sign(g - 1) * zpow(2 * g - 2)


def gw_relative(d, g, conds):
    """Closed prefactor times (-1)^(l-|mu|) z^(l-|mu|) for each relative condition (l, |mu|)."""
    out = gw_closed(d, g)
    for ell, size in conds:
        out = out * sign(ell - size) * zpow(ell - size)
    return out


def pt_weight(n, d):
    """i^(2m) p^m with m = n - d/2, stored with exponent 2m."""
    two_m = 2 * n - d
    return Mono(two_m, two_m)


@dataclass
class PrefactorReport:
    samples: int
    checks: Counter = field(default_factory=Counter)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.mismatches

    def record(self, kind, lhs, rhs, data):
        self.checks[kind] += 1
        if lhs != rhs:
            self.mismatches.append((kind, data, lhs, rhs))


def gw_degeneration(d1, d2, g1, g2, ell, size):
    d = d1 + d2 - 2 * size
    g = g1 + g2 + ell - 1
    lhs = gw_closed(d, g)
    rhs = gw_relative(d1, g1, [(ell, size)]) * gw_relative(d2, g2, [(ell, size)]) \
        * sign(ell - size)
    return lhs, rhs


def pt_degeneration(d1, d2, n1, n2, size):
    d = d1 + d2 - 2 * size
    n = n1 + n2 - size
    return pt_weight(n, d), pt_weight(n1, d1) * pt_weight(n2, d2)


def gw_splitting(d_rest, d_rub, d0, g1, g2, ell_mu, lam):
    """LHS bracket with condition lam vs rubber(Delta_1, lam) x bracket(Delta_2)."""
    d = d_rest + d_rub - 2 * d0
    g = g1 + g2 + ell_mu - 1
    lhs = gw_relative(d, g, [lam])
    rhs = gw_relative(d_rub, g1, [(ell_mu, d0), lam]) * gw_relative(d_rest, g2, [(ell_mu, d0)]) \
        * sign(ell_mu - d0)
    return lhs, rhs


def pt_splitting(d_rest, d_rub, d0, n1, n2):
    d = d_rest + d_rub - 2 * d0
    n = n1 + n2 - d0
    return pt_weight(n, d), pt_weight(n1, d_rub) * pt_weight(n2, d_rest)


def _aut(pairs):
    c = Counter(pairs)
    return prod(factorial(v) for v in c.values())


def _random_partition(rng, alg, n):
    pairs, left = [], n
    while left:
        k = rng.randint(1, left)
        pairs.append((k, rng.randrange(alg.dim)))
        left -= k
    return WeightedPartition(alg, tuple(pairs))


def check_prefactors(samples=1000, seed=0, alg_name="toy") -> PrefactorReport:
    rng = random.Random(seed)
    rep = PrefactorReport(samples)
    alg = preset(alg_name)
    for _ in range(samples):
        size = rng.randint(0, 6)
        ell = rng.randint(1, size) if size else 0
        d1, d2 = rng.randint(-6, 12), rng.randint(-6, 12)
        g1, g2 = rng.randint(-2, 5), rng.randint(-2, 5)
        n1, n2 = rng.randint(-6, 6), rng.randint(-6, 6)
        data = dict(d1=d1, d2=d2, g1=g1, g2=g2, ell=ell, size=size, n1=n1, n2=n2)
        rep.record("gw-degeneration", *gw_degeneration(d1, d2, g1, g2, ell, size), data)
        rep.record("pt-degeneration", *pt_degeneration(d1, d2, n1, n2, size), data)
        lam_size = rng.randint(0, 5)
        lam = (rng.randint(1, lam_size) if lam_size else 0, lam_size)
        rep.record("gw-splitting", *gw_splitting(d1, d2, size, g1, g2, ell, lam), data)
        rep.record("pt-splitting", *pt_splitting(d1, d2, size, n1, n2), data)
        if size:
            mu = _random_partition(rng, alg, size)
            ref = Fraction((-1 if (mu.length - mu.size) % 2 else 1) * prod(k for k, _ in mu.pairs),
                           _aut(mu.pairs))
            rep.record("diagonal-sign", ref, diagonal_coefficient(mu), str(mu))
    return rep
