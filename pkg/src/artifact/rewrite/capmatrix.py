"""Shape of the relative cap matrix Z(lambda | tau[mu]) in degree (0, d).

Rows and columns are weighted partitions of d; column nu stands for the insertion
tau[nu^vee].  Entries forced to vanish by dimension counting are 0, the surviving
leading entries are evaluated, everything else stays an unknown symbol.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod

import sympy

from .. import combinat
from ..algebra import pair, preset
from ..fock import weighted_partitions


def leading_entry(lam) -> Fraction:
    """|Aut(lam)| * prod 1/lam_i! * (delta_i, delta_i^vee)."""
    alg = lam.alg
    dual = alg.dual_basis()
    val = Fraction(combinat.aut_order(lam))
    for k, i in lam.pairs:
        val *= Fraction(pair(alg.basis(i), dual[i]), factorial(k))
    return val


def entry(lam, nu):
    if combinat.cap_rank(lam) < combinat.cap_rank(nu):
        return sympy.Integer(0)
    if combinat.cap_rank(lam) == combinat.cap_rank(nu):
        if lam != nu:
            return sympy.Integer(0)
        v = leading_entry(lam)
        return sympy.Rational(v.numerator, v.denominator)
    return sympy.Symbol(f"M[{lam};{nu}]")


@dataclass
class CapReport:
    d: int
    labels: list
    matrix: object
    block_triangular: bool
    blocks_diagonal: bool
    diagonal: list
    det_ratio: object

    @property
    def ok(self):
        r = self.det_ratio
        return (self.block_triangular and self.blocks_diagonal
                and all(x != 0 for x in self.diagonal)
                and r.is_number and r != 0)


def cap_matrix(d, alg_name="toy"):
    alg = preset(alg_name)
    labels = sorted(weighted_partitions(d, alg), key=lambda p: (combinat.cap_rank(p), p.pairs))
    M = sympy.Matrix(len(labels), len(labels), lambda i, j: entry(labels[i], labels[j]))
    return labels, M


def check_cap_matrix(d, alg_name="toy") -> CapReport:
    labels, M = cap_matrix(d, alg_name)
    n = len(labels)
    rank = [combinat.cap_rank(p) for p in labels]
    tri = all(M[i, j] == 0 for i in range(n) for j in range(n) if rank[i] < rank[j])
    diag_blocks = all(M[i, j] == 0 for i in range(n) for j in range(n)
                      if rank[i] == rank[j] and i != j)
    diagonal = [M[i, i] for i in range(n)]
    det = sympy.expand(M.det(method="berkowitz"))
    ratio = sympy.simplify(det / prod(diagonal)) if all(x != 0 for x in diagonal) else sympy.nan
    return CapReport(d, labels, M, tri, diag_blocks, diagonal, ratio)
