"""Integer and set partitions, automorphism orders, and the cap-matrix ordering."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import factorial, prod


def integer_partitions(n: int) -> list:
    """All partitions of n, parts weakly decreasing, in reverse-lexicographic order."""
    if n <= 0:
        raise ValueError("n must be positive")
    out = []

    def rec(rest, largest, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for k in range(min(rest, largest), 0, -1):
            acc.append(k)
            rec(rest - k, k, acc)
            acc.pop()

    rec(n, n, [])
    return out


def partitions_upto(n: int) -> list:
    """Partitions of 1..n concatenated, smallest size first."""
    return [p for m in range(1, n + 1) for p in integer_partitions(m)]


@dataclass(frozen=True)
class SetPartition:
    blocks: tuple  # tuple of sorted tuples, ordered by least element

    def __post_init__(self):
        seen = [i for b in self.blocks for i in b]
        if any(not b for b in self.blocks):
            raise ValueError("empty block")
        if len(seen) != len(set(seen)):
            raise ValueError("blocks overlap")
        if sorted(seen) != list(range(1, len(seen) + 1)):
            raise ValueError("blocks must cover 1..r")
        canon = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", canon)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


def set_partitions(r: int) -> list:
    """All set partitions of {1..r} via restricted growth strings."""
    if r <= 0:
        raise ValueError("r must be positive")
    out = []

    def rec(i, blocks):
        if i > r:
            out.append(SetPartition(tuple(tuple(b) for b in blocks)))
            return
        for b in blocks:
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()

    rec(1, [])
    return out


def set_partitions_of(items) -> list:
    """Set partitions of an arbitrary ordered collection, as tuples of tuples."""
    items = list(items)
    if not items:
        return [()]
    return [tuple(tuple(items[i - 1] for i in b) for b in sp.blocks)
            for sp in set_partitions(len(items))]


def _pairs(lam):
    """Accept a weighted partition object, a list of (part, weight) pairs or bare parts."""
    pairs = getattr(lam, "pairs", lam)
    out = []
    for x in pairs:
        out.append(tuple(x) if isinstance(x, tuple) else (x, None))
    return out


def aut_order(lam) -> int:
    return prod(factorial(m) for m in Counter(_pairs(lam)).values())


def length(lam) -> int:
    return len(_pairs(lam))


def length_plus(lam) -> int:
    return sum(1 for part, _ in _pairs(lam) if part > 1)


def size(lam) -> int:
    return sum(part for part, _ in _pairs(lam))


LESS, GREATER, EQUAL_RANK = -1, 1, 0


def cap_rank(lam):
    """Sort key realizing the cap-matrix order: smaller key means smaller element."""
    return (length(lam), -length_plus(lam))


def cap_order_cmp(lam, mu) -> int:
    """-1 if lam < mu, 1 if lam > mu, 0 when the two have equal rank."""
    if size(lam) != size(mu):
        raise ValueError("cap order compares partitions of equal size only")
    a, b = cap_rank(lam), cap_rank(mu)
    return LESS if a < b else GREATER if a > b else EQUAL_RANK
