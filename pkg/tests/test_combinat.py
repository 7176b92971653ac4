from itertools import permutations

import pytest
from hypothesis import given, strategies as st
from sympy.utilities.iterables import multiset_partitions, partitions

from artifact import combinat
from artifact.combinat import (EQUAL_RANK, GREATER, LESS, SetPartition, aut_order, cap_order_cmp,
                               integer_partitions, set_partitions, set_partitions_of)


def test_integer_partition_examples():
    assert integer_partitions(1) == [(1,)]
    assert len(integer_partitions(4)) == 5


@pytest.mark.parametrize("n", range(1, 11))
def test_integer_partitions_match_sympy(n):
    ours = sorted(integer_partitions(n))
    theirs = sorted(tuple(sorted((k for k, m in p.items() for _ in range(m)), reverse=True))
                    for p in partitions(n))
    assert ours == theirs


def test_integer_partitions_eight():
    assert len(integer_partitions(8)) == 22


def test_set_partition_counts():
    assert len(set_partitions(1)) == 1
    assert len(set_partitions(3)) == 5
    assert len(set_partitions(5)) == 52


@pytest.mark.parametrize("r", range(1, 7))
def test_set_partitions_match_sympy(r):
    ours = {sp.blocks for sp in set_partitions(r)}
    theirs = {tuple(sorted(tuple(sorted(b)) for b in p))
              for p in multiset_partitions(list(range(1, r + 1)))}
    assert ours == theirs
    assert len(ours) == len(set_partitions(r))


def test_set_partitions_of_items():
    assert set_partitions_of([]) == [()]
    assert sorted(set_partitions_of("ab")) == [(("a",), ("b",)), (("a", "b"),)]


def test_set_partition_validation():
    with pytest.raises(ValueError):
        SetPartition(((1, 2), (2,)))
    with pytest.raises(ValueError):
        SetPartition(((1, 3),))


def _aut_brute(pairs):
    n = len(pairs)
    return sum(1 for s in permutations(range(n)) if all(pairs[i] == pairs[s[i]] for i in range(n)))


def test_aut_order_examples():
    assert aut_order([(1, "g"), (1, "g")]) == 2
    assert aut_order([(2, "g"), (1, "g")]) == 1
    lam = [(1, "g"), (1, "g"), (1, "d"), (2, "g"), (2, "g")]
    assert aut_order(lam) == 4 == _aut_brute(lam)


@given(st.lists(st.tuples(st.integers(1, 3), st.sampled_from("ab")), max_size=6))
def test_aut_order_brute_force(pairs):
    assert aut_order(pairs) == _aut_brute(pairs)


def test_cap_order_examples():
    assert cap_order_cmp((2,), (1, 1)) == LESS
    assert cap_order_cmp((1, 1), (2,)) == GREATER
    assert cap_order_cmp((3, 1), (3, 1)) == EQUAL_RANK
    with pytest.raises(ValueError):
        cap_order_cmp((1,), (2,))


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.sampled_from(integer_partitions(n)),
                                                     st.sampled_from(integer_partitions(n)))))
def test_cap_order_antisymmetric(pair):
    a, b = pair
    assert cap_order_cmp(a, b) == -cap_order_cmp(b, a)
    # a longer partition is always larger
    if combinat.length(a) > combinat.length(b):
        assert cap_order_cmp(a, b) == GREATER
