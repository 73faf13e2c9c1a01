import random
from itertools import combinations
from math import comb

import pytest

from tetrahex.orbits import (SubsetCapExceeded, ksubsets,
                             orbits_on_ksubsets)
from tetrahex.perms import PermGroup, Permutation


def cyclic(v):
    return PermGroup.from_cycles(["(" + ",".join(map(str, range(v))) + ")"], v)


def test_c4_pairs():
    oi = orbits_on_ksubsets(PermGroup.from_cycles(["(0,1,2,3)"], 4), 2)
    assert oi.n_orbits == 2
    members = [set(map(frozenset, oi.orbit_members(i))) for i in range(2)]
    assert {frozenset({0, 1}), frozenset({1, 2}),
            frozenset({2, 3}), frozenset({0, 3})} in members
    assert {frozenset({0, 2}), frozenset({1, 3})} in members


def test_c26_triples():
    oi = orbits_on_ksubsets(cyclic(26), 3)
    assert oi.n_orbits == 100
    assert set(oi.sizes.tolist()) == {26}


def test_trivial_group_singletons():
    oi = orbits_on_ksubsets(PermGroup([Permutation.identity(6)]), 3)
    assert oi.n_orbits == 20
    assert set(oi.sizes.tolist()) == {1}


def test_partition_property():
    rng = random.Random(3)
    group = PermGroup.from_cycles(["(0,1,2,3,4)(5,6)", "(0,5)(1,6)"], 7)
    k = 3
    oi = orbits_on_ksubsets(group, k)
    assert int(oi.sizes.sum()) == comb(7, k)
    seen = set()
    for i in range(oi.n_orbits):
        for member in oi.orbit_members(i):
            assert member not in seen
            seen.add(member)
    # orbits closed under every generator, and lookup agrees
    for i in range(oi.n_orbits):
        members = set(oi.orbit_members(i))
        for g in group.generators:
            assert {g.apply_to_subset(m) for m in members} == members
        for m in members:
            assert oi.orbit_of(m) == i
    # random membership queries
    for _ in range(50):
        s = tuple(sorted(rng.sample(range(7), k)))
        i = oi.orbit_of(s)
        assert s in set(oi.orbit_members(i))


def test_orbit_sizes_divide_group_order():
    group = PermGroup.from_cycles(
        ["(0,1,2,3)(4,5,6,7)(8,9,10,11)(12,13,14,15)",
         "(0,4,8,12)(1,5,9,13)(2,6,10,14)(3,7,11,15)"], 16)
    order = group.order()
    for k in (2, 3, 4):
        oi = orbits_on_ksubsets(group, k)
        assert all(order % int(s) == 0 for s in oi.sizes)


def test_representative_is_lex_min():
    group = PermGroup.from_cycles(["(0,3,1)(2,4)"], 5)
    oi = orbits_on_ksubsets(group, 2)
    for i in range(oi.n_orbits):
        rep = oi.representative(i)
        assert rep == min(oi.orbit_members(i))


def test_representatives_sorted():
    oi = orbits_on_ksubsets(cyclic(9), 3)
    reps = oi.representatives
    assert reps == sorted(reps)


def test_cap():
    with pytest.raises(SubsetCapExceeded):
        orbits_on_ksubsets(cyclic(26), 6, cap=1000)


def test_k_out_of_range():
    with pytest.raises(ValueError):
        orbits_on_ksubsets(cyclic(5), 6)


def test_ksubsets_lex_order():
    rows = ksubsets(5, 3)
    expect = list(combinations(range(5), 3))
    assert [tuple(r) for r in rows.tolist()] == expect


def test_row_of_validates():
    oi = orbits_on_ksubsets(cyclic(6), 2)
    with pytest.raises(ValueError):
        oi.row_of((0, 0))
    with pytest.raises(ValueError):
        oi.row_of((0, 6))
