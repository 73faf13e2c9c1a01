import random
from itertools import permutations

import pytest

from tetrahex.canon import (are_isomorphic, automorphism_group,
                            canonical_certificate, canonical_form,
                            incidence_graph, invariant_key, iso_reduce)
from tetrahex.designs import SetSystem, double
from tetrahex import catalog


def random_system(rng, v_min=4, v_max=8):
    v = rng.randint(v_min, v_max)
    n_blocks = rng.randint(2, 9)
    blocks = set()
    while len(blocks) < n_blocks:
        k = rng.randint(2, min(4, v))
        blocks.add(tuple(sorted(rng.sample(range(v), k))))
    return SetSystem(v, blocks)


def brute_force_aut_order(system):
    blocks = set(system.blocks)
    count = 0
    for perm in permutations(range(system.v)):
        if {tuple(sorted(perm[x] for x in b)) for b in blocks} == blocks:
            count += 1
    return count


def test_incidence_graph_degrees():
    system = catalog.materialize("D20_1")
    g = incidence_graph(system)
    assert g.v == 20 and g.b == 205
    deg = (g.indptr[1:] - g.indptr[:-1])
    for j, blk in enumerate(system.blocks):
        assert deg[20 + j] == len(blk)
    from tetrahex.designs import replication_profile
    profile = replication_profile(system)
    for x in range(20):
        assert deg[x] == profile[x]


def test_certificate_invariance_random():
    rng = random.Random(42)
    for _ in range(40):
        system = random_system(rng)
        cert = canonical_certificate(system)
        pi = list(range(system.v))
        rng.shuffle(pi)
        assert canonical_certificate(system.relabel(pi)) == cert


def test_canonical_form_is_isomorphic_with_same_cert():
    rng = random.Random(9)
    system = random_system(rng)
    canon = canonical_form(system)
    assert canonical_certificate(canon) == canonical_certificate(system)
    assert are_isomorphic(canon, system)


def test_are_isomorphic_basic():
    rng = random.Random(1)
    system = random_system(rng)
    pi = list(range(system.v))
    rng.shuffle(pi)
    assert are_isomorphic(system, system.relabel(pi))
    assert not are_isomorphic(SetSystem(4, [(0, 1)]),
                              SetSystem(5, [(0, 1)]))


def test_v20_designs_pairwise_distinct():
    certs = [canonical_certificate(catalog.materialize(eid))
             for eid in ("D20_1", "X20_2", "X20_3")]
    assert len(set(certs)) == 3


def test_d26_designs_distinct():
    a = canonical_certificate(catalog.materialize("D26_2"))
    b = canonical_certificate(catalog.materialize("D26_3"))
    assert a != b


def test_d22_hexads_match_doubled_paley():
    doubled = double(catalog.paley_biplane())
    cert = canonical_certificate(doubled)
    for eid in ("D22_1", "D22_2", "D22_3"):
        assert canonical_certificate(catalog.hexad_system(eid)) == cert


def test_iso_reduce_counts():
    rng = random.Random(5)
    base = random_system(rng, v_min=6, v_max=6)
    copies = []
    for _ in range(4):
        pi = list(range(6))
        rng.shuffle(pi)
        copies.append(base.relabel(pi))
    other = SetSystem(6, [(0, 1, 2), (3, 4, 5)])
    classes = iso_reduce(copies + [other])
    assert len(classes) == 2
    assert classes[0].count == 4
    assert classes[0].first_index == 0
    assert classes[1].count == 1


def test_iso_reduce_cache():
    cache = {}
    sys1 = SetSystem(4, [(0, 1), (2, 3)])
    iso_reduce([sys1], cache=cache)
    assert cache == {canonical_certificate(sys1).hex(): 0}
    iso_reduce([sys1, SetSystem(4, [(0, 1, 2)])], cache=cache)
    assert len(cache) == 2


def test_automorphism_soundness():
    for eid in ("D20_1", "D22_3", "D26_5"):
        system = catalog.materialize(eid)
        blocks = set(system.blocks)
        group, order = automorphism_group(system)
        for g in group.generators:
            assert {g.apply_to_subset(b) for b in blocks} == blocks


def test_automorphism_transitive_on_catalog():
    for eid in ("D16_1", "D22_1", "D26_2", "D28_11"):
        group, _ = automorphism_group(catalog.materialize(eid))
        assert group.is_transitive()


def test_automorphism_orders_brute_force():
    rng = random.Random(2718)
    for _ in range(40):
        system = random_system(rng, v_min=4, v_max=7)
        _, order = automorphism_group(system)
        assert order == brute_force_aut_order(system)


def test_known_orders():
    assert automorphism_group(catalog.materialize("D22_3"))[1] == 110
    assert automorphism_group(catalog.materialize("D28_13"))[1] == 168


def test_invariant_key_invariance():
    rng = random.Random(3)
    system = random_system(rng)
    pi = list(range(system.v))
    rng.shuffle(pi)
    assert invariant_key(system) == invariant_key(system.relabel(pi))


def test_empty_rejected():
    with pytest.raises(ValueError):
        canonical_certificate(SetSystem(4, []))


def _assert_equitable(graph, part):
    cells = []
    p = 0
    while p < graph.n:
        length = int(part.clen[p])
        cells.append([int(part.perm[q]) for q in range(p, p + length)])
        p += length
    adj = [set(graph.nbrs[graph.indptr[x]:graph.indptr[x + 1]].tolist())
           for x in range(graph.n)]
    for cell in cells:
        for other in cells:
            oset = set(other)
            counts = {len(adj[x] & oset) for x in cell}
            assert len(counts) == 1, (cell, other, counts)


def test_refinement_reaches_equitable_partition():
    from tetrahex.canon import (_Partition, _Workspace, _individualize,
                                _refine)

    rng = random.Random(31)
    systems = [random_system(rng, v_min=5, v_max=9) for _ in range(25)]
    systems.append(catalog.materialize("D20_1"))
    for system in systems:
        graph = incidence_graph(system)
        ws = _Workspace(graph.n)
        part = _Partition.initial(graph.n, graph.cell_starts)
        _refine(graph, part, ws, graph.cell_starts)
        _assert_equitable(graph, part)
        start = part.first_nonsingleton()
        if start >= 0:
            w = part.cell_vertices(start)[0]
            child, singleton = _individualize(part, w)
            _refine(graph, child, ws, [singleton])
            _assert_equitable(graph, child)
