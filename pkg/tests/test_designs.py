import json
from itertools import combinations

import pytest

from tetrahex.designs import (SetSystem, admissible_v, develop, double,
                              is_tactical, pair_coverage_matrix,
                              replication_profile, tetrad_count, verify_twbd)
from tetrahex.perms import PermGroup, Permutation
from tetrahex import catalog


def paley():
    return catalog.paley_biplane()


def test_develop_paley():
    design = paley()
    assert len(design.blocks) == 11
    cov = pair_coverage_matrix(design)
    pairs = cov[[i for i, j in combinations(range(11), 2)],
                [j for i, j in combinations(range(11), 2)]]
    assert set(pairs.tolist()) == {2}


def test_develop_trivial_group():
    group = PermGroup([Permutation.identity(5)])
    design = develop([(0, 1, 2)], group)
    assert design.blocks == ((0, 1, 2),)


def test_develop_idempotent():
    group = catalog.base_group("D20_1")
    entry = catalog.get("D20_1")
    base = [catalog.parse_labeled_block(b, 20) for b in entry.baseblocks]
    once = develop(base, group)
    twice = develop(once.blocks, group)
    assert once == twice


def test_develop_d16_counts():
    design = catalog.materialize("D16_1")
    assert len(design.blocks_of_size(6)) == 16
    assert len(design.blocks_of_size(4)) == 60


def test_verify_twbd_d16():
    assert verify_twbd(catalog.materialize("D16_1"), 3, {4, 6}, 1)


def test_verify_twbd_paley():
    assert verify_twbd(paley(), 2, {5}, 2)


def test_verify_twbd_broken_witness():
    design = paley()
    removed = design.blocks[0]
    broken = SetSystem(11, design.blocks[1:])
    result = verify_twbd(broken, 2, {5}, 2)
    assert not result
    assert result.witness is not None
    assert result.count == 1
    assert set(result.witness) <= set(removed)


def test_verify_twbd_bad_block_size():
    result = verify_twbd(SetSystem(5, [(0, 1, 2)]), 2, {4}, 1)
    assert not result and result.reason == "block size not allowed"


def test_verify_twbd_t_too_big():
    with pytest.raises(ValueError):
        verify_twbd(SetSystem(5, [(0, 1, 2)]), 4, {3}, 1)


def test_replication_profiles():
    design = catalog.materialize("D16_1")
    hexads = SetSystem(16, design.blocks_of_size(6))
    tetrads = SetSystem(16, design.blocks_of_size(4))
    assert set(replication_profile(hexads).values()) == {6}
    assert set(replication_profile(tetrads).values()) == {15}
    assert is_tactical(hexads) and is_tactical(tetrads)
    assert not is_tactical(SetSystem(3, [(0, 1)]))


def test_admissible_v():
    assert admissible_v(16) and admissible_v(20) and admissible_v(22)
    assert admissible_v(26) and admissible_v(28)
    assert not admissible_v(18)
    assert not admissible_v(14)  # v >= 16 required
    assert not admissible_v(17)
    with pytest.raises(ValueError):
        admissible_v(0)


def test_tetrad_count():
    assert tetrad_count(16) == 60
    assert tetrad_count(20) == 185
    assert tetrad_count(22) == 275
    assert tetrad_count(26) == 520
    assert tetrad_count(28) == 679
    with pytest.raises(ValueError):
        tetrad_count(15)


def test_double_paley_shape():
    doubled = double(paley())
    assert doubled.v == 22
    assert len(doubled.blocks) == 22
    assert set(len(b) for b in doubled.blocks) == {6}
    cov = pair_coverage_matrix(doubled)
    vals = {int(cov[i, j]) for i, j in combinations(range(22), 2)}
    assert vals <= {0, 2}


def test_double_tiny_symmetric():
    tri = SetSystem(3, [(0, 1), (1, 2), (0, 2)])
    doubled = double(tri)
    assert doubled.v == 6
    assert len(doubled.blocks) == 6
    assert set(len(b) for b in doubled.blocks) == {3}


def test_double_requires_symmetric():
    with pytest.raises(ValueError):
        double(SetSystem(4, [(0, 1), (1, 2)]))


def test_setsystem_normalization():
    s = SetSystem(5, [(2, 1, 0), (0, 1, 2), (3, 4)])
    assert s.blocks == ((3, 4), (0, 1, 2))
    with pytest.raises(ValueError):
        SetSystem(3, [(0, 0, 1)])
    with pytest.raises(ValueError):
        SetSystem(3, [(0, 3)])


def test_json_roundtrip(tmp_path):
    design = catalog.materialize("D20_1")
    text = design.dumps()
    again = SetSystem.loads(text)
    assert again == design
    doc = json.loads(text)
    assert doc["v"] == 20
    assert all(blk == sorted(blk) for blk in doc["blocks"])
    path = tmp_path / "d.json"
    path.write_text(text)
    assert SetSystem.from_file(path) == design


def test_json_baseblock_form():
    group = catalog.base_group("D20_1")
    entry = catalog.get("D20_1")
    base = [catalog.parse_labeled_block(b, 20) for b in entry.baseblocks]
    doc = {"v": 20, "baseblocks": [list(b) for b in base],
           "group": [repr(g) for g in group.generators]}
    assert SetSystem.from_json_dict(doc) == catalog.materialize("D20_1")
