import random
from itertools import combinations

import pytest

from tetrahex.dlx import CoverMatrix, from_dense, from_libexact, to_libexact


def brute_force_covers(rows):
    """All exact covers as sorted tuples of nonzero-column ids."""
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    nz = [j for j in range(n_cols) if any(rows[i][j] for i in range(n_rows))]
    out = set()
    for r in range(len(nz) + 1):
        for combo in combinations(nz, r):
            counts = [0] * n_rows
            for j in combo:
                for i in range(n_rows):
                    counts[i] += rows[i][j]
            if all(c == 1 for c in counts):
                out.add(tuple(sorted(combo)))
    return out


def naive_algorithm_x(rows):
    """First-uncovered-constraint branching, for the heuristic-independence
    check."""
    n_rows = len(rows)
    cols = [frozenset(i for i in range(n_rows) if rows[i][j])
            for j in range(len(rows[0]) if rows else 0)]
    out = set()

    def rec(covered, chosen):
        open_rows = [i for i in range(n_rows) if i not in covered]
        if not open_rows:
            out.add(tuple(sorted(chosen)))
            return
        target = open_rows[0]
        for j, support in enumerate(cols):
            if target in support and not (support & covered):
                rec(covered | support, chosen + [j])

    rec(frozenset(), [])
    return out


def test_identity():
    m = from_dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert list(m.enumerate_solutions()) == [(0, 1, 2)]


def test_small_two_solutions():
    m = from_dense([[1, 1, 0], [0, 1, 1]])
    assert set(m.enumerate_solutions()) == {(1,), (0, 2)}


def test_zero_row_unsolvable():
    m = from_dense([[1, 0], [0, 0]])
    assert m.has_empty_constraint()
    assert list(m.enumerate_solutions()) == []


def test_ragged_input():
    with pytest.raises(ValueError):
        from_dense([[1, 0], [1]])
    with pytest.raises(ValueError):
        from_dense([[1, 2]])


def test_limit_and_reentry():
    m = from_dense([[1, 1, 0], [0, 1, 1]])
    assert len(list(m.enumerate_solutions(limit=1))) == 1
    # structure untouched by the early exit
    assert set(m.enumerate_solutions()) == {(1,), (0, 2)}


def test_random_vs_brute_force():
    rng = random.Random(2024)
    for _ in range(200):
        n_rows = rng.randint(1, 6)
        n_cols = rng.randint(1, 12)
        rows = [[1 if rng.random() < 0.3 else 0 for _ in range(n_cols)]
                for _ in range(n_rows)]
        m = from_dense(rows)
        assert set(m.enumerate_solutions()) == brute_force_covers(rows)


def test_branching_heuristic_invariance():
    rng = random.Random(7)
    for _ in range(100):
        n_rows = rng.randint(1, 5)
        n_cols = rng.randint(1, 10)
        rows = [[1 if rng.random() < 0.35 else 0 for _ in range(n_cols)]
                for _ in range(n_rows)]
        m = from_dense(rows)
        assert set(m.enumerate_solutions()) == naive_algorithm_x(rows)


def test_deterministic_order():
    rows = [[1, 1, 0, 0, 1], [0, 1, 1, 0, 0], [1, 0, 1, 1, 0]]
    m = from_dense(rows)
    assert list(m.enumerate_solutions()) == list(m.enumerate_solutions())


def test_cover_uncover_roundtrip():
    rng = random.Random(99)
    rows = [[1 if rng.random() < 0.4 else 0 for _ in range(8)] for _ in range(6)]
    m = from_dense(rows)
    baseline = m.fingerprint()
    for _ in range(500):
        c = rng.randrange(6)
        m.cover(c)
        m.uncover(c)
        assert m.fingerprint() == baseline


def test_nested_cover_uncover():
    m = from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    baseline = m.fingerprint()
    m.cover(0)
    m.cover(1)
    m.uncover(1)
    m.uncover(0)
    assert m.fingerprint() == baseline


def test_empty_matrix():
    m = CoverMatrix(0, [])
    assert list(m.enumerate_solutions()) == [()]


def test_empty_choice_never_selected():
    # column 1 is empty: it never appears in a solution
    m = from_dense([[1, 0], [1, 0]])
    assert list(m.enumerate_solutions()) == [(0,)]
    m2 = from_dense([[1, 0]])
    assert list(m2.enumerate_solutions()) == [(0,)]


def test_libexact_roundtrip():
    rows = [[1, 0, 1], [0, 1, 1]]
    m = from_dense(rows)
    text = to_libexact(m)
    lines = text.strip().splitlines()
    assert lines[0] == "r 2 3"
    assert all(line.startswith("e ") for line in lines[1:])
    again = from_libexact(text)
    assert (again.to_dense() == m.to_dense()).all()
    assert set(again.enumerate_solutions()) == set(m.enumerate_solutions())


def test_libexact_errors():
    with pytest.raises(ValueError):
        from_libexact("e 1 1\n")
    with pytest.raises(ValueError):
        from_libexact("r 1 1\ne 2 1\n")
    with pytest.raises(ValueError):
        from_libexact("r 1\n")
