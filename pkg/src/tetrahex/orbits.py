"""Group orbits on the k-subsets of {0..v-1}.

Subsets are encoded as sorted integer tuples.  Internally every k-subset is
a row of a lexicographically ordered (N, k) array, and a generator acts as
a row->row successor map; orbits are the connected components of the union
of those maps.  The component labelling is the hot loop and runs through
the numba backend when available.
"""
from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .backend import USING_NUMBA, jit_kernel
from .perms import PermGroup

DEFAULT_SUBSET_CAP = 2_000_000

MAX_DEGREE = 40
MAX_K = 8

_BINOM = np.zeros((MAX_DEGREE + 1, MAX_K + 1), dtype=np.int64)
for _n in range(MAX_DEGREE + 1):
    for _k in range(min(_n, MAX_K) + 1):
        _BINOM[_n, _k] = comb(_n, _k)


class SubsetCapExceeded(RuntimeError):
    """C(v,k) is larger than the configured enumeration cap."""


def ksubsets(v: int, k: int) -> np.ndarray:
    """All k-subsets of {0..v-1} as an (N, k) int8 array in lex order."""
    rows = np.fromiter(
        (x for c in combinations(range(v), k) for x in c),
        dtype=np.int8,
        count=comb(v, k) * k,
    )
    return rows.reshape(-1, k)


def colex_ranks(rows: np.ndarray) -> np.ndarray:
    """Colex rank of each sorted-row subset: sum of C(row[i], i+1)."""
    k = rows.shape[1]
    idx = np.arange(1, k + 1)
    return _BINOM[rows.astype(np.int64), idx].sum(axis=1)


def _components_kernel(succ, parent):
    n_gens, n = succ.shape
    for g in range(n_gens):
        row = succ[g]
        for i in range(n):
            a = i
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = row[i]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b
    for i in range(n):
        r = i
        while parent[r] != r:
            r = parent[r]
        parent[i] = r
    return parent


_components_jit = jit_kernel(_components_kernel)


def _components_numpy(succ: np.ndarray) -> np.ndarray:
    n = succ.shape[1]
    labels = np.arange(n, dtype=np.int64)
    while True:
        changed = False
        for g in range(succ.shape[0]):
            fwd = labels[succ[g]]
            if np.any(fwd < labels):
                np.minimum(labels, fwd, out=labels)
                changed = True
            before = labels.copy()
            np.minimum.at(labels, succ[g], before)
            if np.any(labels < before):
                changed = True
        if not changed:
            return labels


def subset_component_labels(succ: np.ndarray) -> np.ndarray:
    """Minimum-row component label for the union of successor maps."""
    if USING_NUMBA:
        return _components_jit(succ, np.arange(succ.shape[1], dtype=np.int64))
    return _components_numpy(succ)


class OrbitIndex:
    """Partition of all k-subsets of {0..v-1} into group orbits.

    Orbits are numbered by ascending lexicographic representative; the
    representative of each orbit is its lexicographically least member.
    """

    def __init__(self, degree: int, subset_size: int, subsets: np.ndarray,
                 orbit_id_of_row: np.ndarray):
        self.degree = degree
        self.subset_size = subset_size
        self.subsets = subsets
        self.orbit_id_of_row = orbit_id_of_row
        self.sizes = np.bincount(orbit_id_of_row).astype(np.int64)
        n_orbits = len(self.sizes)
        rep = np.full(n_orbits, len(subsets), dtype=np.int64)
        np.minimum.at(rep, orbit_id_of_row, np.arange(len(subsets), dtype=np.int64))
        self.rep_rows = rep
        order = np.argsort(orbit_id_of_row, kind="stable")
        bounds = np.zeros(n_orbits + 1, dtype=np.int64)
        np.cumsum(self.sizes, out=bounds[1:])
        self._row_order = order
        self._bounds = bounds
        self._pos_of_colex: np.ndarray | None = None

    @property
    def n_orbits(self) -> int:
        return len(self.sizes)

    def representative(self, orbit: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.subsets[self.rep_rows[orbit]])

    @property
    def representatives(self) -> list[tuple[int, ...]]:
        return [self.representative(i) for i in range(self.n_orbits)]

    def orbit_rows(self, orbit: int) -> np.ndarray:
        return self._row_order[self._bounds[orbit] : self._bounds[orbit + 1]]

    def orbit_members(self, orbit: int) -> list[tuple[int, ...]]:
        rows = self.orbit_rows(orbit)
        return [tuple(int(x) for x in self.subsets[r]) for r in rows]

    def colex_positions(self) -> np.ndarray:
        """Row index of each subset keyed by its colex rank (lazy)."""
        if self._pos_of_colex is None:
            n = len(self.subsets)
            pos = np.empty(n, dtype=np.int64)
            pos[colex_ranks(self.subsets)] = np.arange(n, dtype=np.int64)
            self._pos_of_colex = pos
        return self._pos_of_colex

    def row_of(self, subset) -> int:
        s = tuple(sorted(subset))
        if len(s) != self.subset_size or len(set(s)) != self.subset_size:
            raise ValueError(f"not a {self.subset_size}-subset: {subset!r}")
        if s[0] < 0 or s[-1] >= self.degree:
            raise ValueError(f"subset {subset!r} out of range for degree {self.degree}")
        rank = int(_BINOM[list(s), np.arange(1, self.subset_size + 1)].sum())
        return int(self.colex_positions()[rank])

    def orbit_of(self, subset) -> int:
        return int(self.orbit_id_of_row[self.row_of(subset)])

    def lookup(self, subset) -> int:
        return self.orbit_of(subset)


def orbits_on_ksubsets(group: PermGroup, k: int,
                       cap: int = DEFAULT_SUBSET_CAP) -> OrbitIndex:
    """Full orbit partition of the k-subsets of the group's point set."""
    v = group.degree
    if not 1 <= k <= v:
        raise ValueError(f"k={k} out of range for degree {v}")
    n = comb(v, k)
    if n > cap:
        raise SubsetCapExceeded(f"C({v},{k}) = {n} exceeds cap {cap}")
    subs = ksubsets(v, k)
    pos = np.empty(n, dtype=np.int64)
    pos[colex_ranks(subs)] = np.arange(n, dtype=np.int64)
    succ = np.empty((len(group.generators), n), dtype=np.int64)
    for gi, g in enumerate(group.generators):
        img = g.as_array()[subs]
        img.sort(axis=1)
        succ[gi] = pos[colex_ranks(img)]
    labels = subset_component_labels(succ)
    reps = np.unique(labels)
    orbit_id = np.searchsorted(reps, labels).astype(np.int32)
    return OrbitIndex(v, k, subs, orbit_id)
