"""Set systems, block development under a group, and t-wise balance checks."""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .perms import PermGroup


class SetSystem:
    """A duplicate-free block collection on points {0..v-1}.

    Blocks are stored as sorted tuples, ordered by (size, lexicographic).
    """

    __slots__ = ("v", "blocks", "_cert")

    def __init__(self, v: int, blocks):
        norm = set()
        for b in blocks:
            t = tuple(sorted(int(x) for x in b))
            if len(set(t)) != len(t):
                raise ValueError(f"block {b!r} has repeated points")
            if t and (t[0] < 0 or t[-1] >= v):
                raise ValueError(f"block {b!r} out of range for v={v}")
            norm.add(t)
        self.v = int(v)
        self.blocks = tuple(sorted(norm, key=lambda t: (len(t), t)))
        self._cert = None

    def __eq__(self, other) -> bool:
        return (isinstance(other, SetSystem)
                and self.v == other.v and self.blocks == other.blocks)

    def __hash__(self) -> int:
        return hash((self.v, self.blocks))

    def __repr__(self) -> str:
        return f"SetSystem(v={self.v}, b={len(self.blocks)})"

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def blocks_of_size(self, k: int) -> tuple[tuple[int, ...], ...]:
        return tuple(b for b in self.blocks if len(b) == k)

    def relabel(self, perm) -> SetSystem:
        images = perm.images if hasattr(perm, "images") else perm
        return SetSystem(self.v, [tuple(images[x] for x in b) for b in self.blocks])

    def to_json_dict(self, baseblocks=None, group=None) -> dict:
        doc: dict = {"v": self.v, "blocks": [list(b) for b in self.blocks]}
        if baseblocks is not None:
            doc["baseblocks"] = [list(map(int, sorted(b))) for b in baseblocks]
        if group is not None:
            doc["group"] = [repr(g) for g in group.generators]
        return doc

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json_dict(**kw), indent=None)

    @classmethod
    def from_json_dict(cls, doc: dict) -> SetSystem:
        v = int(doc["v"])
        if "blocks" in doc:
            return cls(v, doc["blocks"])
        if "baseblocks" in doc and "group" in doc:
            group = PermGroup.from_cycles(doc["group"], v)
            return develop(doc["baseblocks"], group)
        raise ValueError("design document needs 'blocks' or 'baseblocks'+'group'")

    @classmethod
    def loads(cls, text: str) -> SetSystem:
        return cls.from_json_dict(json.loads(text))

    @classmethod
    def from_file(cls, path) -> SetSystem:
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def develop(baseblocks, group: PermGroup) -> SetSystem:
    """Union of the group orbits of the base blocks, deduplicated."""
    out: set[tuple[int, ...]] = set()
    for base in baseblocks:
        out.update(group.subset_orbit(base))
    return SetSystem(group.degree, out)


@dataclass(frozen=True)
class BalanceResult:
    ok: bool
    witness: tuple[int, ...] | None = None
    count: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_twbd(system: SetSystem, t: int, sizes, lam: int) -> BalanceResult:
    """Check that block sizes lie in ``sizes`` and every t-subset of points
    is contained in exactly ``lam`` blocks."""
    allowed = set(sizes)
    if t > min(allowed):
        raise ValueError(f"t={t} exceeds the smallest allowed block size")
    for b in system.blocks:
        if len(b) not in allowed:
            return BalanceResult(False, witness=b, reason="block size not allowed")
    cover: dict[tuple[int, ...], int] = {}
    for b in system.blocks:
        for sub in combinations(b, t):
            cover[sub] = cover.get(sub, 0) + 1
            if cover[sub] > lam:
                return BalanceResult(False, witness=sub, count=cover[sub],
                                     reason="covered too often")
    if lam > 0:
        for sub in combinations(range(system.v), t):
            c = cover.get(sub, 0)
            if c != lam:
                return BalanceResult(False, witness=sub, count=c,
                                     reason="coverage mismatch")
    return BalanceResult(True)


def replication_profile(system: SetSystem) -> dict[int, int]:
    counts = dict.fromkeys(range(system.v), 0)
    for b in system.blocks:
        for x in b:
            counts[x] += 1
    return counts


def is_tactical(system: SetSystem) -> bool:
    profile = replication_profile(system)
    return len(set(profile.values())) == 1


def admissible_v(v: int) -> bool:
    """Necessary existence condition for a homogeneous 3-(v,{4,6},1)."""
    if v < 1:
        raise ValueError("v must be positive")
    return v >= 16 and v % 6 in (2, 4)


def tetrad_count(v: int) -> int:
    """Number of 4-blocks in a homogeneous 3-(v,{4,6},1): (C(v,3) - 20v)/4."""
    num = comb(v, 3) - 20 * v
    if num % 4 != 0:
        raise ValueError(f"tetrad count is not integral for v={v}")
    return num // 4


def pair_coverage_matrix(system: SetSystem) -> np.ndarray:
    m = np.zeros((system.v, system.v), dtype=np.int64)
    for b in system.blocks:
        for x, y in combinations(b, 2):
            m[x, y] += 1
            m[y, x] += 1
    return m


def block_intersection_sizes(system: SetSystem) -> list[int]:
    sets = [frozenset(b) for b in system.blocks]
    return [len(a & b) for a, b in combinations(sets, 2)]


def double(design: SetSystem) -> SetSystem:
    """Double a symmetric design into a system on 2v points.

    Block j of the first band is block_j together with new point v+j; block
    i of the second band is {i} plus {v+j : i in block_j}, i.e. the
    incidence matrix [[A, I], [I, A^T]].
    """
    v = design.v
    if len(design.blocks) != v:
        raise ValueError(
            f"doubling needs a symmetric design (b=v), got b={len(design.blocks)}, v={v}"
        )
    out = []
    for j, block in enumerate(design.blocks):
        out.append(tuple(sorted(block + (v + j,))))
    for i in range(v):
        out.append(tuple(sorted(
            [i] + [v + j for j, block in enumerate(design.blocks) if i in block]
        )))
    return SetSystem(2 * v, out)
