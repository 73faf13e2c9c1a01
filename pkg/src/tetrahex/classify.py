"""The 2-class symmetric design taxonomy: biplanes, semi-biplanes,
association schemes and group-divisible types."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .designs import (SetSystem, block_intersection_sizes,
                      pair_coverage_matrix, replication_profile)


@dataclass(frozen=True)
class TwoClassParams:
    """Parameters (v,k; lambda1,lambda2; delta1,delta2) with lambda1 <= lambda2
    and delta1 <= delta2."""
    v: int
    k: int
    lambda1: int
    lambda2: int
    delta1: int
    delta2: int

    def as_tuple(self) -> tuple[int, ...]:
        return (self.v, self.k, self.lambda1, self.lambda2,
                self.delta1, self.delta2)


@dataclass(frozen=True)
class SchemeParams:
    """2-class association scheme constants: n1, n2 and the 2x2 matrices
    P1, P2 of triangle counts (P_i[j][k] = number of z that are j-th
    associates of x and k-th associates of y when x,y are i-th associates)."""
    n1: int
    n2: int
    P1: tuple[tuple[int, int], tuple[int, int]]
    P2: tuple[tuple[int, int], tuple[int, int]]


class GDType(enum.Enum):
    NOT_GD = "not_gd"
    SINGULAR = "singular"
    SEMI_REGULAR = "semi_regular"
    REGULAR = "regular"


@dataclass
class Classification:
    """Verdict record for a block system's hexad-style classification."""
    v: int
    b: int
    is_tactical: bool
    replication: int | None
    is_one_design_6_6: bool
    two_class: TwoClassParams | None = None
    is_symmetric_2design: bool = False
    sym_lambda: int | None = None
    is_biplane: bool = False
    is_semibiplane: bool = False
    scheme: SchemeParams | None = None
    gd_type: GDType = GDType.NOT_GD
    gd_group_class: int | None = None
    gd_group_size: int | None = None
    gd_formula_conflict: bool = False

    def tag(self) -> str:
        """Short human verdict: biplane / sbp / two-class params / not-2-class."""
        if self.is_biplane:
            return "biplane"
        if self.is_semibiplane:
            return "sbp"
        if self.two_class is not None:
            p = self.two_class
            return f"two-class {p.lambda1},{p.lambda2},{p.delta1},{p.delta2}"
        return "not-2-class"

    def to_json_dict(self) -> dict:
        doc: dict = {
            "v": self.v,
            "b": self.b,
            "tactical": self.is_tactical,
            "replication": self.replication,
            "one_design_6_6": self.is_one_design_6_6,
            "symmetric_2design": self.is_symmetric_2design,
            "biplane": self.is_biplane,
            "semibiplane": self.is_semibiplane,
            "tag": self.tag(),
            "gd_type": self.gd_type.value,
        }
        if self.two_class is not None:
            doc["two_class"] = list(self.two_class.as_tuple())
        if self.scheme is not None:
            doc["scheme"] = {
                "n1": self.scheme.n1, "n2": self.scheme.n2,
                "P1": [list(r) for r in self.scheme.P1],
                "P2": [list(r) for r in self.scheme.P2],
            }
        return doc


def _associate_classes(system: SetSystem, two_class: TwoClassParams):
    """0/1 adjacency matrices of the first- and second-class pair relations.

    First-class pairs are those covered by lambda1 blocks.
    """
    cov = pair_coverage_matrix(system)
    a1 = (cov == two_class.lambda1).astype(np.int64)
    a2 = (cov == two_class.lambda2).astype(np.int64)
    np.fill_diagonal(a1, 0)
    np.fill_diagonal(a2, 0)
    return a1, a2


def association_scheme_params(system: SetSystem,
                              two_class: TwoClassParams) -> SchemeParams | None:
    """The (n1, n2, P1, P2) constants if the two pair classes form a 2-class
    association scheme, else None.  Degenerate single-class coverage (n2=0)
    is reported as None."""
    if two_class.lambda1 == two_class.lambda2:
        return None
    a = _associate_classes(system, two_class)
    for m in a:
        if len(np.unique(m.sum(axis=1))) != 1:
            return None
    n1 = int(a[0].sum(axis=1)[0])
    n2 = int(a[1].sum(axis=1)[0])
    if n1 == 0 or n2 == 0:
        return None
    p = [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]
    for j in range(2):
        for k in range(2):
            m = a[j] @ a[k]
            for i in range(2):
                vals = np.unique(m[a[i] == 1])
                if len(vals) != 1:
                    return None
                p[i][j][k] = int(vals[0])
    return SchemeParams(
        n1=n1, n2=n2,
        P1=tuple(tuple(r) for r in p[0]),
        P2=tuple(tuple(r) for r in p[1]),
    )


def _partition_from_class(a: np.ndarray) -> list[list[int]] | None:
    """If relation ``a`` plus reflexivity is an equivalence with equal-size
    classes of size >= 2, return the groups, else None."""
    v = a.shape[0]
    seen = [False] * v
    groups = []
    for x in range(v):
        if seen[x]:
            continue
        members = [x] + [int(y) for y in np.flatnonzero(a[x])]
        for m in members:
            if seen[m]:
                return None
            seen[m] = True
        mset = set(members)
        for m in members:
            if set(np.flatnonzero(a[m])) | {m} != mset:
                return None
        groups.append(sorted(members))
    sizes = {len(g) for g in groups}
    if len(sizes) != 1 or sizes == {1} or len(groups) < 2:
        return None
    return groups


def group_divisible_type(system: SetSystem, scheme: SchemeParams,
                         two_class: TwoClassParams):
    """Group-divisible typing.

    Tries each associate class as the same-group relation; the relation plus
    reflexivity must partition the points into equal-size groups.  The type
    is then decided from r and the within/between pair indices: singular when
    r equals the within-group index; otherwise regular when r*k minus v times
    the between-group index is positive, semi-regular when it is zero.

    Returns (GDType, group_class, group_size, formula_conflict) where
    formula_conflict flags disagreement with the naive reading that always
    plugs the larger index into r - lambda and the smaller into rk - v*lambda.
    """
    a1, a2 = _associate_classes(system, two_class)
    profile = replication_profile(system)
    r = next(iter(profile.values()))
    k = two_class.k
    v = system.v
    lams = (two_class.lambda1, two_class.lambda2)
    for cls_idx, a in ((1, a1), (2, a2)):
        groups = _partition_from_class(a)
        if groups is None:
            continue
        lam_within = lams[cls_idx - 1]
        lam_between = lams[2 - cls_idx]
        if r - lam_within == 0:
            kind = GDType.SINGULAR
        elif r * k - v * lam_between > 0:
            kind = GDType.REGULAR
        elif r * k - v * lam_between == 0:
            kind = GDType.SEMI_REGULAR
        else:
            kind = GDType.NOT_GD
        naive_regular = (r - two_class.lambda2 > 0
                         and r * k - v * two_class.lambda1 > 0)
        conflict = naive_regular != (kind == GDType.REGULAR)
        return kind, cls_idx, len(groups[0]), conflict
    return GDType.NOT_GD, None, None, False


def gd_type(system: SetSystem, scheme: SchemeParams,
            two_class: TwoClassParams) -> GDType:
    return group_divisible_type(system, scheme, two_class)[0]


def classify(system: SetSystem) -> Classification:
    """Full hexad-style classification of a block system.

    The 2-class taxonomy applies only to symmetric 1-(v,k,k) systems
    (constant block size, b = v, tactical); otherwise only the tactical
    facts are reported.
    """
    v = system.v
    b = len(system.blocks)
    profile = replication_profile(system)
    reps = set(profile.values())
    tactical = len(reps) == 1
    r = next(iter(reps)) if tactical else None
    sizes = set(len(blk) for blk in system.blocks)
    one66 = tactical and sizes == {6} and r == 6
    out = Classification(v=v, b=b, is_tactical=tactical, replication=r,
                         is_one_design_6_6=one66)
    if not tactical or len(sizes) != 1 or b != v:
        return out
    k = sizes.pop()
    if r != k:
        return out
    cov = pair_coverage_matrix(system)
    iu = np.triu_indices(v, 1)
    cov_vals = sorted(set(int(x) for x in cov[iu]))
    int_vals = sorted(set(block_intersection_sizes(system)))
    if len(cov_vals) > 2 or len(int_vals) > 2:
        return out
    if len(cov_vals) == 1:
        lam = cov_vals[0]
        out.is_symmetric_2design = True
        out.sym_lambda = lam
        out.is_biplane = lam == 2
        deltas = int_vals if len(int_vals) == 2 else int_vals * 2
        out.two_class = TwoClassParams(v, k, lam, lam, deltas[0], deltas[-1])
        return out
    deltas = int_vals if len(int_vals) == 2 else int_vals * 2
    out.two_class = TwoClassParams(v, k, cov_vals[0], cov_vals[1],
                                   deltas[0], deltas[-1])
    out.is_semibiplane = (out.two_class.lambda1 == 0 and out.two_class.delta1 == 0
                          and out.two_class.lambda2 == 2 and out.two_class.delta2 == 2)
    out.scheme = association_scheme_params(system, out.two_class)
    if out.scheme is not None:
        kind, cls_idx, gsize, conflict = group_divisible_type(
            system, out.scheme, out.two_class)
        out.gd_type = kind
        out.gd_group_class = cls_idx
        out.gd_group_size = gsize
        out.gd_formula_conflict = conflict
    return out
