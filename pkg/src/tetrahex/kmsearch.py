"""The search pipeline: candidate hexad unions, residual triple orbits,
admissible tetrad orbits, the orbit incidence matrix, and design assembly
from exact-cover solutions.

For a transitive group G on v points, every union of 6-subset orbits whose
sizes sum to v and which covers no 3-subset twice is a candidate hexad set.
The residual 3-orbits (covered zero times) index the rows of a 0/1 matrix A
over admissible 4-orbit columns; each 0/1 solution U of AU=J selects tetrad
orbits completing the candidate into a homogeneous 3-(v,{4,6},1) design.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .classify import classify
from .designs import SetSystem, admissible_v, verify_twbd
from .dlx import CoverMatrix, to_libexact
from .orbits import (DEFAULT_SUBSET_CAP, OrbitIndex, colex_ranks,
                     orbits_on_ksubsets)
from .perms import PermGroup


class PipelineError(RuntimeError):
    """Internal inconsistency in the orbit matrix construction."""


def orbit_cover_counts(big: OrbitIndex, small: OrbitIndex) -> np.ndarray:
    """counts[B, S]: how many members of big-orbit B contain the fixed
    representative of small-orbit S.

    By orbit invariance the count is the same for every member of S, so it
    equals (total containment incidences between the orbits) / |S|.
    """
    kb, ks = big.subset_size, small.subset_size
    nb, ns = big.n_orbits, small.n_orbits
    big_ids = big.orbit_id_of_row.astype(np.int64) * ns
    small_pos = small.colex_positions()
    total = np.zeros(nb * ns, dtype=np.int64)
    for pattern in combinations(range(kb), ks):
        sub = big.subsets[:, pattern]
        sid = small.orbit_id_of_row[small_pos[colex_ranks(sub)]]
        total += np.bincount(big_ids + sid, minlength=nb * ns)
    counts = total.reshape(nb, ns)
    rem = counts % small.sizes[np.newaxis, :]
    if rem.any():
        raise PipelineError("containment incidences not divisible by orbit size")
    return (counts // small.sizes[np.newaxis, :]).astype(np.int32)


@dataclass(frozen=True, eq=False)
class HexadCandidate:
    """A union of 6-subset orbits forming a candidate hexad set."""
    orbit_ids: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    triple_cover: np.ndarray  # per-3-orbit coverage multiplicities


@dataclass
class SearchStats:
    candidates_considered: int = 0
    candidates_valid: int = 0
    tactical_prunes: int = 0
    filtered_hexads: int = 0
    infeasible: int = 0
    solutions: int = 0
    emitted: int = 0
    rejected_verification: int = 0
    truncated: bool = False

    def to_json_dict(self) -> dict:
        return dict(self.__dict__)


def enumerate_hexad_candidates(d6: OrbitIndex, d3: OrbitIndex,
                               hexad_cover: np.ndarray | None = None,
                               stats: SearchStats | None = None):
    """Yield HexadCandidates in lexicographic orbit-id order.

    A 6-orbit may join a union only while no 3-subset orbit is covered
    twice; unions must have sizes summing to exactly v and be tactical
    1-(v,6,6) configurations (checked explicitly, counted when it prunes).
    """
    v = d6.degree
    if stats is None:
        stats = SearchStats()
    if hexad_cover is None:
        hexad_cover = orbit_cover_counts(d6, d3)
    sizes = d6.sizes
    usable = [int(i) for i in range(d6.n_orbits)
              if sizes[i] <= v and hexad_cover[i].max() <= 1]
    n = len(usable)
    reach = np.zeros((n + 1, v + 1), dtype=bool)
    reach[n, 0] = True
    for i in range(n - 1, -1, -1):
        reach[i] = reach[i + 1]
        sz = int(sizes[usable[i]])
        if sz <= v:
            reach[i, sz:] |= reach[i + 1, : v + 1 - sz]
    cover_idx = [np.flatnonzero(hexad_cover[oid]) for oid in usable]
    cover = np.zeros(d3.n_orbits, dtype=np.int16)
    chosen: list[int] = []

    def emit():
        stats.candidates_considered += 1
        blocks = []
        for oid in chosen:
            blocks.extend(d6.orbit_members(oid))
        repl = np.zeros(v, dtype=np.int64)
        for blk in blocks:
            for x in blk:
                repl[x] += 1
        if len(set(repl.tolist())) != 1 or repl[0] != 6:
            stats.tactical_prunes += 1
            return None
        stats.candidates_valid += 1
        return HexadCandidate(tuple(chosen), tuple(blocks), cover.copy())

    def rec(start: int, remaining: int):
        if remaining == 0:
            cand = emit()
            if cand is not None:
                yield cand
            return
        for j in range(start, n):
            if not reach[j, remaining]:
                return  # suffix sums only shrink as j grows
            sz = int(sizes[usable[j]])
            if sz > remaining:
                continue
            idx = cover_idx[j]
            if cover[idx].any():
                continue
            cover[idx] += 1
            chosen.append(usable[j])
            yield from rec(j + 1, remaining - sz)
            chosen.pop()
            cover[idx] -= 1

    yield from rec(0, v)


def residual_triple_orbits(candidate: HexadCandidate,
                           d3: OrbitIndex) -> list[int]:
    """3-orbit ids with zero coverage by the candidate hexads."""
    if len(candidate.triple_cover) != d3.n_orbits:
        raise ValueError("candidate does not match this 3-orbit index")
    return [int(i) for i in np.flatnonzero(candidate.triple_cover == 0)]


def admissible_tetrad_orbits(residual: list[int], d4: OrbitIndex,
                             tetrad_cover: np.ndarray,
                             pure_only: bool = False) -> list[int]:
    """4-orbit ids covering no residual representative twice, excluding
    useless all-zero columns.

    With ``pure_only`` the orbits whose tetrads touch any non-residual
    triple are dropped as well.  Selecting such an orbit always double
    covers a hexad-covered triple, so no valid design is lost; the search
    pipeline uses this mode to keep the solution stream free of covers
    that cannot verify.
    """
    if not residual:
        return []
    sub = tetrad_cover[:, residual]
    keep = (sub <= 1).all(axis=1) & (sub.sum(axis=1) > 0)
    if pure_only:
        outside = np.setdiff1d(np.arange(tetrad_cover.shape[1]),
                               np.asarray(residual, dtype=np.int64))
        keep &= tetrad_cover[:, outside].sum(axis=1) == 0
    return [int(i) for i in np.flatnonzero(keep)]


@dataclass
class KMMatrix:
    """The 0/1 orbit incidence matrix A over residual 3-orbit rows and
    admissible 4-orbit columns."""
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    entries: np.ndarray

    def cover_matrix(self) -> CoverMatrix:
        choices = [np.flatnonzero(self.entries[:, j]).tolist()
                   for j in range(len(self.cols))]
        return CoverMatrix(len(self.rows), choices)

    def infeasible_rows(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.entries.sum(axis=1) == 0)]


def build_km_matrix(residual: list[int], admissible: list[int],
                    d3: OrbitIndex, d4: OrbitIndex) -> KMMatrix:
    """Entries A[T-orbit, K-orbit] = number of K in the column orbit
    containing the row's representative triple, built by enumerating the
    v-3 supersets of each representative."""
    v = d3.degree
    col_of = {oid: j for j, oid in enumerate(admissible)}
    entries = np.zeros((len(residual), len(admissible)), dtype=np.uint8)
    for r, oid in enumerate(residual):
        rep = d3.representative(oid)
        in_rep = set(rep)
        for x in range(v):
            if x in in_rep:
                continue
            j = col_of.get(d4.orbit_of(rep + (x,)))
            if j is None:
                continue
            if entries[r, j] == 1:
                raise PipelineError(
                    f"column orbit {admissible[j]} covers triple orbit {oid} twice")
            entries[r, j] = 1
    return KMMatrix(tuple(residual), tuple(admissible), entries)


@dataclass
class SearchConfig:
    two_class_only: bool = False
    hexad_params: tuple[int, int, int, int] | None = None
    solution_limit: int | None = None
    candidate_limit: int | None = None
    subset_cap: int = DEFAULT_SUBSET_CAP
    libexact_dir: str | None = None


class SearchContext:
    """Orbit indexes and cover-count tables shared across one group's run."""

    def __init__(self, group: PermGroup, subset_cap: int = DEFAULT_SUBSET_CAP):
        self.group = group
        self.v = group.degree
        self.d3 = orbits_on_ksubsets(group, 3, cap=subset_cap)
        self.d4 = orbits_on_ksubsets(group, 4, cap=subset_cap)
        self.d6 = orbits_on_ksubsets(group, 6, cap=subset_cap)
        self.hexad_cover = orbit_cover_counts(self.d6, self.d3)
        self.tetrad_cover = orbit_cover_counts(self.d4, self.d3)

    def tetrad_orbit_blocks(self, orbit_ids) -> list[tuple[int, ...]]:
        blocks: list[tuple[int, ...]] = []
        for oid in orbit_ids:
            blocks.extend(self.d4.orbit_members(oid))
        return blocks


class DesignSearch:
    """Lazy stream of the designs afforded by a transitive group.

    Iterating yields verified SetSystems in deterministic order; ``stats``
    accumulates counters and is complete once iteration finishes.
    """

    def __init__(self, group: PermGroup, config: SearchConfig | None = None,
                 context: SearchContext | None = None):
        if not group.is_transitive():
            raise ValueError("the prescribed group must be transitive")
        if not admissible_v(group.degree):
            raise ValueError(
                f"no homogeneous 3-(v,{{4,6}},1) exists for v={group.degree}")
        self.group = group
        self.config = config or SearchConfig()
        self.context = context
        self.stats = SearchStats()

    def _hexad_filter_ok(self, candidate: HexadCandidate) -> bool:
        cfg = self.config
        if not cfg.two_class_only and cfg.hexad_params is None:
            return True
        verdict = classify(SetSystem(self.group.degree, candidate.blocks))
        if verdict.two_class is None:
            return False
        if cfg.hexad_params is not None:
            p = verdict.two_class
            return (p.lambda1, p.lambda2, p.delta1, p.delta2) == tuple(cfg.hexad_params)
        return True

    def __iter__(self):
        cfg = self.config
        if self.context is None:
            self.context = SearchContext(self.group, subset_cap=cfg.subset_cap)
        ctx = self.context
        stats = self.stats
        v = ctx.v
        candidates = enumerate_hexad_candidates(
            ctx.d6, ctx.d3, hexad_cover=ctx.hexad_cover, stats=stats)
        n_cand = 0
        for cand in candidates:
            if cfg.candidate_limit is not None and n_cand >= cfg.candidate_limit:
                stats.truncated = True
                return
            n_cand += 1
            if not self._hexad_filter_ok(cand):
                stats.filtered_hexads += 1
                continue
            residual = residual_triple_orbits(cand, ctx.d3)
            admissible = admissible_tetrad_orbits(residual, ctx.d4,
                                                  ctx.tetrad_cover,
                                                  pure_only=True)
            if residual and not admissible:
                stats.infeasible += 1
                continue
            km = build_km_matrix(residual, admissible, ctx.d3, ctx.d4)
            if km.infeasible_rows():
                stats.infeasible += 1
                continue
            cover = km.cover_matrix()
            if cfg.libexact_dir is not None:
                path = Path(cfg.libexact_dir) / f"km_{n_cand - 1:06d}.exact"
                path.write_text(to_libexact(cover), encoding="utf-8")
            for sol in cover.enumerate_solutions():
                if (cfg.solution_limit is not None
                        and stats.solutions >= cfg.solution_limit):
                    stats.truncated = True
                    return
                stats.solutions += 1
                chosen = [km.cols[j] for j in sol]
                design = SetSystem(
                    v, list(cand.blocks) + ctx.tetrad_orbit_blocks(chosen))
                if not verify_twbd(design, 3, {4, 6}, 1):
                    stats.rejected_verification += 1
                    continue
                stats.emitted += 1
                yield design


def search_designs(group: PermGroup,
                   config: SearchConfig | None = None) -> DesignSearch:
    return DesignSearch(group, config)


# ---------------------------------------------------------------------------
# Worker pool over hexad candidates (single collector in the parent).

_POOL_CTX: SearchContext | None = None
_POOL_CFG: SearchConfig | None = None


def _solve_candidate(payload):
    """Solve one candidate in a forked worker; returns plain tuples."""
    index, orbit_ids = payload
    ctx, cfg = _POOL_CTX, _POOL_CFG
    blocks: list[tuple[int, ...]] = []
    for oid in orbit_ids:
        blocks.extend(ctx.d6.orbit_members(oid))
    cover = ctx.hexad_cover[list(orbit_ids)].sum(axis=0).astype(np.int16)
    cand = HexadCandidate(tuple(orbit_ids), tuple(blocks), cover)
    counters = {"filtered_hexads": 0, "infeasible": 0, "solutions": 0,
                "emitted": 0, "rejected_verification": 0}
    v = ctx.v
    if cfg.two_class_only or cfg.hexad_params is not None:
        verdict = classify(SetSystem(v, cand.blocks))
        ok = verdict.two_class is not None
        if ok and cfg.hexad_params is not None:
            p = verdict.two_class
            ok = (p.lambda1, p.lambda2, p.delta1, p.delta2) == tuple(cfg.hexad_params)
        if not ok:
            counters["filtered_hexads"] = 1
            return index, [], counters
    residual = residual_triple_orbits(cand, ctx.d3)
    admissible = admissible_tetrad_orbits(residual, ctx.d4, ctx.tetrad_cover,
                                          pure_only=True)
    if residual and not admissible:
        counters["infeasible"] = 1
        return index, [], counters
    km = build_km_matrix(residual, admissible, ctx.d3, ctx.d4)
    if km.infeasible_rows():
        counters["infeasible"] = 1
        return index, [], counters
    out = []
    for sol in km.cover_matrix().enumerate_solutions(limit=cfg.solution_limit):
        counters["solutions"] += 1
        chosen = [km.cols[j] for j in sol]
        design = SetSystem(v, list(cand.blocks) + ctx.tetrad_orbit_blocks(chosen))
        if not verify_twbd(design, 3, {4, 6}, 1):
            counters["rejected_verification"] += 1
            continue
        counters["emitted"] += 1
        out.append([list(b) for b in design.blocks])
    return index, out, counters


def run_search(group: PermGroup, config: SearchConfig | None = None,
               jobs: int = 1) -> tuple[list[SetSystem], SearchStats]:
    """Drain a search, optionally farming candidates to a fork-based worker
    pool.  Results are merged in candidate order, so the design list is
    identical to the serial stream (worker counters are summed; the global
    solution limit is additionally applied per candidate in workers)."""
    if jobs == 1:
        search = DesignSearch(group, config)
        return list(search), search.stats
    import multiprocessing as mp
    import os

    if jobs <= 0:
        jobs = os.cpu_count() or 1
    cfg = config or SearchConfig()
    DesignSearch(group, cfg)  # validates transitivity and admissible v
    ctx = SearchContext(group, subset_cap=cfg.subset_cap)
    stats = SearchStats()
    cands = []
    for cand in enumerate_hexad_candidates(ctx.d6, ctx.d3,
                                           hexad_cover=ctx.hexad_cover,
                                           stats=stats):
        if cfg.candidate_limit is not None and len(cands) >= cfg.candidate_limit:
            stats.truncated = True
            break
        cands.append(cand.orbit_ids)
    global _POOL_CTX, _POOL_CFG
    _POOL_CTX, _POOL_CFG = ctx, cfg
    designs: list[SetSystem] = []
    try:
        with mp.get_context("fork").Pool(jobs) as pool:
            for _index, rows, counters in pool.imap(
                    _solve_candidate, list(enumerate(cands)), chunksize=4):
                for key, val in counters.items():
                    if key != "emitted":
                        setattr(stats, key, getattr(stats, key) + val)
                designs.extend(SetSystem(group.degree, blocks) for blocks in rows)
    finally:
        _POOL_CTX = _POOL_CFG = None
    stats.emitted = len(designs)
    if cfg.solution_limit is not None and stats.solutions >= cfg.solution_limit:
        stats.truncated = True
    return designs, stats
