"""Canonical labeling, isomorphism reduction and automorphism groups.

A set system is encoded as a bipartite graph: one vertex per point (one
color class) and one vertex per block, colored by block size, with edges
for membership.  Canonical labeling is by individualization-refinement:
equitable partition refinement (the compiled kernel), branching on the
first non-singleton cell, minimizing the leaf certificate, and pruning
sibling branches that are equivalent under automorphisms discovered at
leaves.  Equal certificates mean isomorphic systems.
"""
from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .backend import jit_kernel
from .designs import SetSystem, pair_coverage_matrix, replication_profile
from .perms import PermGroup, Permutation

DEFAULT_AUT_CLOSURE_CAP = 2_000_000


def _refine_kernel(indptr, nbrs, perm, pos, cstart, clen, queue, inq, qstate,
                   cnt, cellmark, touched, tcells, fragstarts, fraglens,
                   bucket, vbuf):
    qcap = queue.shape[0]
    head = qstate[0]
    tail = qstate[1]
    qn = qstate[2]
    while qn > 0:
        s = queue[head]
        head = (head + 1) % qcap
        qn -= 1
        inq[s] = 0
        ls = clen[s]
        ntouched = 0
        for p in range(s, s + ls):
            w = perm[p]
            for t in range(indptr[w], indptr[w + 1]):
                u = nbrs[t]
                if cnt[u] == 0:
                    touched[ntouched] = u
                    ntouched += 1
                cnt[u] += 1
        ntc = 0
        for i in range(ntouched):
            cu = cstart[pos[touched[i]]]
            if cellmark[cu] == 0:
                cellmark[cu] = 1
                tcells[ntc] = cu
                ntc += 1
        for i in range(1, ntc):
            x = tcells[i]
            j = i - 1
            while j >= 0 and tcells[j] > x:
                tcells[j + 1] = tcells[j]
                j -= 1
            tcells[j + 1] = x
        for ci in range(ntc):
            c = tcells[ci]
            cellmark[c] = 0
            lc = clen[c]
            if lc == 1:
                continue
            mn = 2147483647
            mx = -1
            for p in range(c, c + lc):
                k = cnt[perm[p]]
                if k < mn:
                    mn = k
                if k > mx:
                    mx = k
            if mn == mx:
                continue
            nk = mx - mn + 1
            for k in range(nk):
                bucket[k] = 0
            for p in range(c, c + lc):
                bucket[cnt[perm[p]] - mn] += 1
            acc = 0
            for k in range(nk):
                b = bucket[k]
                bucket[k] = acc
                acc += b
            for p in range(c, c + lc):
                w = perm[p]
                k = cnt[w] - mn
                vbuf[bucket[k]] = w
                bucket[k] += 1
            for i in range(lc):
                w = vbuf[i]
                perm[c + i] = w
                pos[w] = c + i
            was_inq = inq[c] == 1
            nfrag = 0
            fs = c
            prevk = cnt[perm[c]]
            for p in range(c + 1, c + lc + 1):
                if p == c + lc or cnt[perm[p]] != prevk:
                    fragstarts[nfrag] = fs
                    fraglens[nfrag] = p - fs
                    nfrag += 1
                    if p < c + lc:
                        fs = p
                        prevk = cnt[perm[p]]
            for f in range(nfrag):
                fs = fragstarts[f]
                fl = fraglens[f]
                clen[fs] = fl
                for p in range(fs, fs + fl):
                    cstart[p] = fs
            if was_inq:
                for f in range(1, nfrag):
                    fs = fragstarts[f]
                    if inq[fs] == 0:
                        inq[fs] = 1
                        queue[tail] = fs
                        tail = (tail + 1) % qcap
                        qn += 1
            else:
                big = 0
                for f in range(1, nfrag):
                    if fraglens[f] > fraglens[big]:
                        big = f
                for f in range(nfrag):
                    if f == big:
                        continue
                    fs = fragstarts[f]
                    if inq[fs] == 0:
                        inq[fs] = 1
                        queue[tail] = fs
                        tail = (tail + 1) % qcap
                        qn += 1
        for i in range(ntouched):
            cnt[touched[i]] = 0
    qstate[0] = head
    qstate[1] = tail
    qstate[2] = 0


_refine_kernel = jit_kernel(_refine_kernel)


@dataclass
class IncidenceGraph:
    """Colored bipartite point/block incidence graph of a set system."""
    v: int
    b: int
    indptr: np.ndarray
    nbrs: np.ndarray
    cell_starts: list[int]

    @property
    def n(self) -> int:
        return self.v + self.b


def incidence_graph(system: SetSystem) -> IncidenceGraph:
    v = system.v
    blocks = system.blocks
    b = len(blocks)
    n = v + b
    deg = np.zeros(n, dtype=np.int64)
    for j, blk in enumerate(blocks):
        deg[v + j] = len(blk)
        for x in blk:
            deg[x] += 1
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(deg, out=indptr[1:])
    nbrs = np.zeros(indptr[-1], dtype=np.int32)
    fill = indptr[:-1].copy()
    for j, blk in enumerate(blocks):
        for x in blk:
            nbrs[fill[x]] = v + j
            fill[x] += 1
            nbrs[fill[v + j]] = x
            fill[v + j] += 1
    cell_starts = [0] if v else []
    prev_size = None
    for j, blk in enumerate(blocks):
        if len(blk) != prev_size:
            cell_starts.append(v + j)
            prev_size = len(blk)
    return IncidenceGraph(v=v, b=b, indptr=indptr, nbrs=nbrs,
                          cell_starts=cell_starts)


class _Partition:
    """Ordered partition state shared with the refinement kernel."""

    __slots__ = ("perm", "pos", "cstart", "clen")

    def __init__(self, perm, pos, cstart, clen):
        self.perm = perm
        self.pos = pos
        self.cstart = cstart
        self.clen = clen

    @classmethod
    def initial(cls, n: int, cell_starts: list[int]) -> _Partition:
        perm = np.arange(n, dtype=np.int32)
        pos = np.arange(n, dtype=np.int32)
        cstart = np.zeros(n, dtype=np.int32)
        clen = np.zeros(n, dtype=np.int32)
        bounds = list(cell_starts) + [n]
        for i in range(len(cell_starts)):
            s, e = bounds[i], bounds[i + 1]
            cstart[s:e] = s
            clen[s] = e - s
        return cls(perm, pos, cstart, clen)

    def copy(self) -> _Partition:
        return _Partition(self.perm.copy(), self.pos.copy(),
                          self.cstart.copy(), self.clen.copy())

    def first_nonsingleton(self) -> int:
        n = len(self.perm)
        p = 0
        while p < n:
            if self.clen[p] > 1:
                return p
            p += self.clen[p]
        return -1

    def cell_vertices(self, start: int) -> list[int]:
        return sorted(int(self.perm[p])
                      for p in range(start, start + self.clen[start]))


class _Workspace:
    """Reusable scratch arrays for refinement on an n-vertex graph."""

    def __init__(self, n: int):
        self.queue = np.zeros(n + 1, dtype=np.int32)
        self.inq = np.zeros(n + 1, dtype=np.int32)
        self.qstate = np.zeros(3, dtype=np.int32)
        self.cnt = np.zeros(n, dtype=np.int32)
        self.cellmark = np.zeros(n + 1, dtype=np.int32)
        self.touched = np.zeros(n, dtype=np.int32)
        self.tcells = np.zeros(n, dtype=np.int32)
        self.fragstarts = np.zeros(n + 1, dtype=np.int32)
        self.fraglens = np.zeros(n + 1, dtype=np.int32)
        self.bucket = np.zeros(n + 2, dtype=np.int32)
        self.vbuf = np.zeros(n, dtype=np.int32)


def _refine(graph: IncidenceGraph, part: _Partition, ws: _Workspace,
            seed_cells: list[int]) -> None:
    ws.inq[:] = 0
    for i, s in enumerate(seed_cells):
        ws.queue[i] = s
        ws.inq[s] = 1
    ws.qstate[0] = 0
    ws.qstate[1] = len(seed_cells) % len(ws.queue)
    ws.qstate[2] = len(seed_cells)
    _refine_kernel(graph.indptr, graph.nbrs, part.perm, part.pos,
                   part.cstart, part.clen, ws.queue, ws.inq, ws.qstate,
                   ws.cnt, ws.cellmark, ws.touched, ws.tcells,
                   ws.fragstarts, ws.fraglens, ws.bucket, ws.vbuf)


def _individualize(part: _Partition, w: int) -> tuple[_Partition, int]:
    child = part.copy()
    p = int(child.pos[w])
    c = int(child.cstart[p])
    length = int(child.clen[c])
    other = child.perm[c]
    child.perm[c] = w
    child.perm[p] = other
    child.pos[w] = c
    child.pos[other] = p
    child.clen[c] = 1
    child.cstart[c] = c
    child.clen[c + 1] = length - 1
    child.cstart[c + 1 : c + length] = c + 1
    return child, c


class _AutCollector:
    """Discovered point automorphisms with an incrementally closed element
    set for orbit pruning and order reporting."""

    def __init__(self, v: int, cap: int = DEFAULT_AUT_CLOSURE_CAP):
        self.v = v
        self.cap = cap
        self.gens: list[tuple[int, ...]] = []
        self.identity = tuple(range(v))
        self.elements: set[tuple[int, ...]] = {self.identity}
        self.complete = True
        self._dirty = False
        self.version = 0

    def add(self, g: tuple[int, ...]) -> None:
        if g == self.identity:
            return
        if not self._dirty and g in self.elements:
            return
        if g in set(self.gens):
            return
        self.gens.append(g)
        self._dirty = True
        self.version += 1

    def _close(self) -> None:
        if not self._dirty:
            return
        self._dirty = False
        if not self.complete:
            return
        elems = {self.identity}
        frontier = [self.identity]
        while frontier:
            fresh = []
            for e in frontier:
                for g in self.gens:
                    p = tuple(e[x] for x in g)
                    if p not in elems:
                        if len(elems) >= self.cap:
                            self.complete = False
                            return
                        elems.add(p)
                        fresh.append(p)
            frontier = fresh
        self.elements = elems

    def order(self) -> int | None:
        self._close()
        if not self.complete:
            return None
        return len(self.elements)

    def point_orbits(self, prefix: tuple[int, ...]) -> list[int]:
        """Union-find roots of the point set under automorphisms fixing
        every vertex of ``prefix`` pointwise."""
        self._close()
        if self.complete:
            pool = [e for e in self.elements
                    if all(e[p] == p for p in prefix)]
        else:
            pool = [g for g in self.gens if all(g[p] == p for p in prefix)]
        root = list(range(self.v))

        def find(x: int) -> int:
            while root[x] != x:
                root[x] = root[root[x]]
                x = root[x]
            return x

        for e in pool:
            for x in range(self.v):
                a, b = find(x), find(e[x])
                if a < b:
                    root[b] = a
                elif b < a:
                    root[a] = b
        return [find(x) for x in range(self.v)]


class CanonResult:
    """Certificate plus the automorphism data discovered along the way."""

    __slots__ = ("certificate", "labeling", "generators", "order", "complete")

    def __init__(self, certificate: bytes, labeling: tuple[int, ...],
                 generators: list[tuple[int, ...]], order: int | None,
                 complete: bool):
        self.certificate = certificate
        self.labeling = labeling
        self.generators = generators
        self.order = order
        self.complete = complete


class _FirstPathJump(Exception):
    """Unwind the search to the first-path ancestor at ``depth``."""

    def __init__(self, depth: int):
        self.depth = depth


class _CanonSearch:
    def __init__(self, system: SetSystem, aut_cap: int = DEFAULT_AUT_CLOSURE_CAP):
        if not system.blocks:
            raise ValueError("cannot canonicalize an empty block system")
        if system.v > 255:
            raise ValueError("point count above 255 is not supported")
        for blk in system.blocks:
            if not blk:
                raise ValueError("empty blocks are not supported")
        self.system = system
        self.graph = incidence_graph(system)
        self.ws = _Workspace(self.graph.n)
        self.aut = _AutCollector(system.v, cap=aut_cap)
        self.best_cert: bytes | None = None
        self.best_labels: np.ndarray | None = None
        self.first_cert: bytes | None = None
        self.first_labels: np.ndarray | None = None
        self.first_prefix: tuple[int, ...] | None = None
        self._seen_leaves: dict[bytes, np.ndarray] = {}
        self._block_set = set(system.blocks)
        blocks = system.blocks
        kmax = max(len(b) for b in blocks)
        arr = np.full((len(blocks), kmax), system.v, dtype=np.int32)
        for i, blk in enumerate(blocks):
            arr[i, : len(blk)] = blk
        self._blk_arr = arr
        sizes = np.array([len(b) for b in blocks], dtype=np.uint8)
        ranges = []
        start = 0
        for i in range(1, len(blocks) + 1):
            if i == len(blocks) or sizes[i] != sizes[start]:
                ranges.append((start, i))
                start = i
        self._size_ranges = ranges
        self._cert_prefix = (struct.pack("<HH", system.v, len(blocks))
                             + sizes.tobytes())
        self._labels_ext = np.empty(system.v + 1, dtype=np.int32)
        self._labels_ext[system.v] = 255

    def run(self) -> CanonResult:
        root = _Partition.initial(self.graph.n, self.graph.cell_starts)
        _refine(self.graph, root, self.ws, self.graph.cell_starts)
        try:
            self._node(root, ())
        except _FirstPathJump:
            raise AssertionError("first-path jump escaped the root")
        assert self.best_cert is not None and self.best_labels is not None
        labeling = tuple(int(x) for x in self.best_labels)
        return CanonResult(self.best_cert, labeling,
                           list(self.aut.gens), self.aut.order(),
                           self.aut.complete)

    def _node(self, part: _Partition, prefix: tuple[int, ...]) -> None:
        start = part.first_nonsingleton()
        if start < 0:
            self._leaf(part, prefix)
            return
        candidates = part.cell_vertices(start)
        if candidates[-1] >= self.system.v:
            raise AssertionError("branching cell contains block vertices")
        depth = len(prefix)
        on_first_path = (self.first_prefix is None
                         or prefix == self.first_prefix[:depth])
        explored: list[int] = []
        roots: list[int] | None = None
        seen_version = -1
        for w in candidates:
            if explored:
                if roots is None or self.aut.version != seen_version:
                    roots = self.aut.point_orbits(prefix)
                    seen_version = self.aut.version
                if any(roots[w] == roots[x] for x in explored):
                    continue
            child, singleton = _individualize(part, w)
            _refine(self.graph, child, self.ws, [singleton])
            try:
                self._node(child, prefix + (w,))
            except _FirstPathJump as jump:
                if jump.depth < depth or not on_first_path:
                    raise
                # equivalent subtree abandoned; continue with the next branch
            explored.append(w)

    def _leaf_certificate(self, part: _Partition) -> tuple[bytes, np.ndarray]:
        v = self.system.v
        labels = part.pos[:v].astype(np.int32)
        ext = self._labels_ext
        ext[:v] = labels
        m = ext[self._blk_arr]
        m.sort(axis=1)
        for s, e in self._size_ranges:
            seg = m[s:e]
            order = np.lexsort(seg.T[::-1])
            m[s:e] = seg[order]
        return self._cert_prefix + m.astype(np.uint8).tobytes(), labels

    def _leaf(self, part: _Partition, prefix: tuple[int, ...]) -> None:
        cert, labels = self._leaf_certificate(part)
        if self.first_cert is None:
            self.first_cert = cert
            self.first_labels = labels
            self.first_prefix = prefix
            self.best_cert = cert
            self.best_labels = labels
            self._seen_leaves[cert] = labels
            return
        if self.best_cert is None or cert < self.best_cert:
            self.best_cert = cert
            self.best_labels = labels
        prior = self._seen_leaves.get(cert)
        if prior is None:
            self._seen_leaves[cert] = labels
            return
        g = self._found_automorphism(labels, prior)
        if cert == self.first_cert and g is not None:
            # g maps this leaf's path onto the first path: the rest of the
            # current branch is its g-preimage, so nothing new lives there.
            mapped = tuple(g[w] for w in prefix)
            first = self.first_prefix
            if mapped == first and prefix != first:
                common = 0
                while (common < len(prefix)
                       and prefix[common] == first[common]):
                    common += 1
                raise _FirstPathJump(common)

    def _found_automorphism(self, lab_a: np.ndarray,
                            lab_b: np.ndarray) -> tuple[int, ...] | None:
        v = self.system.v
        inv_b = np.empty(v, dtype=np.int64)
        inv_b[lab_b] = np.arange(v)
        g = tuple(int(x) for x in inv_b[lab_a])
        if g == self.aut.identity:
            return None
        mapped = {tuple(sorted(g[x] for x in blk)) for blk in self.system.blocks}
        if mapped != self._block_set:
            raise AssertionError("leaf equivalence produced a non-automorphism")
        self.aut.add(g)
        return g


def _canon_result(system: SetSystem,
                  aut_cap: int = DEFAULT_AUT_CLOSURE_CAP) -> CanonResult:
    cached = system._cert
    if cached is None:
        cached = _CanonSearch(system, aut_cap=aut_cap).run()
        system._cert = cached
    return cached


def canonical_certificate(system: SetSystem) -> bytes:
    """Label-invariant certificate; equal certificates iff isomorphic."""
    return _canon_result(system).certificate


def certificate_hex(system: SetSystem) -> str:
    return canonical_certificate(system).hex()


def canonical_form(system: SetSystem) -> SetSystem:
    """The canonically relabeled copy of the system."""
    res = _canon_result(system)
    return system.relabel(res.labeling)


def invariant_key(system: SetSystem):
    """Cheap label-invariant fingerprint used to pre-sort designs before the
    full canonical search."""
    sizes = tuple(sorted(Counter(len(b) for b in system.blocks).items()))
    repl = tuple(sorted(Counter(replication_profile(system).values()).items()))
    cov = pair_coverage_matrix(system)
    iu = np.triu_indices(system.v, 1)
    covm = tuple(sorted(Counter(int(x) for x in cov[iu]).items()))
    return (system.v, len(system.blocks), sizes, repl, covm)


def are_isomorphic(a: SetSystem, b: SetSystem) -> bool:
    if a.v != b.v or len(a.blocks) != len(b.blocks):
        return False
    if invariant_key(a) != invariant_key(b):
        return False
    return canonical_certificate(a) == canonical_certificate(b)


@dataclass
class IsoClass:
    representative: SetSystem
    certificate: bytes
    count: int
    first_index: int


def iso_reduce(systems, cache: dict[str, int] | None = None) -> list[IsoClass]:
    """Reduce a stream of systems to first-seen isomorphism class
    representatives with multiplicities.

    ``cache`` optionally maps certificate hex strings to already-known class
    ids (it is updated in place), so repeated runs skip re-classing.
    """
    classes: list[IsoClass] = []
    by_cert: dict[bytes, IsoClass] = {}
    for idx, system in enumerate(systems):
        cert = canonical_certificate(system)
        cls = by_cert.get(cert)
        if cls is None:
            cls = IsoClass(system, cert, 0, idx)
            by_cert[cert] = cls
            classes.append(cls)
            if cache is not None and cert.hex() not in cache:
                cache[cert.hex()] = len(cache)
        cls.count += 1
    return classes


def automorphism_group(system: SetSystem,
                       closure_cap: int = 10_000_000) -> tuple[PermGroup, int]:
    """The full point-automorphism group and its order."""
    res = _canon_result(system)
    gens = [Permutation(g) for g in res.generators]
    if not gens:
        gens = [Permutation.identity(system.v)]
    group = PermGroup(gens)
    if res.order is not None:
        return group, res.order
    return group, group.order(cap=closure_cap)
