"""Exact cover by dancing links (Algorithm X).

Terminology follows the solver's use in the search pipeline: the matrix has
*constraints* (rows: each must be covered exactly once) and *choices*
(columns: selected as a set).  Solutions are the sets of choice ids whose
supports partition the constraint set.

The link structure lives in flat int32 arrays so the search step runs as a
compiled kernel under the numba backend; the python path executes the same
code uncompiled.  Enumeration is resumable: each call to the kernel returns
the next solution, so the public generator is lazy and honors limits
without materializing the solution set.
"""
from __future__ import annotations

import hashlib

import numpy as np

from .backend import jit_kernel

_FRESH, _RUNNING, _DONE = 0, 1, 2


def _cover(c, HL, HR, U, D, NCON, NCHO, SZ, cptr, ncon):
    HR[HL[c]] = HR[c]
    HL[HR[c]] = HL[c]
    i = D[c]
    while i != c:
        j = NCHO[i]
        s = ncon + cptr[j]
        e = ncon + cptr[j + 1]
        for x in range(s, e):
            if x != i:
                D[U[x]] = D[x]
                U[D[x]] = U[x]
                SZ[NCON[x]] -= 1
        i = D[i]


def _uncover(c, HL, HR, U, D, NCON, NCHO, SZ, cptr, ncon):
    i = U[c]
    while i != c:
        j = NCHO[i]
        s = ncon + cptr[j]
        e = ncon + cptr[j + 1]
        for x in range(e - 1, s - 1, -1):
            if x != i:
                SZ[NCON[x]] += 1
                D[U[x]] = x
                U[D[x]] = x
        i = U[i]
    HR[HL[c]] = c
    HL[HR[c]] = c


_cover = jit_kernel(_cover)
_uncover = jit_kernel(_uncover)


def _next_solution(HL, HR, U, D, NCON, NCHO, SZ, cptr, ncon, xs, cs, state, out):
    """Resume the search and write the next solution's choice ids into out.

    Returns the solution length, or -1 when the search is exhausted.
    state = [level, phase]; mode: 0 descend, 1 try node, 2 backtrack.
    """
    level = state[0]
    phase = state[1]
    root = ncon
    if phase == _DONE:
        return -1
    r = -1
    mode = 2 if phase == _RUNNING else 0
    while True:
        if mode == 0:
            if HR[root] == root:
                for i in range(level):
                    out[i] = NCHO[xs[i]]
                state[0] = level
                state[1] = _RUNNING
                return level
            c = HR[root]
            best = c
            bs = SZ[c]
            while c != root:
                if SZ[c] < bs:
                    best = c
                    bs = SZ[c]
                c = HR[c]
            c = best
            _cover(c, HL, HR, U, D, NCON, NCHO, SZ, cptr, ncon)
            cs[level] = c
            r = D[c]
            mode = 1
        elif mode == 1:
            c = cs[level]
            if r == c:
                _uncover(c, HL, HR, U, D, NCON, NCHO, SZ, cptr, ncon)
                mode = 2
            else:
                xs[level] = r
                j = NCHO[r]
                s = ncon + cptr[j]
                e = ncon + cptr[j + 1]
                for x in range(s, e):
                    if x != r:
                        _cover(NCON[x], HL, HR, U, D, NCON, NCHO, SZ, cptr, ncon)
                level += 1
                mode = 0
        else:
            if level == 0:
                state[1] = _DONE
                return -1
            level -= 1
            r = xs[level]
            j = NCHO[r]
            s = ncon + cptr[j]
            e = ncon + cptr[j + 1]
            for x in range(e - 1, s - 1, -1):
                if x != r:
                    _uncover(NCON[x], HL, HR, U, D, NCON, NCHO, SZ, cptr, ncon)
            r = D[r]
            mode = 1


_next_solution = jit_kernel(_next_solution)


class CoverMatrix:
    """Sparse dancing-links structure for an exact cover instance."""

    def __init__(self, n_constraints: int, choices):
        self.n_constraints = int(n_constraints)
        self.choices = [tuple(sorted(int(c) for c in ch)) for ch in choices]
        for ch in self.choices:
            if len(set(ch)) != len(ch):
                raise ValueError(f"choice {ch!r} repeats a constraint")
            if ch and (ch[0] < 0 or ch[-1] >= self.n_constraints):
                raise ValueError(f"choice {ch!r} out of range")
        self.n_choices = len(self.choices)
        self._build()

    def _build(self) -> None:
        ncon = self.n_constraints
        nnz = sum(len(ch) for ch in self.choices)
        n_nodes = ncon + nnz
        self.HL = np.empty(ncon + 1, dtype=np.int32)
        self.HR = np.empty(ncon + 1, dtype=np.int32)
        ids = np.arange(ncon + 1, dtype=np.int32)
        self.HL[:] = np.roll(ids, 1)
        self.HR[:] = np.roll(ids, -1)
        self.U = np.arange(n_nodes, dtype=np.int32)
        self.D = np.arange(n_nodes, dtype=np.int32)
        self.NCON = np.empty(n_nodes, dtype=np.int32)
        self.NCHO = np.full(n_nodes, -1, dtype=np.int32)
        self.NCON[:ncon] = np.arange(ncon, dtype=np.int32)
        self.SZ = np.zeros(ncon, dtype=np.int32)
        self.cptr = np.zeros(self.n_choices + 1, dtype=np.int32)
        node = ncon
        tail = np.arange(ncon, dtype=np.int32)  # current bottom node per constraint
        for j, ch in enumerate(self.choices):
            self.cptr[j + 1] = self.cptr[j] + len(ch)
            for c in ch:
                self.NCON[node] = c
                self.NCHO[node] = j
                self.U[node] = tail[c]
                self.D[node] = c
                self.D[tail[c]] = node
                self.U[c] = node
                tail[c] = node
                self.SZ[c] += 1
                node += 1

    @classmethod
    def from_dense(cls, rows) -> CoverMatrix:
        """Build from a dense 0/1 matrix given as constraint-major rows."""
        mat = [list(r) for r in rows]
        if not mat:
            return cls(0, [])
        width = len(mat[0])
        for r in mat:
            if len(r) != width:
                raise ValueError("ragged input")
            for x in r:
                if x not in (0, 1):
                    raise ValueError(f"entry {x!r} is not 0/1")
        choices = [[i for i, r in enumerate(mat) if r[j]] for j in range(width)]
        return cls(len(mat), choices)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_constraints, self.n_choices), dtype=np.int8)
        for j, ch in enumerate(self.choices):
            for c in ch:
                dense[c, j] = 1
        return dense

    def _kernel_args(self):
        return (self.HL, self.HR, self.U, self.D, self.NCON, self.NCHO,
                self.SZ, self.cptr, self.n_constraints)

    def cover(self, c: int) -> None:
        _cover(int(c), *self._kernel_args())

    def uncover(self, c: int) -> None:
        _uncover(int(c), *self._kernel_args())

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for arr in (self.HL, self.HR, self.U, self.D, self.SZ):
            h.update(arr.tobytes())
        return h.hexdigest()

    def has_empty_constraint(self) -> bool:
        return bool(self.n_constraints) and bool((self.SZ == 0).any())

    def enumerate_solutions(self, limit: int | None = None):
        """Yield every exact cover as a sorted tuple of choice ids.

        Works on a private copy of the link arrays, so the instance can be
        enumerated repeatedly and is untouched by early exits.
        """
        if limit is not None and limit <= 0:
            return
        if self.has_empty_constraint():
            return
        HL, HR = self.HL.copy(), self.HR.copy()
        U, D, SZ = self.U.copy(), self.D.copy(), self.SZ.copy()
        depth = self.n_constraints + 1
        xs = np.zeros(depth, dtype=np.int32)
        cs = np.zeros(depth, dtype=np.int32)
        state = np.zeros(2, dtype=np.int32)
        out = np.zeros(depth, dtype=np.int32)
        emitted = 0
        while True:
            k = _next_solution(HL, HR, U, D, self.NCON, self.NCHO, SZ,
                               self.cptr, self.n_constraints, xs, cs, state, out)
            if k < 0:
                return
            yield tuple(sorted(int(x) for x in out[:k]))
            emitted += 1
            if limit is not None and emitted >= limit:
                return


def enumerate_solutions(matrix: CoverMatrix, limit: int | None = None):
    return matrix.enumerate_solutions(limit)


def from_dense(rows) -> CoverMatrix:
    return CoverMatrix.from_dense(rows)


def to_libexact(matrix: CoverMatrix) -> str:
    """Text form: header 'r <constraints> <choices>' then 'e <row> <col>'
    lines, 1-based."""
    lines = [f"r {matrix.n_constraints} {matrix.n_choices}"]
    for j, ch in enumerate(matrix.choices):
        for c in ch:
            lines.append(f"e {c + 1} {j + 1}")
    return "\n".join(lines) + "\n"


def from_libexact(text: str) -> CoverMatrix:
    n_con = n_cho = None
    entries = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "r":
            if len(parts) != 3:
                raise ValueError(f"bad header line {raw!r}")
            n_con, n_cho = int(parts[1]), int(parts[2])
        elif parts[0] == "e":
            if len(parts) != 3:
                raise ValueError(f"bad entry line {raw!r}")
            entries.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise ValueError(f"unrecognized line {raw!r}")
    if n_con is None:
        raise ValueError("missing 'r rows cols' header")
    choices = [[] for _ in range(n_cho)]
    for c, j in entries:
        if not (0 <= c < n_con and 0 <= j < n_cho):
            raise ValueError(f"entry ({c + 1},{j + 1}) out of range")
        choices[j].append(c)
    return CoverMatrix(n_con, choices)
