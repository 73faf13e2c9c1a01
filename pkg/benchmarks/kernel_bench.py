#!/usr/bin/env python3
"""Timing comparison of the compiled (numba) and plain (numpy) kernel paths.

Runs each hot-kernel workload in a fresh interpreter per backend, selected
through TETRAHEX_BACKEND, and reports the second in-process run of every
workload so JIT compilation time is excluded.

Usage: python benchmarks/kernel_bench.py
"""
from __future__ import annotations

import json
import os
import subprocess
import sys

_CHILD = r"""
import json, time
from itertools import combinations
import numpy as np
from tetrahex.backend import USING_NUMBA
from tetrahex.perms import PermGroup
from tetrahex.orbits import orbits_on_ksubsets
from tetrahex.dlx import CoverMatrix
from tetrahex.designs import SetSystem
from tetrahex.canon import _CanonSearch
from tetrahex import catalog


def bench(fn, repeat=2):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def orbit_workload():
    group = PermGroup.from_cycles(["(" + ",".join(map(str, range(26))) + ")"], 26)
    orbits_on_ksubsets(group, 6)


matrix = CoverMatrix(12, [list(c) for c in combinations(range(12), 3)])


def dlx_workload():
    n = sum(1 for _ in matrix.enumerate_solutions())
    assert n == 15400  # partitions of a 12-set into triples


design_blocks = catalog.materialize("D26_2").blocks


def canon_workload():
    fresh = SetSystem(26, design_blocks)
    _CanonSearch(fresh).run()


results = {}
for name, fn in [("subset-orbits v=26 k=6", orbit_workload),
                 ("dancing-links 12-set/triples", dlx_workload),
                 ("canonical search D26_2", canon_workload)]:
    results[name] = bench(fn)
print(json.dumps({"numba": USING_NUMBA, "results": results}))
"""


def run_backend(backend: str) -> dict:
    env = dict(os.environ, TETRAHEX_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", _CHILD], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    print("benchmarking both kernel backends (workloads run twice, best shown)")
    reports = {}
    for backend in ("numba", "numpy"):
        print(f"  running TETRAHEX_BACKEND={backend} ...", flush=True)
        reports[backend] = run_backend(backend)
    names = list(reports["numba"]["results"])
    width = max(len(n) for n in names)
    print(f"\n{'workload':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name in names:
        tn = reports["numba"]["results"][name]
        tp = reports["numpy"]["results"][name]
        print(f"{name:<{width}}  {tn:>9.3f}s  {tp:>9.3f}s  {tp / tn:>7.1f}x")


if __name__ == "__main__":
    main()
