import json
import os
import subprocess
import sys

import numpy as np

from tetrahex.backend import HAVE_NUMBA, USING_NUMBA
from tetrahex.orbits import _components_kernel, _components_numpy

_PARITY_SCRIPT = r"""
import json, sys
from tetrahex.backend import USING_NUMBA
from tetrahex.perms import PermGroup
from tetrahex.orbits import orbits_on_ksubsets
from tetrahex.dlx import CoverMatrix
from tetrahex.canon import canonical_certificate
from tetrahex.designs import SetSystem

group = PermGroup.from_cycles(["(0,1,2,3,4)(5,6)", "(0,5)(1,6)(2,3)"], 7)
oi = orbits_on_ksubsets(group, 3)
m = CoverMatrix.from_dense([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1]])
system = SetSystem(7, [(0, 1, 2), (2, 3, 4), (4, 5, 6), (0, 3, 6), (1, 4, 6)])
print(json.dumps({
    "numba": USING_NUMBA,
    "orbit_ids": oi.orbit_id_of_row.tolist(),
    "solutions": sorted(m.enumerate_solutions()),
    "cert": canonical_certificate(system).hex(),
}))
"""


def _run(backend: str) -> dict:
    env = dict(os.environ, TETRAHEX_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", _PARITY_SCRIPT], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def test_backends_agree():
    if not HAVE_NUMBA:
        return
    with_numba = _run("numba")
    plain = _run("numpy")
    assert with_numba["numba"] is True
    assert plain["numba"] is False
    assert with_numba["orbit_ids"] == plain["orbit_ids"]
    assert with_numba["solutions"] == plain["solutions"]
    assert with_numba["cert"] == plain["cert"]


def test_component_kernels_agree():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(1, 60))
        n_gens = int(rng.integers(1, 4))
        succ = np.empty((n_gens, n), dtype=np.int64)
        for g in range(n_gens):
            succ[g] = rng.permutation(n)
        a = _components_kernel(succ, np.arange(n, dtype=np.int64))
        b = _components_numpy(succ)
        assert (a == b).all()


def test_default_backend_uses_numba_when_present():
    if HAVE_NUMBA and os.environ.get("TETRAHEX_BACKEND", "auto") in ("", "auto"):
        assert USING_NUMBA
