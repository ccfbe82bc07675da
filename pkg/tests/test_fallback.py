"""The pure-Python kernels must give the same answers as the compiled ones."""
import json
import os
import subprocess
import sys

import chaincover
from chaincover.trie import random_op_sequence

SCRIPT = """
import json
import chaincover as cc
from chaincover.trie import random_op_sequence

out = {"numba": cc.USE_NUMBA, "chains": [], "ops": None}
for dag in (cc.gen_random_dag(35, 0.15, 1), cc.gen_worst_case(5, 7)):
    f = cc.min_flow(cc.build_reduction(dag))
    out["chains"].append([
        f.flow.tolist(),
        cc.extract_mcd(dag, f).chains,
        cc.extract_mcd_naive(dag, f).chains,
        cc.decompose_to_mpc(dag, f),
    ])
tp = cc.TriePartition(50)
out["ops"] = [tp.run_ops(random_op_sequence(2000, 9)).tolist(), tp.dump()]
print(json.dumps(out))
"""


def run(disable):
    env = dict(os.environ)
    env.pop("CHAINCOVER_DISABLE_NUMBA", None)
    if disable:
        env["CHAINCOVER_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True,
                          text=True, check=True, timeout=600)
    return json.loads(proc.stdout)


def test_python_fallback_matches_compiled():
    slow = run(disable=True)
    fast = run(disable=False)
    assert slow["numba"] is False
    assert fast["numba"] is chaincover.USE_NUMBA
    assert slow["chains"] == fast["chains"]
    assert slow["ops"] == fast["ops"]


def test_python_impl_unwraps_kernels():
    from chaincover._jit import python_impl
    from chaincover.trie import k_split

    body = python_impl(k_split)
    assert not hasattr(body, "py_func")
    assert random_op_sequence(5, 0).shape == (5, 3)
