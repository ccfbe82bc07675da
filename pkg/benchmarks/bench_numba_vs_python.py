"""Compiled kernels against their pure-Python bodies.

Each mode runs in its own interpreter because the switch is read at import
time. Kernels call each other, so only a whole-process switch gives a clean
comparison. Prints a CSV with one row per (stage, size, mode).

    python3 benchmarks/bench_numba_vs_python.py --sizes 50,200,1000
"""
import argparse
import csv
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import chaincover as cc
from chaincover.trie import random_op_sequence

sizes = json.loads(sys.argv[1])
repeat = int(sys.argv[2])

def best(fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

# first call compiles (or loads the cache); keep it out of the timings
warm = cc.gen_worst_case(3, 3)
cc.extract_mcd(warm, cc.min_flow(cc.build_reduction(warm)))
cc.TriePartition(8).run_ops(random_op_sequence(20, 0))

rows = []
for size in sizes:
    dag = cc.gen_worst_case(size, 10 * size)
    net = cc.build_reduction(dag)
    f = cc.min_flow(net)
    ops = random_op_sequence(20 * size, seed=1)
    rows.append(("min_flow", size, best(lambda: cc.min_flow(net))))
    rows.append(("extract_mcd", size, best(lambda: cc.extract_mcd(dag, f))))
    rows.append(("extract_mcd_naive", size, best(lambda: cc.extract_mcd_naive(dag, f))))
    rows.append(("trie_run_ops", size, best(lambda: cc.TriePartition(size).run_ops(ops))))
print(json.dumps({"numba": cc.USE_NUMBA, "rows": rows}))
"""


def run_mode(disable: bool, sizes, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("CHAINCOVER_DISABLE_NUMBA", None)
    if disable:
        env["CHAINCOVER_DISABLE_NUMBA"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(sizes), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="20,100,400",
                        help="comma-separated k; graphs are gen_worst_case(k, 10k)")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    compiled = run_mode(False, sizes, args.repeat)
    python = run_mode(True, sizes, args.repeat)
    if not compiled["numba"]:
        print("warning: numba unavailable, both columns are pure Python", file=sys.stderr)

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["stage", "size", "numba_s", "python_s", "speedup"])
    for (stage, size, fast), (_, _, slow) in zip(compiled["rows"], python["rows"]):
        writer.writerow([stage, size, f"{fast:.6f}", f"{slow:.6f}", f"{slow / fast:.1f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
