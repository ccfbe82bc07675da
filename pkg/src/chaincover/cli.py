"""Command-line front end: ``chaincover {compute,validate,gen,bench}``.

Exit codes: 0 success, 1 bad input (parse error, cycle, bad arguments, failed
validation), 2 internal invariant breach.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .chains import extract_mcd, extract_mcd_naive, validate_mcd
from .dag import (
    Dag,
    gen_random_dag,
    gen_worst_case,
    parse_chains,
    parse_dag,
    serialize_chains,
    serialize_dag,
)
from .errors import ChainCoverError, MalformedFlow
from .flow import build_reduction, decompose_to_mpc, min_flow

ALGORITHMS = ("boosted", "naive", "mpc")
CSV_COLUMNS = (
    "family", "size", "algorithm", "n", "m", "k", "total_chain_length",
    "flow_time", "extract_time", "dict_ops", "dict_node_visits",
)
EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class InternalError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not internal ones
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class RunSummary:
    n: int
    m: int
    k: int
    total_chain_length: int
    flow_time: float
    extract_time: float
    dict_ops: int
    dict_node_visits: int
    algorithm: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _cheap_check(dag: Dag, chains: list[list[int]], k: int) -> None:
    # exactly-once coverage and chain count; reachability is left to `validate`
    if len(chains) != k:
        raise InternalError(f"extracted {len(chains)} chains, flow size is {k}")
    flat = np.fromiter((v for c in chains for v in c), np.int64)
    if flat.size != dag.n or not np.array_equal(np.sort(flat), np.arange(dag.n)):
        raise InternalError("chains do not cover every vertex exactly once")


def run_pipeline(dag: Dag, algorithm: str) -> tuple[list[list[int]], RunSummary]:
    t0 = time.perf_counter()
    flow = min_flow(build_reduction(dag))
    t1 = time.perf_counter()
    k = flow.size
    ops = visits = 0
    if algorithm == "mpc":
        chains = decompose_to_mpc(dag, flow)
    else:
        extract = extract_mcd if algorithm == "boosted" else extract_mcd_naive
        result, stats = extract(dag, flow, return_stats=True)
        chains = result.chains
        ops, visits = stats.dict_ops, stats.node_visits
    t2 = time.perf_counter()
    if algorithm != "mpc":
        _cheap_check(dag, chains, k)
    summary = RunSummary(
        n=dag.n, m=dag.m, k=k,
        total_chain_length=sum(len(c) for c in chains),
        flow_time=t1 - t0, extract_time=t2 - t1,
        dict_ops=ops, dict_node_visits=visits, algorithm=algorithm,
    )
    return chains, summary


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def cmd_compute(args) -> int:
    try:
        dag = parse_dag(_read(args.input))
    except (ChainCoverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        chains, summary = run_pipeline(dag, args.algo)
    except (InternalError, MalformedFlow) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _write(args.output, serialize_chains(chains))
    print(summary.to_json(), file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        dag = parse_dag(_read(args.graph))
        chains = parse_chains(_read(args.chains))
    except (ChainCoverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    violation = validate_mcd(dag, chains, args.k)
    if violation is not None:
        print(f"invalid: {violation}", file=sys.stderr)
        return EXIT_INPUT
    print("ok")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        if args.family == "worst-case":
            dag = gen_worst_case(args.k, args.l)
        else:
            dag = gen_random_dag(args.n, args.p, args.seed)
    except ChainCoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(args.output, serialize_dag(dag))
    return EXIT_OK


def bench_rows(family: str, sizes, seed: int = 0):
    """One boosted and one naive :class:`RunSummary` row per size."""
    for size in sizes:
        if family == "worst-case":
            dag = gen_worst_case(size, size)
        else:
            dag = gen_random_dag(size, min(1.0, 4.0 / size), seed)
        for algorithm in ("boosted", "naive"):
            _, summary = run_pipeline(dag, algorithm)
            row = asdict(summary)
            row["family"] = family
            row["size"] = size
            yield row


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        print(f"error: bad size list {args.sizes!r}", file=sys.stderr)
        return EXIT_INPUT
    if not sizes or min(sizes) < 1:
        print("error: sizes must be positive integers", file=sys.stderr)
        return EXIT_INPUT
    writer = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in bench_rows(args.family, sizes, args.seed):
        row["flow_time"] = f"{row['flow_time']:.6f}"
        row["extract_time"] = f"{row['extract_time']:.6f}"
        writer.writerow({c: row[c] for c in CSV_COLUMNS})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="chaincover", description="Minimum chain covers of DAGs through minimum flow.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute chains (or an MPC) of a DAG")
    p.add_argument("--algo", choices=ALGORITHMS, default="boosted")
    p.add_argument("--input", required=True, help="edge-list file ('-' for stdin)")
    p.add_argument("--output", help="chains file (default: stdout)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("validate", help="check a chains file against its graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--chains", required=True)
    p.add_argument("--k", type=int, default=None, help="expected number of chains")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="generate a test DAG")
    fam = p.add_subparsers(dest="family", required=True)
    w = fam.add_parser("worst-case", help="k sources -> path of length l -> k sinks")
    w.add_argument("--k", type=int, required=True)
    w.add_argument("--l", type=int, required=True)
    w.add_argument("--output")
    r = fam.add_parser("random", help="random DAG over a random order")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--p", type=float, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="CSV of boosted vs naive extraction over a size sweep")
    p.add_argument("--family", choices=("worst-case", "random"), required=True)
    p.add_argument("--sizes", required=True, help="comma-separated sizes")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
