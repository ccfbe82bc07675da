import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincover import (
    Dag,
    MalformedFlow,
    Violation,
    build_reduction,
    extract_chains_from_flow,
    extract_mcd,
    extract_mcd_naive,
    gen_random_dag,
    gen_worst_case,
    min_flow,
    minimum_chain_decomposition,
    reaches,
    validate_mcd,
)
from chaincover.flow import FlowAssignment

PATH3 = Dag.from_edges(3, [(0, 1), (1, 2)])


def solve(dag):
    return min_flow(build_reduction(dag))


@pytest.mark.parametrize("extract", [extract_mcd, extract_mcd_naive])
def test_examples(extract):
    assert extract(PATH3, solve(PATH3)).chains == [[0, 1, 2]]
    edgeless = Dag.from_edges(3)
    out = extract(edgeless, solve(edgeless))
    assert sorted(out.chains) == [[0], [1], [2]]
    wc = gen_worst_case(2, 2)
    out = extract(wc, solve(wc))
    assert out.k == 2 and out.total_length == wc.n == 6
    assert validate_mcd(wc, out, 2) is None


def test_worst_case_total_length():
    dag = gen_worst_case(10, 10)
    out = extract_mcd(dag, solve(dag))
    assert out.k == 10 and out.total_length == 30
    # exactly one chain runs through the middle path
    middle = set(range(10, 20))
    assert sum(1 for c in out.chains if middle & set(c)) == 1


def test_public_entry_point():
    dag = gen_random_dag(30, 0.2, seed=4)
    assert minimum_chain_decomposition(dag).chains == extract_mcd(dag, solve(dag)).chains


def test_both_extractors_on_corpus(dag_corpus):
    for name, dag in dag_corpus:
        f = solve(dag)
        for extract in (extract_mcd, extract_mcd_naive):
            out = extract(dag, f)
            assert validate_mcd(dag, out, f.size) is None, name
            assert all(out.chains)


def test_stats():
    dag = gen_worst_case(200, 200)
    f = solve(dag)
    _, boosted = extract_mcd(dag, f, return_stats=True)
    _, naive = extract_mcd_naive(dag, f, return_stats=True)
    assert boosted.algorithm == "boosted" and naive.algorithm == "naive"
    # every index walks the middle path once per vertex
    assert naive.index_moves >= 200 * 200
    assert boosted.node_visits < naive.node_visits
    assert boosted.dict_ops > 0 and boosted.nodes_created > 0


def test_validate_examples():
    assert validate_mcd(PATH3, [[0, 1, 2]], 1) is None
    assert validate_mcd(PATH3, [[0, 1], [2]], 1) == Violation("WrongChainCount", (1, 2))
    assert validate_mcd(PATH3, [[0, 1], [1, 2]]) == Violation("DuplicateVertex", (1,))
    assert validate_mcd(PATH3, [[0, 2]]) == Violation("MissingVertex", (1,))
    assert validate_mcd(PATH3, [[0, 1, 2], []]) == Violation("EmptyChain", (1,))
    assert validate_mcd(PATH3, [[0, 1, 7]]) == Violation("VertexOutOfRange", (7,))
    assert validate_mcd(PATH3, [[0], [2, 1]]) == Violation("NotAChain", (1, 0))
    two = Dag.from_edges(2)
    v = validate_mcd(two, [[0, 1]], 1)
    assert v.kind == "NotAChain" and str(v) == "NotAChain(0, 0)"
    # reachability, not adjacency, is what chains need
    assert validate_mcd(PATH3, [[0, 2], [1]]) is None


def test_malformed_flow_rejected():
    net = build_reduction(PATH3)
    f = np.array(solve(PATH3).flow)
    f[net.split_edge(2)] = 0
    with pytest.raises(MalformedFlow):
        extract_mcd(PATH3, FlowAssignment(net, f))
    with pytest.raises(MalformedFlow):
        extract_mcd_naive(PATH3, FlowAssignment(net, f))


def test_flow_extraction_matches_mcd(dag_corpus):
    for _, dag in dag_corpus:
        f = solve(dag)
        assert extract_chains_from_flow(dag, f).chains == extract_mcd(dag, f).chains


def path_flow(dag, paths):
    """Flow of the reduction that carries one unit along each DAG path."""
    net = build_reduction(dag)
    f = np.zeros(net.edge_count, np.int64)
    edge_id = {e: i for i, e in enumerate(dag.edge_list())}
    for p in paths:
        f[net.s_edge(p[0])] += 1
        f[net.t_edge(p[-1])] += 1
        for v in p:
            f[net.split_edge(v)] += 1
        for u, v in zip(p, p[1:]):
            f[net.dag_edge(edge_id[(u, v)])] += 1
    return FlowAssignment(net, f)


def random_paths(dag, rng, count):
    paths = []
    for _ in range(count):
        v = int(rng.integers(dag.n))
        path = [v]
        while dag.out_adj[v] and rng.random() < 0.7:
            v = int(rng.choice(dag.out_adj[v]))
            path.append(v)
        paths.append(path)
    return paths


def test_flow_extraction_single_unit():
    dag = Dag.from_edges(2)
    out = extract_chains_from_flow(dag, path_flow(dag, [[0]]))
    assert out.chains == [[0]]


def test_flow_extraction_shared_vertices():
    dag = gen_worst_case(2, 1)
    paths = [[0, 2, 3], [1, 2, 3]]
    out, stats = extract_chains_from_flow(dag, path_flow(dag, paths), return_stats=True)
    # 2 and 3 lie on both paths yet appear once
    assert sorted(v for c in out.chains for v in c) == [0, 1, 2, 3]
    assert out.k + stats.dropped_chains == 2


def test_flow_extraction_empty_flow():
    dag = Dag.from_edges(3)
    net = build_reduction(dag)
    out = extract_chains_from_flow(dag, FlowAssignment(net, np.zeros(net.edge_count, np.int64)))
    assert out.chains == []


@given(st.integers(1, 25), st.sampled_from([0.1, 0.3, 0.6]), st.integers(0, 10**6),
       st.integers(1, 8))
@settings(max_examples=150, deadline=None)
def test_flow_extraction_on_random_path_flows(n, p, seed, count):
    dag = gen_random_dag(n, p, seed)
    rng = np.random.default_rng(seed)
    flow = path_flow(dag, random_paths(dag, rng, count))
    out, stats = extract_chains_from_flow(dag, flow, return_stats=True)
    flat = [v for c in out.chains for v in c]
    assert len(flat) == len(set(flat))
    assert set(flat) == set(np.flatnonzero(flow.split_flow() > 0).tolist())
    assert out.k + stats.dropped_chains == count
    for chain in out.chains:
        assert chain
        for u, v in zip(chain, chain[1:]):
            assert reaches(dag, u, v)
