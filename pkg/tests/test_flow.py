import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincover import (
    Dag,
    MalformedFlow,
    build_reduction,
    decompose_to_mpc,
    gen_random_dag,
    gen_worst_case,
    max_flow,
    min_flow,
)
from chaincover.flow import (
    FlowAssignment,
    check_flow,
    conservation_violations,
    feasible_flow,
)
from chaincover.oracle import (
    max_flow_by_cut_enumeration,
    min_path_cover_by_enumeration,
    width_by_matching,
)

PATH3 = Dag.from_edges(3, [(0, 1), (1, 2)])


def test_reduction_single_vertex():
    net = build_reduction(Dag.from_edges(1))
    assert net.node_count == 4 and net.edge_count == 3
    assert net.dump() == "0 1 0 0\n1 2 1 0\n2 3 0 0\n"


def test_reduction_blocks_and_counts():
    net = build_reduction(PATH3)
    assert net.edge_count == 11
    n = 3
    for v in range(n):
        assert (net.tail[net.s_edge(v)], net.head[net.s_edge(v)]) == (net.source, net.v_in(v))
        assert (net.tail[net.split_edge(v)], net.head[net.split_edge(v)]) == (net.v_in(v), net.v_out(v))
        assert (net.tail[net.t_edge(v)], net.head[net.t_edge(v)]) == (net.v_out(v), net.sink)
    for i, (u, v) in enumerate(PATH3.edge_list()):
        e = net.dag_edge(i)
        assert (net.tail[e], net.head[e]) == (net.v_out(u), net.v_in(v))
        assert net.demand[e] == 0
    assert net.demand.tolist() == [0] * n + [1] * n + [0] * (n + 2)


@given(st.integers(1, 30), st.sampled_from([0.0, 0.1, 0.3, 0.8]), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_reduction_is_topologically_ordered(n, p, seed):
    dag = gen_random_dag(n, p, seed)
    net = build_reduction(dag)
    assert net.edge_count == 3 * n + dag.m
    order = net.topological_nodes()
    assert sorted(order.tolist()) == list(range(net.node_count))
    pos = np.empty(net.node_count, int)
    pos[order] = np.arange(net.node_count)
    assert (pos[net.tail] < pos[net.head]).all()


def test_max_flow_examples():
    assert max_flow(2, [0], [1], [5], 0, 1)[0] == 5
    value, f = max_flow(4, [0, 1, 0, 2], [1, 3, 2, 3], [1, 1, 1, 1], 0, 3)
    assert value == 2 and f.tolist() == [1, 1, 1, 1]
    assert max_flow(3, [0], [1], [4], 0, 2)[0] == 0
    assert max_flow(2, [], [], [], 0, 1)[0] == 0


def random_network(rng, nn):
    edges = [(int(u), int(v), int(rng.integers(0, 5)))
             for u in range(nn) for v in range(nn) if u != v and rng.random() < 0.35]
    return edges


def test_max_flow_matches_cut_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(300):
        nn = int(rng.integers(2, 9))
        edges = random_network(rng, nn)
        tail = [u for u, _, _ in edges]
        head = [v for _, v, _ in edges]
        cap = [c for _, _, c in edges]
        value, f = max_flow(nn, tail, head, cap, 0, nn - 1)
        assert value == max_flow_by_cut_enumeration(nn, edges, 0, nn - 1)
        assert (f >= 0).all() and (f <= np.asarray(cap, dtype=np.int64)).all()
        balance = np.zeros(nn, np.int64)
        np.add.at(balance, np.asarray(head, dtype=np.int64), f)
        np.subtract.at(balance, np.asarray(tail, dtype=np.int64), f)
        assert balance[1:nn - 1].tolist() == [0] * (nn - 2)
        assert balance[nn - 1] == value


def test_max_flow_reverse_capacity():
    # edge 1->0 with reverse room 2 lets flow run 0->1 against it
    value, f = max_flow(2, [1], [0], [0], 0, 1, rev_cap=[2])
    assert value == 2 and f.tolist() == [-2]


def test_min_flow_examples():
    assert min_flow(build_reduction(Dag.from_edges(3))).size == 3
    assert min_flow(build_reduction(PATH3)).size == 1
    assert min_flow(build_reduction(gen_worst_case(3, 2))).size == 3


def test_feasible_flow_is_valid():
    net = build_reduction(gen_worst_case(2, 2))
    f0 = feasible_flow(net)
    check_flow(net, f0.flow)
    assert f0.size == net.n


def test_min_flow_on_corpus(dag_corpus):
    for _, dag in dag_corpus:
        net = build_reduction(dag)
        f = min_flow(net)
        check_flow(net, f.flow)
        assert (f.split_flow() >= 1).all()
        assert f.size == width_by_matching(dag) <= dag.n
        assert int(f.s_flow().sum()) == f.size


def test_min_flow_is_minimal_on_tiny_dags(dag_corpus):
    checked = 0
    for _, dag in dag_corpus:
        if dag.n <= 8:
            assert min_flow(build_reduction(dag)).size == min_path_cover_by_enumeration(dag)
            checked += 1
    assert checked > 20


def test_min_flow_is_immutable():
    f = min_flow(build_reduction(PATH3))
    with pytest.raises(ValueError):
        f.flow[0] = 3


def test_decompose_examples():
    assert decompose_to_mpc(PATH3, min_flow(build_reduction(PATH3))) == [[0, 1, 2]]
    two = Dag.from_edges(2)
    assert sorted(decompose_to_mpc(two, min_flow(build_reduction(two)))) == [[0], [1]]


def test_decompose_worst_case():
    dag = gen_worst_case(10, 10)
    paths = decompose_to_mpc(dag, min_flow(build_reduction(dag)))
    assert len(paths) == 10
    assert all(len(p) >= 10 + 2 for p in paths)
    assert sum(len(p) for p in paths) >= 100


def assert_path_cover(dag, paths, k):
    assert len(paths) == k
    edges = set(dag.edge_list())
    covered = set()
    for path in paths:
        covered.update(path)
        for u, v in zip(path, path[1:]):
            assert (u, v) in edges
    assert covered == set(range(dag.n))


def test_decompose_on_corpus(dag_corpus):
    for _, dag in dag_corpus:
        f = min_flow(build_reduction(dag))
        paths = decompose_to_mpc(dag, f)
        assert_path_cover(dag, paths, f.size)
        # the paths add back up to the flow on every split edge
        counts = np.bincount([v for p in paths for v in p], minlength=dag.n)
        assert counts.tolist() == f.split_flow().tolist()


def test_malformed_flows():
    net = build_reduction(PATH3)
    good = min_flow(net).flow
    bad = good.copy()
    bad[net.split_edge(1)] = 0
    with pytest.raises(MalformedFlow):
        decompose_to_mpc(PATH3, FlowAssignment(net, bad))
    assert conservation_violations(net, bad).tolist() == [net.v_in(1), net.v_out(1)]
    neg = good.copy()
    neg[0] = -1
    with pytest.raises(MalformedFlow):
        check_flow(net, neg, demands=False)
    with pytest.raises(MalformedFlow):
        check_flow(net, good[:-1])
    # conservation holds but a demand is unmet
    zero = np.zeros(net.edge_count, np.int64)
    check_flow(net, zero, demands=False)
    with pytest.raises(MalformedFlow):
        check_flow(net, zero)


def test_dump_lists_flow():
    net = build_reduction(PATH3)
    lines = net.dump(min_flow(net).flow).splitlines()
    assert len(lines) == 11
    assert lines[0] == "0 1 0 1"
    assert lines[3] == "1 2 1 1"
