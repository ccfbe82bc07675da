"""Minimum chain covers of DAGs: flow reduction, minimum flow, and chain
extraction with trie-backed mergeable dictionaries."""
from ._jit import USE_NUMBA
from .chains import (
    ExtractionStats,
    Violation,
    extract_chains_from_flow,
    extract_mcd,
    extract_mcd_naive,
    validate_mcd,
)
from .dag import (
    ChainDecomposition,
    Dag,
    gen_random_dag,
    gen_worst_case,
    parse_chains,
    parse_dag,
    reaches,
    serialize_chains,
    serialize_dag,
    topological_sort,
)
from .errors import (
    ArgumentError,
    ChainCoverError,
    CycleDetected,
    MalformedFlow,
    ParseError,
    RankOutOfRange,
    SameHandle,
    SizeLimit,
    SizeOutOfRange,
    StaleHandle,
)
from .flow import (
    FlowAssignment,
    FlowNetwork,
    build_reduction,
    decompose_to_mpc,
    max_flow,
    min_flow,
)
from .trie import OpCounters, TriePartition, new_partition


def minimum_chain_decomposition(dag: Dag) -> ChainDecomposition:
    """Flow reduction, minimum flow, then trie-based chain extraction."""
    return extract_mcd(dag, min_flow(build_reduction(dag)))


__version__ = "0.1.0"
