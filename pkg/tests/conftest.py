import numpy as np
import pytest

from chaincover import gen_random_dag, gen_worst_case

EDGE_PROBS = (0.05, 0.1, 0.3, 0.7)


def random_corpus(count=200, max_n=40, seed=2024):
    """Seeded random DAGs with n in [1, max_n] cycling through EDGE_PROBS."""
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, max_n + 1, size=count)
    return [
        (f"random-n{int(n)}-p{EDGE_PROBS[i % 4]}-s{i}",
         gen_random_dag(int(n), EDGE_PROBS[i % 4], seed=i))
        for i, n in enumerate(sizes)
    ]


def worst_case_corpus(max_k=8, max_l=8):
    return [
        (f"worst-k{k}-l{l}", gen_worst_case(k, l))
        for k in range(1, max_k + 1)
        for l in range(1, max_l + 1)
    ]


def corpus():
    return random_corpus() + worst_case_corpus()


@pytest.fixture(scope="session")
def dag_corpus():
    return corpus()
