import numpy as np
import pytest

from dagrisk import CategoricalDataset, VariableSpec, sample_network
from dagrisk.modelspace import DagModel

BENCHMARK_NAMES = ("X1", "X2", "X3", "X4", "X5")
BENCHMARK_PARENTS = ((), (0,), (0,), (1, 2), (3,))
BENCHMARK_SEED = 7


def benchmark_network():
    """5-node binary network with strong conditional tables."""
    dag = DagModel(BENCHMARK_NAMES, BENCHMARK_PARENTS)
    variables = [
        VariableSpec(n, (f"{n.lower()}a", f"{n.lower()}b")) for n in BENCHMARK_NAMES
    ]
    cpts = [
        np.array([[0.4, 0.6]]),
        np.array([[0.9, 0.1], [0.1, 0.9]]),
        np.array([[0.8, 0.2], [0.15, 0.85]]),
        np.array([[0.95, 0.05], [0.1, 0.9], [0.2, 0.8], [0.85, 0.15]]),
        np.array([[0.9, 0.1], [0.05, 0.95]]),
    ]
    return variables, dag, cpts


@pytest.fixture(scope="session")
def benchmark_dataset() -> CategoricalDataset:
    variables, dag, cpts = benchmark_network()
    return sample_network(variables, dag, cpts, 5000, seed=BENCHMARK_SEED)


@pytest.fixture()
def tiny_dataset() -> CategoricalDataset:
    """The 3-row two-variable sample used across scoring examples."""
    import io

    from dagrisk import load_csv

    return load_csv(io.StringIO("A,B\na1,b1\na1,b2\na2,b1\n"))


@pytest.fixture()
def empty_dataset() -> CategoricalDataset:
    variables = (
        VariableSpec("A", ("a1", "a2")),
        VariableSpec("B", ("b1", "b2")),
    )
    return CategoricalDataset(variables, np.empty((0, 2), dtype=np.int64))
