import numpy as np
import pytest

from bwplace.topology import Topology


@pytest.fixture
def topo2():
    return Topology(np.array([[10.0, 4.0], [4.0, 10.0]]), cores_per_node=8)


@pytest.fixture
def topo4():
    # column 3 gives minbw (5, 10, 15, 20) for workers {3} -> weights .1/.2/.3/.4
    bw = np.full((4, 4), 12.0)
    bw[:, 3] = [5.0, 10.0, 15.0, 20.0]
    np.fill_diagonal(bw, [20.0, 20.0, 20.0, 20.0])
    bw[3, 3] = 20.0
    bw[:, 3] = [5.0, 10.0, 15.0, 20.0]
    return Topology(bw, cores_per_node=8)


def random_topology(rng, n, low=1.0, high=50.0, dominant=False):
    """Log-uniform random bandwidth matrix; ``dominant`` makes local bw the max."""
    bw = np.exp(rng.uniform(np.log(low), np.log(high), (n, n)))
    if dominant:
        np.fill_diagonal(bw, rng.uniform(high, 2 * high, n))
    return Topology(bw, cores_per_node=8)


def random_workers(rng, n, size=None):
    if size is None:
        size = int(rng.integers(1, n + 1))
    return frozenset(int(x) for x in rng.choice(n, size=size, replace=False))
