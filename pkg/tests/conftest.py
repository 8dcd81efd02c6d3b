import numpy as np
import pytest

from avnlab.hilbert import cluster_state


@pytest.fixture(scope="session")
def psi():
    return cluster_state()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
