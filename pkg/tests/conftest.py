import numpy as np
import pytest

from spingate.hamiltonian import heisenberg_spec


@pytest.fixture(scope="session")
def spec3():
    return heisenberg_spec(3)


@pytest.fixture()
def rng():
    # fresh fixed-seed generator per test, so draw order inside one test
    # cannot leak into another
    return np.random.default_rng(1234)
