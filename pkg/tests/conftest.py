import numpy as np
import pytest

from greenstream import PopulationConfig, generate


@pytest.fixture(scope="session")
def default_pop():
    return generate(PopulationConfig(seed=1))


@pytest.fixture(scope="session")
def small_pops():
    """A handful of small populations for randomized property checks."""
    return [generate(PopulationConfig(n_users=n, seed=s))
            for n, s in [(10, 0), (25, 1), (50, 2), (7, 3)]]


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
