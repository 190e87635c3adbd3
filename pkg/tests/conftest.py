import numpy as np
import pytest

from formlab import CubicalComplex


@pytest.fixture(scope="session")
def torus444():
    return CubicalComplex([4, 4, 4])


@pytest.fixture(scope="session")
def torus888():
    return CubicalComplex([8, 8, 8])


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
