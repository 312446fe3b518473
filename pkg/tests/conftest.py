import numpy as np
import pytest


def crandn(rng, *shape):
    return rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
