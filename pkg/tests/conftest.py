import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def uniform_sphere(rng, M, dim=3):
    p = rng.normal(size=(M, dim))
    return p / np.linalg.norm(p, axis=1, keepdims=True)
