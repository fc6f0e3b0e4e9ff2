from math import factorial

import numpy as np
import pytest

from chaosflow.chaos import ChaosVector
from chaosflow.tensors import SymmetricTensor, table_size


def random_chaos(rng, dim, degree, scale=1.0, grid=None) -> ChaosVector:
    """Random truncated chaos vector with N(0, scale^2/k!^2) coefficients."""
    tensors = []
    for k in range(degree + 1):
        vals = rng.standard_normal(table_size(k, dim)) * scale / factorial(k)
        tensors.append(SymmetricTensor(k, dim, vals))
    return ChaosVector(tuple(tensors), grid)


def random_contraction(rng, dim, norm=None):
    """Random matrix rescaled to operator norm <= 1 (or a given norm)."""
    m = rng.standard_normal((dim, dim))
    target = rng.uniform(0.2, 0.98) if norm is None else norm
    return m * (target / np.linalg.norm(m, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
