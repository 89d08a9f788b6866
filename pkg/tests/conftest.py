import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_hermitian(rng, dim, n=1):
    a = rng.normal(size=(n, dim, dim)) + 1j * rng.normal(size=(n, dim, dim))
    h = (a + np.conj(np.swapaxes(a, -1, -2))) / 2.0
    return h if n > 1 else h[0]


def random_state(rng, norm2=2.0):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v * np.sqrt(norm2) / np.linalg.norm(v)
