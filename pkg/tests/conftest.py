import numpy as np
import pytest

from fasisac.config import SystemConfig


@pytest.fixture
def cfg():
    return SystemConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_psd(rng, n, rank=None, scale=1.0):
    rank = n if rank is None else rank
    A = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    W = A @ A.conj().T
    return scale * W / np.trace(W).real


def random_phases(rng, shape):
    return np.exp(1j * rng.uniform(0, 2 * np.pi, shape))
