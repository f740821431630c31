import numpy as np
import pytest


def rand_complex(rng: np.random.Generator, dim: int) -> np.ndarray:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def rand_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rand_complex(rng, dim)
    return (g + g.conj().T) / 2


def rand_psd(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rand_complex(rng, dim)
    return g.conj().T @ g


def rand_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    p = rand_psd(rng, dim)
    return p / np.trace(p).real


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
