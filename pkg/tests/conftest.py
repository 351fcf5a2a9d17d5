import numpy as np
import pytest

GOLDEN = (1 + np.sqrt(5)) / 2

SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2


def ising_bond(J=1.0):
    return -J * np.kron(SZ, SZ)


def tfi_bond(J=1.0, g=1.0):
    return (-J * np.kron(SZ, SZ)
            - (g / 2) * (np.kron(SX, np.eye(2)) + np.kron(np.eye(2), SX)))


@pytest.fixture
def rng():
    return np.random.default_rng(0)
