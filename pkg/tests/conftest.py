import numpy as np
import pytest

from hmsim.hilbert import StateVector, UnitaryMap

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def random_state(rng: np.random.Generator, dim: int) -> StateVector:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(v / np.linalg.norm(v))


def random_unitary(rng: np.random.Generator, dim: int) -> UnitaryMap:
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return UnitaryMap(q)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
