import numpy as np
import pytest

from pwmctrl.model import ControlSystem, build_ten_level_system

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@pytest.fixture
def two_level() -> ControlSystem:
    """Driven qubit: sigma_z drift, sigma_x control."""
    return ControlSystem(drift=SIGMA_Z, controls=(SIGMA_X,))


@pytest.fixture
def ten_level() -> ControlSystem:
    return build_ten_level_system()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240815)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)
