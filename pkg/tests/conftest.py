import numpy as np
import pytest

from starwave.quadrature import get_basis


@pytest.fixture(scope="session")
def basis_n6():
    return get_basis(6.0, size=64)


@pytest.fixture(scope="session")
def basis_n6_small():
    return get_basis(6.0, size=32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
