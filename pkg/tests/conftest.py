import numpy as np
import pytest

from diskflow.basis import stokes_basis


@pytest.fixture(scope="session")
def basis13():
    """Shared mode table large enough for every n,k <= 13 test."""
    return stokes_basis(13, 13)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
