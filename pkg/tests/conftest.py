# tests/conftest.py
import numpy as np
import pytest

from rmt.app import create_runner
from rmt.services.ensembles import RngStream, sample_spectra


@pytest.fixture
def rng():
    return np.random.default_rng(20040125)


@pytest.fixture
def runner():
    return create_runner(workers=1)


@pytest.fixture(scope="session")
def hse_oracle_n2():
    """Eigenvalues of 40000 HSE matrices, N=2, reference scale 1/2."""
    return sample_spectra(2, 0.5, 40000, RngStream(7, 0))
