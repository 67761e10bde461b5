import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

import normsketch

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(params=normsketch.available_backends())
def backend(request):
    with normsketch.use_backend(request.param):
        yield request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_csr(rng, n, d, density=0.3):
    A = sp.random(n, d, density=density, format="csr", random_state=rng,
                  data_rvs=rng.standard_normal)
    return normsketch.as_csr(A)
