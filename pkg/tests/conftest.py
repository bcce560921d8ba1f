import hypothesis
import numpy as np
import pytest

from raqst.core import build_pauli_basis

hypothesis.settings.register_profile(
    "ci", derandomize=True, max_examples=50, deadline=None
)
hypothesis.settings.load_profile("ci")


@pytest.fixture(scope="session")
def basis():
    return build_pauli_basis(2)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_density_matrix(rng, dim=4, rank=None):
    """Hilbert-Schmidt-ish random state: G G^dag normalized."""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real
