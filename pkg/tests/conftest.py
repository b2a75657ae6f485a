import numpy as np
import pytest

from boxalg.algebra import parse_catalog_tag

CORE_TAGS = ["H3(R)", "H3(C)", "H3(H)", "H3(O)", "H4(R)", "H4(C)"]


@pytest.fixture(scope="session")
def catalog():
    """Lazy tag -> AlgebraSpec lookup shared by the whole session."""
    return parse_catalog_tag


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / 2
