import numpy as np
import pytest

from iodalg.matrix import adjoint


def random_matrix(rng, dim):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return z / np.sqrt(dim)


def random_hermitian(rng, dim):
    a = random_matrix(rng, dim)
    return (a + adjoint(a)) / 2


def random_psd(rng, dim):
    z = random_matrix(rng, dim)
    return z @ adjoint(z)


def block_sum(a, family):
    """Direct recomposition: sum over all pairs of p_i a p_j."""
    return sum(p @ a @ q for p in family.members for q in family.members)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)
