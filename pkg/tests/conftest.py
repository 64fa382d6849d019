import numpy as np
import pytest

from uniqlab import interpolation as interp
from uniqlab import products, uniqueness


@pytest.fixture(scope="session")
def sinc_model():
    """Canonical product with zeros at the positive integers, n_trunc 1e4."""
    return products.make_product_model(products.linear_zeros(1.0, 10_000))


@pytest.fixture(scope="session")
def sel_2n():
    """Selection T' = {2, 4, 6, ...} from T = N, L=2, m=1, h=1.5."""
    T = np.arange(1.0, 6001.0)
    return interp.select_uniform_subsequence(T, 2.0, 1, 1.5, start_n=1)


@pytest.fixture(scope="session")
def interp_ones(sel_2n):
    return interp.make_interpolant(sel_2n, np.ones(sel_2n.t_prime.size),
                                   n_terms=500)


@pytest.fixture(scope="session")
def hermite21():
    basis = uniqueness.HermiteBasis(21)
    basis.validate()
    return basis
