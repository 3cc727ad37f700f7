import numpy as np
import pytest

from core.genus import ADDITIVE, EvalContext, LaurentPolynomial, additive_genus, canonical_genus, constant_genus
from features.suites import group_data


@pytest.fixture(scope='session')
def a1():
    return group_data('A1', 'adjoint')


@pytest.fixture(scope='session')
def a1_sc():
    return group_data('A1', 'simply_connected')


@pytest.fixture(scope='session')
def a2():
    return group_data('A2', 'adjoint')


@pytest.fixture(scope='session')
def g2():
    return group_data('G2', 'adjoint')


@pytest.fixture
def ctx_a1():
    return EvalContext(q=1.7, genus=canonical_genus(1.7))


@pytest.fixture
def ctx_rank_two():
    return EvalContext(q=1.5, genus=canonical_genus(1.5))


@pytest.fixture
def ctx_flat():
    """psi = 1 at q = 2."""
    return EvalContext(q=2.0, genus=constant_genus(1.0))


@pytest.fixture
def ctx_additive():
    return EvalContext(q=1.0, genus=additive_genus(0.4), mode=ADDITIVE)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_laurent(rng):
    def make(rank, degree=2):
        return LaurentPolynomial.random(rank, degree, rng)
    return make
