import numpy as np
import pytest

from core.errors import ConsistencyError, UnsupportedTypeError
from core.rootsys import (
    build_root_system,
    dominant_conjugate,
    exponents_from_heights,
    height_identity_holds,
    root_datum_to_dict,
)


@pytest.mark.parametrize('label, heights, exponents, order', [
    ('A1', [1], (1,), 2),
    ('A2', [1, 1, 2], (1, 2), 6),
    ('B2', [1, 1, 2, 3], (1, 3), 8),
    ('G2', [1, 1, 2, 3, 4, 5], (1, 5), 12),
])
def test_heights_exponents_and_weyl_order(label, heights, exponents, order):
    rd = build_root_system(label)
    assert sorted(rd.heights) == heights
    assert rd.exponents == exponents
    assert len(rd.weyl) == order
    assert height_identity_holds(rd)


@pytest.mark.parametrize('label', ['A1', 'A2', 'B2', 'C2', 'G2'])
@pytest.mark.parametrize('lattice', ['adjoint', 'simply_connected'])
def test_longest_element_inverts_every_positive_root(label, lattice):
    rd = build_root_system(label, lattice)
    w0 = rd.w0
    assert w0.length == rd.n_positive
    assert len(rd.inversions(w0)) == rd.n_positive
    assert rd.inversions(rd.identity) == []


@pytest.mark.parametrize('label, lattice, order', [
    ('A1', 'adjoint', 1),
    ('A1', 'simply_connected', 2),
    ('A2', 'adjoint', 1),
    ('A2', 'simply_connected', 3),
    ('G2', 'adjoint', 1),
])
def test_center_order(label, lattice, order):
    assert build_root_system(label, lattice).center.order == order


def test_roots_are_positives_then_negatives():
    rd = build_root_system('A2')
    n = rd.n_positive
    np.testing.assert_array_equal(rd.roots[n:], -rd.roots[:n])
    assert rd.is_positive(rd.roots[0])
    assert not rd.is_positive(rd.roots[n])


def test_exponents_from_inconsistent_heights():
    with pytest.raises(ConsistencyError):
        exponents_from_heights([1, 2, 2], 1)


def test_unknown_type():
    with pytest.raises(UnsupportedTypeError):
        build_root_system('E8')


def test_dominant_conjugate_of_negative_rho_check():
    rd = build_root_system('G2')
    _, image = dominant_conjugate(rd, [-v for v in rd.rho_check])
    assert list(image) == list(rd.rho_check)


def test_dict_lists_g2_heights():
    payload = root_datum_to_dict(build_root_system('G2'))
    assert payload['heights'] == [1, 1, 2, 3, 4, 5]
    assert payload['weyl_order'] == 12
