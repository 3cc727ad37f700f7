from fractions import Fraction

import pytest

from core.liealg import (
    check_orbit_record,
    check_triple,
    class_character,
    dclp_dimension,
    orbit_catalog,
    record_to_dict,
    reflection_group_order,
    slice_character_identity_holds,
    springer_stratum_dimension,
    verify_jacobi,
    w_of_e,
)
from features.suites import G2_SUBREGULAR_CHARACTERS, group_data


@pytest.mark.parametrize('label, dims', [
    ('A1', [0, 2]),
    ('A2', [0, 4, 6]),
    ('B2', [0, 4, 6, 8]),
    ('G2', [0, 6, 8, 10, 12]),
])
def test_orbit_dimensions(label, dims):
    _, _, catalog = group_data(label)
    assert [o.orbit_dim for o in catalog] == dims


def test_g2_orbit_names(g2):
    _, _, catalog = g2
    assert [o.name for o in catalog] == ['zero', 'minimal', 'short_root', 'subregular', 'regular']


@pytest.mark.parametrize('label', ['A1', 'A2', 'B2', 'G2'])
def test_lie_algebra_and_records_are_consistent(label):
    rd, model, catalog = group_data(label)
    assert model.dimension == rd.rank + len(rd.roots)
    verify_jacobi(model)
    for orbit in catalog:
        check_triple(model, orbit.triple)
        check_orbit_record(model, orbit)
        assert slice_character_identity_holds(rd, orbit)
        assert sum(cls.weight for cls in orbit.classes) == 1


def test_regular_orbit_centralizer(g2, a2):
    for rd, _, catalog in (g2, a2):
        regular = catalog[-1]
        assert regular.name == 'regular'
        assert regular.c_e_dim == rd.rank
        assert len(w_of_e(regular)) == 1
        assert regular.torus_rank == 0


def test_zero_orbit_keeps_the_whole_weyl_group(a2):
    rd, _, catalog = a2
    zero = catalog[0]
    assert zero.is_zero
    assert zero.torus_rank == rd.rank
    assert zero.c_e_dim == rd.rank + len(rd.roots)


def test_g2_subregular_strata(g2):
    rd, _, catalog = g2
    subregular = next(o for o in catalog if o.name == 'subregular')
    assert subregular.c_e_dim == 4
    assert len(w_of_e(subregular)) == 2
    dclp = sorted(dclp_dimension(subregular, rd, w) for w in w_of_e(subregular))
    assert dclp == [0, 1]
    springer = [springer_stratum_dimension(subregular, rd, w) for w in w_of_e(subregular)]
    assert max(springer) == (subregular.c_e_dim - rd.rank) // 2
    outside = [w for w in rd.weyl if subregular.coset_of(w) not in w_of_e(subregular)]
    assert outside
    assert dclp_dimension(subregular, rd, outside[0]) is None


def test_g2_subregular_component_group(g2):
    _, _, catalog = g2
    subregular = next(o for o in catalog if o.name == 'subregular')
    assert [c.label for c in subregular.classes] == ['1', '(12)', '(123)']
    assert [c.weight for c in subregular.classes] == [Fraction(1, 6), Fraction(1, 2), Fraction(1, 3)]
    for (label, degree), trace in G2_SUBREGULAR_CHARACTERS.items():
        assert class_character(subregular, label, degree) == pytest.approx(trace, abs=1e-12)


def test_rescaled_representative_gives_the_same_record(a2):
    rd, model, catalog = a2
    rescaled = orbit_catalog(model, scales={'simple12': [2, 3]})
    before = next(o for o in catalog if o.name == 'regular')
    after = next(o for o in rescaled if o.name == 'regular')
    assert before.h_dominant == after.h_dominant
    assert before.multiplicity == after.multiplicity


def test_record_dict_is_json_ready(g2):
    _, _, catalog = g2
    payload = record_to_dict(catalog[3])
    assert payload['name'] == 'subregular'
    assert len(payload['component_classes']) == 3


@pytest.mark.parametrize('roots, k, order', [
    ([], 1, 1),
    ([(1,), (-1,)], 1, 2),
    ([(2, 1), (-2, -1)], 2, 2),
    ([(1, 0), (0, 1), (1, 1)], 2, 6),
    ([(1, 0), (0, 1), (1, 1), (1, 2)], 2, 8),
    ([(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)], 2, 12),
    ([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3, 8),
    ([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1)], 3, 24),
])
def test_reflection_group_order(roots, k, order):
    both = roots + [tuple(-v for v in r) for r in roots]
    assert reflection_group_order(both, k) == order


def test_centralizer_weyl_orders(a2, g2):
    for _, _, catalog in (a2, g2):
        for orbit in catalog[1:]:
            expected = 2 if orbit.phi_root_weights and orbit.torus_rank else 1
            assert orbit.weyl_phi_order == expected
