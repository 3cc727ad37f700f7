import numpy as np
import pytest

from constants.constants import GENUS_ONE_ANGLE
from core.closed_forms import regular_closed_form
from core.errors import InadmissibleContourError
from core.genus import (
    EvalContext,
    ExpPolynomial,
    LaurentPolynomial,
    canonical_genus,
    dual_star,
    function_field_genus,
    genus_one_alphas,
)
from core.spectral import (
    cohomological_identity_sides,
    collision_scan,
    default_contour,
    density_conversion,
    eis_pairing,
    hermitian_norm,
    measure_conversion_factor,
    orbit_contribution,
    orbit_density,
    projector_PB,
    projector_langlands,
    projector_z,
    psi_shift_product,
    spectral_sum,
    spectral_support,
    surviving_elements,
)
from features.suites import g2_test_functions, group_data, sample_function_pairs


def _close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol * (1.0 + abs(complex(b)))


def _regular_points(rank, count, rng):
    return np.exp(rng.normal(0.0, 0.2, (count, rank)) + 2j * np.pi * rng.uniform(0.0, 1.0, (count, rank)))


@pytest.mark.parametrize('lattice', ['adjoint', 'simply_connected'])
def test_rank_one_decomposition(lattice, ctx_a1):
    rd, _, catalog = group_data('A1', lattice)
    for f1, f2 in sample_function_pairs(1, 5, 3, seed=7):
        lhs = eis_pairing(rd, ctx_a1, f1, f2, default_contour(rd, ctx_a1)).value
        rhs = spectral_sum(rd, ctx_a1, f1, f2, catalog)
        assert rhs.total is not None
        assert _close(lhs, rhs.total, 1e-9)


def test_contour_shift_does_not_matter(a2, ctx_rank_two, random_laurent):
    rd, _, _ = a2
    f1, f2 = random_laurent(2), random_laurent(2)
    a = eis_pairing(rd, ctx_rank_two, f1, f2, default_contour(rd, ctx_rank_two, 1.5, nodes=128)).value
    b = eis_pairing(rd, ctx_rank_two, f1, f2, default_contour(rd, ctx_rank_two, 2.0, nodes=128)).value
    assert _close(a, b, 1e-10)


def _genus_one_context(q):
    return EvalContext(q=q, genus=function_field_genus(genus_one_alphas(q, GENUS_ONE_ANGLE), q))


@pytest.mark.parametrize('lattice', ['adjoint', 'simply_connected'])
@pytest.mark.parametrize('q', [1.7, 2.0])
def test_rank_one_decomposition_for_a_genus_one_curve(lattice, q):
    rd, _, catalog = group_data('A1', lattice)
    ctx = _genus_one_context(q)
    for f1, f2 in sample_function_pairs(1, 5, 3, seed=5):
        lhs = eis_pairing(rd, ctx, f1, f2, default_contour(rd, ctx)).value
        rhs = spectral_sum(rd, ctx, f1, f2, catalog)
        assert rhs.total is not None
        assert _close(lhs, rhs.total, 1e-9)


def test_contour_shift_with_critical_zeros(a1, random_laurent):
    rd, _, _ = a1
    ctx = _genus_one_context(1.7)
    f1, f2 = random_laurent(1, 3), random_laurent(1, 3)
    a = eis_pairing(rd, ctx, f1, f2, default_contour(rd, ctx, 1.5)).value
    b = eis_pairing(rd, ctx, f1, f2, default_contour(rd, ctx, 2.0)).value
    assert _close(a, b, 1e-10)


def test_node_offset_and_refinement_do_not_matter(a1, ctx_a1, random_laurent):
    rd, _, _ = a1
    f1, f2 = random_laurent(1, 3), random_laurent(1, 3)
    contour = default_contour(rd, ctx_a1, nodes=256)
    base = eis_pairing(rd, ctx_a1, f1, f2, contour)
    turned = eis_pairing(rd, ctx_a1, f1, f2, contour.with_offset(0.3)).value
    doubled = eis_pairing(rd, ctx_a1, f1, f2, contour.with_nodes(512)).value
    assert _close(base.value, turned, 1e-12)
    assert _close(base.value, doubled, 1e-12)


@pytest.mark.slow
def test_rank_two_decomposition_for_a_genus_one_curve(a2):
    rd, _, catalog = a2
    ctx = _genus_one_context(1.5)
    assert any(c.startswith('moving') for orbit in catalog for c in collision_scan(rd, ctx, orbit))
    for f1, f2 in sample_function_pairs(2, 3, 2, seed=0):
        lhs = eis_pairing(rd, ctx, f1, f2, default_contour(rd, ctx, nodes=256)).value
        rhs = spectral_sum(rd, ctx, f1, f2, catalog)
        assert rhs.total is not None
        assert _close(lhs, rhs.total, 1e-8)


def test_inadmissible_contour(a1, ctx_a1):
    rd, _, _ = a1
    f = LaurentPolynomial.constant(1)
    with pytest.raises(InadmissibleContourError) as info:
        eis_pairing(rd, ctx_a1, f, f, default_contour(rd, ctx_a1, 0.5))
    assert info.value.violated


def test_langlands_projector_is_idempotent(a2, ctx_rank_two, random_laurent, rng):
    rd, _, _ = a2
    once = projector_langlands(rd, ctx_rank_two, random_laurent(2))
    twice = projector_langlands(rd, ctx_rank_two, once)
    x = _regular_points(2, 5, rng)
    np.testing.assert_allclose(twice(x), once(x), rtol=1e-10, atol=1e-10)


def test_projector_forms(a2, ctx_rank_two, random_laurent, rng):
    rd, _, _ = a2
    ctx = ctx_rank_two
    f = random_laurent(2)
    x = _regular_points(2, 5, rng)
    base = projector_PB(rd, ctx, f, 1, x)
    for w in rd.weyl:
        moved = projector_PB(rd, ctx, f, 1, ctx.apply_point(w.point_exponents, x))
        np.testing.assert_allclose(moved, base, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(projector_z(rd, ctx, f, 1, x), psi_shift_product(rd, ctx, x) * base,
                               rtol=1e-10, atol=1e-10)


def test_projector_at_a_non_regular_point(a1, ctx_a1):
    rd, _, _ = a1
    f = LaurentPolynomial({(1,): 1.0, (-1,): 0.5}, 1)
    near = projector_PB(rd, ctx_a1, f, 1, np.array([[1.0 + 1e-5]]))
    at = projector_PB(rd, ctx_a1, f, 1, np.array([[1.0]]))
    assert _close(at[0], near[0], 1e-4)


@pytest.mark.parametrize('label', ['A1', 'A2', 'G2'])
def test_density_forms_agree(label, ctx_rank_two, rng):
    rd, _, catalog = group_data(label)
    for orbit in catalog:
        for cls in orbit.classes:
            k = orbit.torus_rank
            u = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, (20, k))) if cls.toral and k else np.ones((1, k))
            psi_form = orbit_density(rd, ctx_rank_two, orbit, u, cls, form='psi')
            z_form = orbit_density(rd, ctx_rank_two, orbit, u, cls, form='z')
            np.testing.assert_allclose(z_form * density_conversion(rd, ctx_rank_two, orbit, u, cls), psi_form,
                                       rtol=1e-10, atol=1e-12)


def test_zero_orbit_keeps_every_weyl_element(a2):
    rd, _, catalog = a2
    assert len(surviving_elements(rd, catalog[0])) == len(rd.weyl)
    assert len(surviving_elements(rd, catalog[-1])) == 1


@pytest.mark.parametrize('label', ['A1', 'A2', 'G2'])
def test_regular_orbit_closed_form(label, ctx_rank_two):
    rd, _, catalog = group_data(label)
    regular = catalog[-1]
    for f1, f2 in sample_function_pairs(rd.rank, 3, 2, seed=3):
        value = orbit_contribution(rd, ctx_rank_two, regular, f1, f2).value
        assert _close(value, regular_closed_form(rd, ctx_rank_two, f1, f2), 1e-10)


def test_zero_orbit_reduced_form(a1, ctx_a1):
    rd, _, catalog = a1
    f1, f2 = sample_function_pairs(1, 4, 2, seed=11)[3]
    reduced = orbit_contribution(rd, ctx_a1, catalog[0], f1, f2, reduced=True).value
    general = orbit_contribution(rd, ctx_a1, catalog[0], f1, f2, reduced=False).value
    assert _close(reduced, general, 1e-8)


def test_moving_collision_is_reported_not_skipped(a1):
    rd, _, catalog = a1
    q = 1.7
    ctx = EvalContext(q=q, genus=canonical_genus(q, c=1.0 / q))
    found = collision_scan(rd, ctx, catalog[0])
    assert found and all(c.startswith('moving') for c in found)
    assert not collision_scan(rd, ctx, catalog[0], moving=False)
    assert not collision_scan(rd, ctx, catalog[-1])
    f = LaurentPolynomial.constant(1)
    assert orbit_contribution(rd, ctx, catalog[0], f, f).collisions


def test_fixed_collision_marks_the_orbit_skipped(a1):
    rd, _, catalog = a1
    ctx = EvalContext(q=1.7, genus=canonical_genus(1.7, c=1.0))
    regular = catalog[-1]
    assert collision_scan(rd, ctx, regular, moving=False)
    f = LaurentPolynomial.constant(1)
    contribution = orbit_contribution(rd, ctx, regular, f, f)
    assert contribution.skipped and contribution.collisions
    summed = spectral_sum(rd, ctx, f, f, catalog)
    assert summed.skipped and summed.total is None


def test_hermitian_norm_is_positive(a1, ctx_a1, random_laurent):
    rd, _, catalog = a1
    for _ in range(3):
        norm = hermitian_norm(rd, ctx_a1, random_laurent(1, 3), catalog)
        assert norm.real and norm.positive
        assert norm.total > 0


def test_rank_one_cohomological_identity(a1, ctx_additive):
    rd, _, catalog = a1
    f = ExpPolynomial({(0,): 1.0, (2,): 1.0}, rank=1)
    lhs, rhs = cohomological_identity_sides(rd, ctx_additive, f, catalog)
    assert _close(lhs.value, rhs.total, 1e-8)


def test_spectral_support_of_the_g2_subregular_orbit(g2, ctx_rank_two, ctx_additive):
    _, _, catalog = g2
    subregular = next(o for o in catalog if o.name == 'subregular')
    points = spectral_support(ctx_rank_two, subregular)
    assert [p.component_class for p in points] == ['1', '(12)', '(123)']
    assert len(spectral_support(ctx_additive, subregular)) == 1


def test_measure_conversion(a2, ctx_flat):
    rd, _, _ = a2
    assert measure_conversion_factor(rd, ctx_flat) == pytest.approx(1.0)


@pytest.mark.slow
@pytest.mark.parametrize('label', ['A2', 'G2'])
def test_rank_two_decomposition(label, ctx_rank_two):
    rd, _, catalog = group_data(label)
    pairs = sample_function_pairs(2, 3, 2, seed=5)
    if label == 'G2':
        f = g2_test_functions(5)[2]
        pairs.append((f, dual_star(f)))
    for f1, f2 in pairs:
        lhs = eis_pairing(rd, ctx_rank_two, f1, f2, default_contour(rd, ctx_rank_two)).value
        rhs = spectral_sum(rd, ctx_rank_two, f1, f2, catalog)
        assert rhs.total is not None
        assert _close(lhs, rhs.total, 1e-7)
