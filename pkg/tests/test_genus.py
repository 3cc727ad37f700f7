import math

import numpy as np
import pytest

from core.errors import ConsistencyError, PoleCollisionError, SpectralError
from core.genus import (
    ADDITIVE,
    ChartFunction,
    EvalContext,
    ExpPolynomial,
    LaurentPolynomial,
    big_psi,
    bridge_genus,
    build_context,
    canonical_genus,
    check_hypotheses,
    function_field_genus,
    genus_one_alphas,
    laurent_data,
    little_z,
    psi_ratio,
    residue_at_q,
    z_of,
    z_ratio,
)


def test_flat_genus_values(ctx_flat):
    assert complex(z_of(ctx_flat, 3.0)) == pytest.approx(-1.5)
    assert little_z(ctx_flat) == pytest.approx(-1.0)
    z_m1, z_0 = laurent_data(ctx_flat)
    assert z_m1 == pytest.approx(1.0, abs=1e-12)
    assert z_0 == pytest.approx(1.0, abs=1e-12)


def test_functional_equation(ctx_a1, rng):
    x = np.exp(rng.uniform(-0.5, 0.5, 8) + 1j * rng.uniform(0, 2 * np.pi, 8)) * 1.3
    np.testing.assert_allclose(z_of(ctx_a1, x), z_of(ctx_a1, ctx_a1.q / x), rtol=1e-12)


def test_ratios_agree_with_quotients(ctx_a1, rng):
    y = np.exp(rng.uniform(-0.3, 0.3, 6) + 1j * rng.uniform(0.2, 2 * np.pi - 0.2, 6)) * 2.5
    np.testing.assert_allclose(z_ratio(ctx_a1, y), z_of(ctx_a1, y) / z_of(ctx_a1, ctx_a1.q * y), rtol=1e-10)
    np.testing.assert_allclose(psi_ratio(ctx_a1, y), big_psi(ctx_a1, y) / big_psi(ctx_a1, y / ctx_a1.q), rtol=1e-10)


def test_additive_ratios(ctx_additive):
    s = np.array([0.3 + 1.1j, -0.7 + 0.4j, 2.2 - 0.5j])
    np.testing.assert_allclose(z_ratio(ctx_additive, s), z_of(ctx_additive, s) / z_of(ctx_additive, s + 1.0),
                               rtol=1e-10)
    np.testing.assert_allclose(z_of(ctx_additive, s), z_of(ctx_additive, 1.0 - s), rtol=1e-12)


@pytest.mark.parametrize('fixture', ['ctx_flat', 'ctx_a1', 'ctx_rank_two', 'ctx_additive'])
def test_residue_at_q_is_one(fixture, request):
    ctx = request.getfixturevalue(fixture)
    assert residue_at_q(ctx) == pytest.approx(1.0, abs=1e-10)


def test_pole_collision(ctx_a1):
    with pytest.raises(PoleCollisionError):
        z_of(ctx_a1, 1.0)


def test_canonical_genus_satisfies_hypotheses(ctx_a1, ctx_additive):
    assert check_hypotheses(ctx_a1).passed
    assert check_hypotheses(ctx_additive).passed


def test_flat_genus_fails_positivity(ctx_flat):
    report = check_hypotheses(ctx_flat)
    assert not report.passed
    assert not report.conditions['positive_z1']
    assert report.conditions['analytic']


def test_zero_outside_critical_annulus():
    ctx = EvalContext(q=1.7, genus=canonical_genus(1.7, c=0.3))
    report = check_hypotheses(ctx)
    assert not report.conditions['critical_zeros']
    assert report.to_dict()['witnesses']['critical_zeros']


def test_function_field_genus_of_an_elliptic_curve():
    q = 2.0
    genus = function_field_genus(genus_one_alphas(q, 1.1), q)
    assert genus.params['genus'] == 1
    ctx = EvalContext(q=q, genus=genus)
    assert check_hypotheses(ctx).conditions['critical_zeros']
    for z in genus.zeros:
        assert abs(complex(genus(z))) < 1e-12


@pytest.mark.parametrize('q', [1.5, 1.7, 2.0])
def test_genus_one_zeros_of_z_lie_on_the_critical_circle(q):
    alphas = genus_one_alphas(q, 1.1)
    ctx = EvalContext(q=q, genus=function_field_genus(alphas, q))
    for a in alphas:
        assert abs(a) == pytest.approx(math.sqrt(q), rel=1e-12)
        assert abs(complex(z_of(ctx, a))) < 1e-12
        assert abs(complex(z_of(ctx, 1.2 * a))) > 1e-3
    # psi vanishes at 1/alpha
    assert {round(abs(complex(z)) * math.sqrt(q), 12) for z in ctx.genus.zeros} == {1.0}


def test_function_field_genus_rejects_bad_eigenvalues():
    with pytest.raises(ConsistencyError):
        function_field_genus([1.0 + 0j, 1.0 - 0j], 2.0)
    with pytest.raises(ConsistencyError):
        function_field_genus([math.sqrt(2.0) * 1j], 2.0)


def test_context_validation():
    with pytest.raises(SpectralError):
        EvalContext(q=0.9, genus=canonical_genus(1.7))
    with pytest.raises(SpectralError):
        EvalContext(q=1.7, genus=canonical_genus(1.7), mode=ADDITIVE)


def test_build_context_kinds():
    assert build_context(1.0, {'kind': 's_plus_c', 'c': 0.3}).additive
    assert build_context(1.7, {'kind': 'one_minus_c_over_x'}).genus.params['c'] == pytest.approx(0.8 / 1.7 + 0.2)
    with pytest.raises(SpectralError):
        build_context(1.7, {'kind': 'hyperbolic'})


def test_dual_star_on_the_unit_circle(random_laurent, rng):
    f = random_laurent(2)
    assert f.dual_star().dual_star().coeffs == f.coeffs
    x = np.exp(1j * rng.uniform(0, 2 * np.pi, (5, 2)))
    np.testing.assert_allclose(f.dual_star()(x), np.conj(f(x)), rtol=1e-12)


def test_laurent_log_gradient_matches_finite_differences():
    f = LaurentPolynomial({(2, -1): 1.5, (0, 3): -0.5j, (1, 1): 2.0}, 2)
    x = np.array([[1.2 + 0.3j, 0.8 - 0.1j]])
    h = 1e-6
    for k in range(2):
        step = np.zeros((1, 2), dtype=complex)
        step[0, k] = h * x[0, k]
        numeric = (f(x + step) - f(x - step)) / (2 * h)
        assert f.log_gradient(x)[0, k] == pytest.approx(complex(numeric[0]), rel=1e-6)


def test_exp_polynomial_gradient():
    f = ExpPolynomial({(1, 0): 1.0, (0, 2): 0.5 + 0.2j}, gram=np.diag([0.3, 0.2]), rank=2)
    s = np.array([[0.4 + 0.2j, -0.3 + 0.5j]])
    h = 1e-6
    grad = f.gradient(s)[0]
    for k in range(2):
        step = np.zeros((1, 2), dtype=complex)
        step[0, k] = h
        numeric = (f(s + step) - f(s - step)) / (2 * h)
        assert grad[k] == pytest.approx(complex(numeric[0]), rel=1e-6)


def test_bridge_genus_tends_to_the_additive_genus():
    q = 1.0 + 1e-4
    genus = bridge_genus(q, 0.4)
    assert complex(genus(q ** 0.3)) == pytest.approx(0.7, rel=1e-3)


def test_chart_pullback():
    f = ExpPolynomial({(1,): 1.0, (0,): 0.5}, gram=np.eye(1), rank=1)
    chart = ChartFunction(f, 1.3)
    s = np.array([[0.2 + 0.7j]])
    assert complex(chart(1.3 ** s)[0]) == pytest.approx(complex(f(s)[0]), rel=1e-12)
