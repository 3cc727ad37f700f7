import numpy as np
import pytest
from scipy import integrate

from core.errors import DivergenceError, PoleCollisionError
from core.quad import (
    ContourSpec,
    admissible_violations,
    cancellation_limit,
    line_integral,
    torus_integral,
    weyl_average,
)
from utils.helpers import retry_with_node_perturbation


@pytest.mark.parametrize('k', [-2, -1, 0, 1, 3])
def test_characters_are_orthonormal(k):
    result = torus_integral(lambda x: x[:, 0] ** k, ContourSpec(rank=1, shift=(1.0,), nodes=16))
    assert result.value == pytest.approx(1.0 if k == 0 else 0.0, abs=1e-13)


@pytest.mark.parametrize('radius, expected', [(2.0, 1.0), (0.5, 0.0)])
def test_geometric_series_depends_on_the_radius(radius, expected):
    result = torus_integral(lambda x: 1.0 / (1.0 - 1.0 / x[:, 0]), ContourSpec(rank=1, shift=(radius,), nodes=128))
    assert result.value == pytest.approx(expected, abs=1e-12)
    assert result.error_estimate < 1e-10


def test_rank_two_torus_integral():
    spec = ContourSpec(rank=2, shift=(1.5, 1.2), nodes=128)
    result = torus_integral(lambda x: 1.0 / ((1.0 - 1.0 / x[:, 0]) * (1.0 - 1.0 / (x[:, 0] * x[:, 1]))), spec)
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert result.nodes_used == 128 ** 2


def test_gaussian_line_integral():
    result = line_integral(lambda s: np.exp(s[:, 0] ** 2), ContourSpec(rank=1, shift=(0.0,)))
    assert result.value == pytest.approx(1.0 / (2.0 * np.sqrt(np.pi)), rel=1e-12)


def test_line_integral_against_adaptive_quadrature():
    def f(s):
        return (s + 0.3) ** 2 * np.exp(s ** 2)

    def real_part(u):
        return float(np.real(f(1j * u))) / (2 * np.pi)

    def imag_part(u):
        return float(np.imag(f(1j * u))) / (2 * np.pi)

    expected = integrate.quad(real_part, -8, 8)[0] + 1j * integrate.quad(imag_part, -8, 8)[0]
    shifted = line_integral(lambda s: f(s[:, 0]), ContourSpec(rank=1, shift=(0.5,)))
    assert shifted.value == pytest.approx(expected, abs=1e-10)


def test_line_window_widens_for_slow_decay():
    spec = ContourSpec(rank=1, shift=(0.0,))
    result = line_integral(lambda s: np.exp(0.3 * s[:, 0] ** 2), spec)
    assert result.value == pytest.approx(np.sqrt(np.pi / 0.3) / (2.0 * np.pi), rel=1e-12)
    assert result.nodes_used == 2 * spec.line_nodes - 1


def test_line_integral_detects_missing_decay():
    with pytest.raises(DivergenceError):
        line_integral(lambda s: np.ones(s.shape[0], dtype=complex), ContourSpec(rank=1, shift=(0.0,)))
    # decays, but only like |Im s|^-2
    with pytest.raises(DivergenceError):
        line_integral(lambda s: 1.0 / (1.0 - s[:, 0] ** 2), ContourSpec(rank=1, shift=(0.0,)))


def test_pole_on_a_node():
    spec = ContourSpec(rank=1, shift=(1.0,), nodes=8, offset=0.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        with pytest.raises(PoleCollisionError):
            torus_integral(lambda x: 1.0 / (x[:, 0] - 1.0), spec)


def test_retry_moves_the_node_offset():
    seen = []

    @retry_with_node_perturbation(max_retries=3, initial_step=0.01)
    def integrate_once(contour):
        seen.append(contour.offset)
        if contour.offset == 0.0:
            raise PoleCollisionError("node on a pole")
        return contour.offset

    assert integrate_once(ContourSpec(rank=1, shift=(1.0,), offset=0.0)) == pytest.approx(0.01)
    assert seen == [0.0, pytest.approx(0.01)]


def test_retry_gives_up():
    @retry_with_node_perturbation(max_retries=2)
    def always_fails(contour):
        raise PoleCollisionError("still on a pole")

    with pytest.raises(PoleCollisionError):
        always_fails(contour=ContourSpec(rank=1, shift=(1.0,)))


def test_cancellation_of_a_removable_singularity():
    result = cancellation_limit(lambda eps: 2.0 + 3.0 * eps)
    assert result.value == pytest.approx(2.0, abs=1e-12)
    result = cancellation_limit(lambda eps: (np.exp(eps) - 1.0) / eps)
    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_cancellation_batches():
    result = cancellation_limit(lambda eps: np.stack([np.sin(eps) / eps, np.cos(eps)], axis=-1))
    np.testing.assert_allclose(result.value, [1.0, 1.0], atol=1e-12)


def test_genuine_pole_is_reported():
    with pytest.raises(DivergenceError):
        cancellation_limit(lambda eps: 1.0 / eps)


def test_weyl_average_over_s3_classes():
    assert weyl_average([6.0, 2.0, 3.0], [1 / 6, 1 / 2, 1 / 3]) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        weyl_average([1.0], [0.5, 0.5])


def test_admissible_contours():
    positive = np.array([[1]])
    assert admissible_violations(positive, (2.0,), 1.7) == []
    assert admissible_violations(positive, (1.5,), 1.7) == [(1,)]
    assert admissible_violations(positive, (1.5,), 1.0, additive=True) == []
    assert admissible_violations(positive, (0.5,), 1.0, additive=True) == [(1,)]
