import pytest

from constants.constants import GENUS_ONE_ANGLE
from core.errors import SpectralError
from core.genus import genus_one_alphas
from features.suites import run_suite, sample_function_pairs
from utils.config import CheckerConfig, QuadratureConfig
from utils.report import FAIL, PASS


def _config(**overrides):
    base = dict(q=1.7, groups=[{'type': 'A1', 'lattice': 'adjoint'}], pairs=3, seed=0, degree=2,
                quadrature=QuadratureConfig(nodes=256))
    base.update(overrides)
    return CheckerConfig(**base)


def test_sample_pairs_start_with_monomials():
    pairs = sample_function_pairs(2, 5, 2, seed=1)
    assert len(pairs) == 5
    assert all(len(f.coeffs) == 1 for f, _ in pairs[:3])
    additive = sample_function_pairs(1, 2, 2, seed=1, additive=True)
    assert all(hasattr(f, 'gradient') for f, _ in additive)


def test_main_suite_passes_on_rank_one():
    report = run_suite('main', _config())
    assert report.passed, report.to_table()
    assert report.counts[PASS] == 3


def test_corrupted_density_is_caught():
    report = run_suite('main', _config(density_perturbation={'orbit': 'regular', 'factor': 1.01}))
    assert not report.passed
    assert report.counts[FAIL] >= 1


def test_unexpected_error_is_recorded_as_a_failure(monkeypatch):
    def broken(*args, **kwargs):
        raise ValueError("cannot reshape")

    monkeypatch.setattr('features.suites.spectral_sum', broken)
    report = run_suite('main', _config())
    assert not report.passed
    assert report.counts[FAIL] == 3
    assert all('ValueError' in case.message for case in report.cases)


def test_structural_suite_on_rank_one():
    report = run_suite('structural', _config())
    assert report.passed, report.to_table()
    names = [c.name for c in report.cases]
    assert 'scissor' in names
    assert any(name.endswith('/strata') for name in names)


def test_positivity_suite():
    report = run_suite('positivity', _config(positivity_samples=2))
    assert report.passed, report.to_table()


def test_unknown_suite():
    with pytest.raises(SpectralError):
        run_suite('everything', _config())


@pytest.mark.slow
def test_g2_regression_suite():
    report = run_suite('g2', _config(q=1.5, groups=[{'type': 'G2', 'lattice': 'adjoint'}]))
    assert report.passed, report.to_table()


@pytest.mark.slow
def test_cohomology_suite():
    report = run_suite('cohomology', _config(genus={'kind': 's_plus_c', 'c': 0.4}, q=1.0))
    assert report.passed, report.to_table()


@pytest.mark.slow
def test_positivity_over_a_hundred_samples():
    report = run_suite('positivity', _config())
    assert report.counts[PASS] == 100, report.to_table()


@pytest.mark.slow
def test_main_suite_on_a2_with_genus_one_curve():
    q = 1.5
    alphas = [[a.real, a.imag] for a in genus_one_alphas(q, GENUS_ONE_ANGLE)]
    report = run_suite('main', _config(q=q, groups=[{'type': 'A2', 'lattice': 'adjoint'}],
                                       genus={'kind': 'function_field', 'alphas': alphas}))
    assert report.passed, report.to_table()
    assert report.counts[PASS] == 3
