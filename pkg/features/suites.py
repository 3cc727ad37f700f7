"""
Verification suites: each builds its inputs from a CheckerConfig, runs the
identities case by case and returns a VerificationReport. A failing case is
recorded and the suite carries on.
"""

from typing import Callable, Dict, List, Optional, Tuple
import itertools
import logging
import time

import numpy as np

from constants.constants import (
    ADDITIVE_C,
    ALTERNATE_SHIFT,
    ANCHORS,
    DEFAULT_Q_RANK_TWO,
    DEFAULT_SHIFT,
    GENUS_ONE_ANGLE,
    TOL_ADDITIVE,
    TOL_G2,
    TOL_POSITIVITY,
    TOL_RANK_ONE,
    TOL_RANK_TWO,
    TOL_REGRESSION,
    TOL_REGULAR,
    TOL_SHIFT,
)
from core.closed_forms import (
    additive_g2_closed_form,
    g2_subregular_closed_forms,
    genus_mode_bridge,
    langlands_g2_match,
    regular_closed_form,
    regular_residues,
    scissor_sides,
)
from core.errors import SpectralError
from core.genus import (
    ADDITIVE,
    EvalContext,
    ExpPolynomial,
    LaurentPolynomial,
    additive_genus,
    build_context,
    canonical_genus,
    genus_one_alphas,
)
from core.liealg import (
    build_lie_algebra,
    check_orbit_record,
    class_character,
    dclp_dimension,
    orbit_catalog,
    slice_character_identity_holds,
    springer_stratum_dimension,
    w_of_e,
)
from core.rootsys import build_root_system, height_identity_holds
from core.spectral import (
    default_contour,
    density_conversion,
    eis_pairing,
    hermitian_norm,
    cohomological_identity_sides,
    orbit_contribution,
    orbit_density,
    projector_PB,
    projector_langlands,
    projector_z,
    psi_shift_product,
    spectral_sum,
    surviving_elements,
)
from utils.config import CheckerConfig
from utils.report import VerificationReport

logger = logging.getLogger(__name__)

BRIDGE_DELTAS = (0.1, 0.05, 0.025)

# Traces of the S3 classes on g_2^e = C^2 + 1 and g_4^e = sgn
G2_SUBREGULAR_CHARACTERS = {
    ('1', 2): 3, ('(12)', 2): 1, ('(123)', 2): 0,
    ('1', 4): 1, ('(12)', 4): -1, ('(123)', 4): 1,
}


# shared inputs


_GROUP_CACHE: Dict[Tuple[str, str], tuple] = {}


def group_data(type_label: str, lattice: str = 'adjoint'):
    """(root datum, Lie algebra model, orbit catalog), built once per process."""
    key = (type_label, lattice)
    if key not in _GROUP_CACHE:
        rd = build_root_system(type_label, lattice)
        model = build_lie_algebra(rd)
        _GROUP_CACHE[key] = (rd, model, orbit_catalog(model))
    return _GROUP_CACHE[key]


def case_context(config: CheckerConfig, q: Optional[float] = None) -> EvalContext:
    """Context for the configured genus; a function-field genus without alphas gets genus one."""
    q = config.q if q is None else q
    spec = config.genus_spec()
    if spec['kind'] == 'function_field' and not spec.get('alphas'):
        spec['alphas'] = [[a.real, a.imag] for a in genus_one_alphas(q, GENUS_ONE_ANGLE)]
    return build_context(q, spec)


def multiplicative_context(config: CheckerConfig) -> EvalContext:
    if config.additive:
        return EvalContext(q=DEFAULT_Q_RANK_TWO, genus=canonical_genus(DEFAULT_Q_RANK_TWO))
    return case_context(config)


def additive_context(config: CheckerConfig) -> EvalContext:
    c = config.genus_spec().get('c', ADDITIVE_C) if config.additive else ADDITIVE_C
    return EvalContext(q=1.0, genus=additive_genus(c), mode=ADDITIVE)


def sample_function_pairs(rank: int, count: int, degree: int, seed: int, additive: bool = False) -> List[tuple]:
    """A few monomial pairs from the box {-1, 0, 1}^r followed by seeded random pairs."""
    rng = np.random.default_rng(seed)
    pairs = []
    if additive:
        for _ in range(count):
            pairs.append(tuple(ExpPolynomial(_random_poly(rank, rng), rank=rank) for _ in range(2)))
        return pairs
    box = list(itertools.product(range(-1, 2), repeat=rank))
    for i in range(min(3, count)):
        pairs.append((LaurentPolynomial.monomial(box[(len(box) // 2 + i) % len(box)]), LaurentPolynomial.monomial(box[i])))
    while len(pairs) < count:
        pairs.append((LaurentPolynomial.random(rank, degree, rng), LaurentPolynomial.random(rank, degree, rng)))
    return pairs


def _random_poly(rank: int, rng: np.random.Generator) -> Dict[tuple, complex]:
    coeffs = {}
    for lam in itertools.product(range(3), repeat=rank):
        if sum(lam) <= 2:
            coeffs[lam] = complex(rng.normal(), rng.normal())
    return coeffs


def _tolerance(config: CheckerConfig, rd) -> float:
    if config.tolerance is not None:
        return config.tolerance
    if rd.rank == 1:
        return TOL_RANK_ONE
    return TOL_G2 if rd.type_label == 'G2' else TOL_RANK_TWO


def _contour(rd, ctx, config: CheckerConfig, kappa: Optional[float] = None):
    quad = config.quadrature
    kwargs = {'trunc_height': quad.trunc_height, 'line_nodes': quad.line_nodes}
    if quad.offset is not None:
        kwargs['offset'] = quad.offset
    return default_contour(rd, ctx, kappa or quad.shift, nodes=quad.nodes, **kwargs)


def _random_regular_points(rank: int, count: int, rng: np.random.Generator) -> np.ndarray:
    return np.exp(rng.normal(0.0, 0.2, (count, rank)) + 2j * np.pi * rng.uniform(0.0, 1.0, (count, rank)))


def _max_rel(a, b) -> float:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(b))))


def _new_report(suite: str, config: CheckerConfig) -> VerificationReport:
    return VerificationReport(suite=suite, environment=config.to_dict(), timezone=config.timezone)


# suites


def run_main_identity_suite(config: CheckerConfig) -> VerificationReport:
    """Contour pairing against the orbit sum for every configured group and test-function pair."""
    report = _new_report('main', config)
    anchor = ANCHORS['main']
    for group in config.groups:
        rd, _, catalog = group_data(group['type'], group['lattice'])
        ctx = additive_context(config) if config.additive else case_context(config)
        tol = _tolerance(config, rd)
        pairs = sample_function_pairs(rd.rank, config.pairs, config.degree, config.seed, additive=ctx.additive)
        for index, (f1, f2) in enumerate(pairs):
            name = f"{rd.label}/pair{index}"
            inputs = {'group': rd.label, 'f1': f1.to_dict(), 'f2': f2.to_dict(), 'context': ctx.describe()}
            started = time.perf_counter()
            try:
                lhs = eis_pairing(rd, ctx, f1, f2, _contour(rd, ctx, config)).value
                rhs = spectral_sum(rd, ctx, f1, f2, catalog, density_perturbation=config.density_perturbation)
                if rhs.total is None:
                    collisions = [c for part in rhs.contributions for c in part.collisions]
                    report.skip(name, anchor, f"orbit integrals undefined: {collisions[:3]}", inputs)
                    continue
                inputs['orbits'] = {c.orbit: c.value for c in rhs.contributions}
                report.compare(name, anchor, lhs, rhs.total, tol, inputs, started=started)
            except Exception as e:
                logger.error(f"Main identity case {name} failed: {e}", exc_info=True)
                report.error(name, anchor, e, inputs)
    return report


def run_structural_suite(config: CheckerConfig) -> VerificationReport:
    """Exact orbit data, strata dimensions, characters and the projector identities."""
    report = _new_report('structural', config)
    rng = np.random.default_rng(config.seed)
    ctx = multiplicative_context(config)
    for group in config.groups:
        label = f"{group['type']}/{group['lattice']}"
        try:
            rd, model, catalog = group_data(group['type'], group['lattice'])
        except Exception as e:
            logger.error(f"Could not build {label}: {e}", exc_info=True)
            report.error(f"{label}/build", ANCHORS['heights'], e)
            continue
        report.check(f"{label}/heights", ANCHORS['heights'], height_identity_holds(rd))
        for orbit in catalog:
            _orbit_structure_cases(report, rd, model, orbit, label)
        _projector_cases(report, rd, ctx, catalog, rng, label)
        _density_cases(report, rd, ctx, catalog, rng, label)
        try:
            f1, f2 = sample_function_pairs(rd.rank, 4, config.degree, config.seed)[3]
            a = eis_pairing(rd, ctx, f1, f2, _contour(rd, ctx, config, DEFAULT_SHIFT)).value
            b = eis_pairing(rd, ctx, f1, f2, _contour(rd, ctx, config, ALTERNATE_SHIFT)).value
            report.compare(f"{label}/shift", ANCHORS['shift'], a, b, TOL_SHIFT)
        except Exception as e:
            logger.error(f"Shift invariance failed on {label}: {e}", exc_info=True)
            report.error(f"{label}/shift", ANCHORS['shift'], e)
    try:
        rank_one = multiplicative_context(config)
        f = LaurentPolynomial({(1,): 1.0, (0,): 2.0, (-1,): 1.0}, 1)
        difference, expected = scissor_sides(rank_one, f)
        report.compare('scissor', ANCHORS['scissor'], difference, expected, TOL_SHIFT)
    except Exception as e:
        logger.error(f"Scissor check failed: {e}", exc_info=True)
        report.error('scissor', ANCHORS['scissor'], e)
    return report


def _orbit_structure_cases(report: VerificationReport, rd, model, orbit, label: str) -> None:
    name = f"{label}/{orbit.name}"
    try:
        check_orbit_record(model, orbit)
        report.check(f"{name}/selfdual", ANCHORS['selfdual'], True)
    except Exception as e:
        report.error(f"{name}/selfdual", ANCHORS['selfdual'], e)
    report.check(f"{name}/slice", ANCHORS['slice'], slice_character_identity_holds(rd, orbit))

    survivors = surviving_elements(rd, orbit)
    if orbit.is_zero:
        report.check(f"{name}/w_of_e", ANCHORS['w_of_e'], len(survivors) == len(rd.weyl),
                     message=f"{len(survivors)} elements")
    elif orbit.name == 'regular':
        report.check(f"{name}/w_of_e", ANCHORS['w_of_e'], len(w_of_e(orbit)) == 1,
                     message=f"{len(w_of_e(orbit))} cosets")

    dclp = [dclp_dimension(orbit, rd, w) for w in w_of_e(orbit)]
    springer = [springer_stratum_dimension(orbit, rd, w) for w in w_of_e(orbit)]
    fiber = (orbit.c_e_dim - rd.rank) // 2
    ok = (all(d is not None and d >= 0 for d in dclp)
          and all(s is not None and d is not None and s >= d for s, d in zip(springer, dclp))
          and max(springer) == fiber)
    report.check(f"{name}/strata", ANCHORS['strata'], ok, {'dclp': dclp, 'springer': springer, 'fiber': fiber})

    if rd.type_label == 'G2' and orbit.name == 'subregular':
        values = {f"{cls}@{i}": class_character(orbit, cls, i) for cls, i in G2_SUBREGULAR_CHARACTERS}
        ok = all(abs(values[f"{cls}@{i}"] - v) < 1e-12 for (cls, i), v in G2_SUBREGULAR_CHARACTERS.items())
        report.check(f"{name}/characters", ANCHORS['characters'], ok, {'traces': values})


def _projector_cases(report: VerificationReport, rd, ctx, catalog, rng, label: str) -> None:
    f = LaurentPolynomial.random(rd.rank, 2, rng)
    x = _random_regular_points(rd.rank, 5, rng)
    try:
        once = projector_langlands(rd, ctx, f)
        twice = projector_langlands(rd, ctx, once)
        err = _max_rel(twice(x), once(x))
        report.check(f"{label}/idempotent", ANCHORS['idempotent'], err < TOL_SHIFT, message=f"{err:.2e}")

        base = projector_PB(rd, ctx, f, 1, x)
        moved = max(_max_rel(projector_PB(rd, ctx, f, 1, ctx.apply_point(w.point_exponents, x)), base)
                    for w in rd.weyl)
        report.check(f"{label}/w_invariance", ANCHORS['idempotent'], moved < TOL_SHIFT, message=f"{moved:.2e}")

        symmetric = projector_z(rd, ctx, f, 1, x)
        expected = psi_shift_product(rd, ctx, x) * base
        err = _max_rel(symmetric, expected)
        report.check(f"{label}/symmetric_projector", ANCHORS['symmetric_projector'], err < TOL_SHIFT,
                     message=f"{err:.2e}")
    except Exception as e:
        logger.error(f"Projector checks failed on {label}: {e}", exc_info=True)
        report.error(f"{label}/projectors", ANCHORS['idempotent'], e)


def _density_cases(report: VerificationReport, rd, ctx, catalog, rng, label: str, samples: int = 100) -> None:
    for orbit in catalog:
        worst = 0.0
        try:
            for cls in orbit.classes:
                k = orbit.torus_rank
                if cls.toral and k:
                    u = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, (samples, k)))
                else:
                    u = np.ones((1, k), dtype=complex)
                psi_form = orbit_density(rd, ctx, orbit, u, cls, form='psi')
                z_form = orbit_density(rd, ctx, orbit, u, cls, form='z') * density_conversion(rd, ctx, orbit, u, cls)
                worst = max(worst, _max_rel(psi_form, z_form))
            report.check(f"{label}/{orbit.name}/density", ANCHORS['density'], worst < TOL_SHIFT,
                         message=f"{worst:.2e}")
        except Exception as e:
            report.error(f"{label}/{orbit.name}/density", ANCHORS['density'], e)


def run_g2_regression(config: CheckerConfig) -> VerificationReport:
    """Regular-orbit closed forms and residues per group; G2 subregular closed forms; the additive template."""
    report = _new_report('g2_regression', config)
    ctx = multiplicative_context(config)
    for group in config.groups:
        rd, _, catalog = group_data(group['type'], group['lattice'])
        label = rd.label
        regular = next(o for o in catalog if o.name == 'regular')
        for index, (f1, f2) in enumerate(sample_function_pairs(rd.rank, 2, config.degree, config.seed)):
            try:
                value = orbit_contribution(rd, ctx, regular, f1, f2).value
                report.compare(f"{label}/regular{index}", ANCHORS['regular'], value,
                               regular_closed_form(rd, ctx, f1, f2), TOL_REGULAR)
            except Exception as e:
                report.error(f"{label}/regular{index}", ANCHORS['regular'], e)
        for root, residue in regular_residues(rd, ctx).items():
            report.compare(f"{label}/residue{root}", ANCHORS['residue'], residue, 1.0, TOL_REGULAR)

    rd, _, catalog = group_data('G2', 'adjoint')
    subregular = next(o for o in catalog if o.name == 'subregular')
    for index, f in enumerate(g2_test_functions(config.seed)):
        name = f"G2/subregular{index}"
        try:
            contribution = orbit_contribution(rd, ctx, subregular, f, f.dual_star())
            closed = g2_subregular_closed_forms(ctx, f)
            report.compare(name, ANCHORS['g2_subregular'], contribution.value, closed.total, TOL_REGRESSION,
                           {'f': f.to_dict(), 'classes': closed.to_dict()})
            per_class = {'1': closed.identity, '(12)': closed.transposition, '(123)': closed.three_cycle}
            for cls in subregular.classes:
                report.compare(f"{name}/{cls.label}", ANCHORS['g2_subregular'],
                               float(cls.weight) * contribution.class_values[cls.label], per_class[cls.label],
                               TOL_REGRESSION)
        except Exception as e:
            logger.error(f"G2 regression case {name} failed: {e}", exc_info=True)
            report.error(name, ANCHORS['g2_subregular'], e)

    match = langlands_g2_match()
    report.check('G2/discrete_point_template', ANCHORS['langlands_g2'], match.matches,
                 {'emitted': str(match.emitted), 'template': str(match.template)})
    return report


def g2_test_functions(seed: int) -> List[LaurentPolynomial]:
    """Five G2 test functions; (1, -1) makes the derivative term of the diagonal expansion nonzero."""
    rng = np.random.default_rng(seed)
    return [
        LaurentPolynomial.constant(2),
        LaurentPolynomial.monomial((1, -1)),
        LaurentPolynomial({(1, 0): 1.0, (0, 1): 0.5j}, 2),
        LaurentPolynomial.random(2, 2, rng),
        LaurentPolynomial.random(2, 3, rng),
    ]


def run_cohomology_suite(config: CheckerConfig) -> VerificationReport:
    """Additive identity for A1 (A2 when configured), the additive G2 closed form, and the q -> 1 bridge."""
    report = _new_report('cohomology', config)
    ctx = additive_context(config)
    anchor = ANCHORS['additive']
    f1 = ExpPolynomial({(0,): 1.0, (2,): 1.0}, rank=1)
    groups = [('A1', 'adjoint')] + [(g['type'], g['lattice']) for g in config.groups if g['type'] == 'A2']
    for type_label, lattice in dict.fromkeys(groups):
        rd, _, catalog = group_data(type_label, lattice)
        f = f1 if rd.rank == 1 else ExpPolynomial({(0, 0): 1.0, (1, 1): 1.0}, rank=2)
        try:
            lhs, rhs = cohomological_identity_sides(rd, ctx, f, catalog)
            report.compare(f"{rd.label}/additive", anchor, lhs.value, rhs.total, TOL_ADDITIVE,
                           {'f': f.to_dict(), 'context': ctx.describe()})
        except Exception as e:
            logger.error(f"Additive identity failed on {rd.label}: {e}", exc_info=True)
            report.error(f"{rd.label}/additive", anchor, e)

    rd, _, catalog = group_data('G2', 'adjoint')
    subregular = next(o for o in catalog if o.name == 'subregular')
    f = ExpPolynomial({(0, 0): 1.0, (1, 0): 0.5, (0, 1): -0.25j}, rank=2)
    try:
        value = orbit_contribution(rd, ctx, subregular, f, f.dual_star()).value
        report.compare('G2/additive_subregular', ANCHORS['langlands_g2'], value,
                       additive_g2_closed_form(ctx, f), TOL_ADDITIVE)
    except Exception as e:
        report.error('G2/additive_subregular', ANCHORS['langlands_g2'], e)

    try:
        rd, _, _ = group_data('A1', 'adjoint')
        points = genus_mode_bridge(rd, f1, BRIDGE_DELTAS, c=ctx.genus.params.get('c', ADDITIVE_C))
        errors = [p.error for p in points]
        monotone = all(b < a for a, b in zip(errors, errors[1:]))
        report.check('A1/bridge', ANCHORS['bridge'], monotone,
                     {'deltas': list(BRIDGE_DELTAS), 'errors': errors, 'rescaled': [p.rescaled for p in points]})
    except Exception as e:
        logger.error(f"Bridge failed: {e}", exc_info=True)
        report.error('A1/bridge', ANCHORS['bridge'], e)
    return report


def run_positivity_suite(config: CheckerConfig) -> VerificationReport:
    """Hermitian norms of seeded random test functions: every orbit term real and non-negative."""
    report = _new_report('positivity', config)
    ctx = multiplicative_context(config)
    rng = np.random.default_rng(config.seed)
    for group in config.groups:
        rd, _, catalog = group_data(group['type'], group['lattice'])
        for index in range(config.positivity_samples):
            f = LaurentPolynomial.random(rd.rank, config.degree, rng)
            name = f"{rd.label}/norm{index}"
            try:
                norm = hermitian_norm(rd, ctx, f, catalog)
                if norm.total is None:
                    report.skip(name, ANCHORS['positivity'], 'orbit integrals undefined')
                    continue
                ok = norm.real and norm.positive and norm.total >= -TOL_POSITIVITY
                report.check(name, ANCHORS['positivity'], ok,
                             {'orbits': norm.orbit_values, 'absolute': norm.absolute_values, 'total': norm.total})
            except Exception as e:
                report.error(name, ANCHORS['positivity'], e)
    return report


SUITES: Dict[str, Callable[[CheckerConfig], VerificationReport]] = {
    'main': run_main_identity_suite,
    'structural': run_structural_suite,
    'g2': run_g2_regression,
    'cohomology': run_cohomology_suite,
    'positivity': run_positivity_suite,
}


def run_suite(name: str, config: CheckerConfig) -> VerificationReport:
    """Run one suite by name, or every suite for 'all'."""
    if name == 'all':
        combined = _new_report('all', config)
        for suite in SUITES.values():
            combined.extend(suite(config))
        return combined
    if name not in SUITES:
        raise SpectralError(f"Unknown suite {name}; choose from {sorted(SUITES)} or 'all'")
    logger.info(f"Running suite {name}")
    return SUITES[name](config)
