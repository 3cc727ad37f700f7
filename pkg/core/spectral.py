"""
Both sides of the spectral decomposition.

The left side is the contour pairing of two test functions against the
Weyl-summed ratio of Z factors. The right side is a sum over nilpotent
orbits of integrals of projected test functions against the orbit density
over the shifted compact centralizer torus, with component classes averaged.
Every function works in either mode through EvalContext.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from constants.constants import (
    COINCIDENCE_TOL,
    COLLISION_TOL,
    DEFAULT_NODES,
    DEFAULT_SHIFT,
    DIVERGENCE_TOL,
    GENERIC_DIRECTION,
    ORBIT_NODES,
    TOL_POSITIVITY,
)
from core.errors import DivergenceError, InadmissibleContourError, PoleCollisionError, SpectralError
from core.genus import (
    EvalContext,
    big_psi,
    check_hypotheses,
    dual_star,
    little_z,
    psi_ratio,
    z1_of,
    z_ratio,
)
from core.liealg import ComponentClass, NilpotentOrbitRecord, w_of_e
from core.quad import (
    ContourSpec,
    QuadResult,
    admissible_violations,
    cancellation_limit,
    line_integral,
    torus_integral,
    weyl_average,
)
from core.rootsys import RootDatum, WeylElement
from utils.helpers import retry_with_node_perturbation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralPoint:
    orbit: str
    component_class: str
    point: Tuple[complex, ...]
    support: str
    u: Tuple[complex, ...] = ()


@dataclass
class OrbitContribution:
    orbit: str
    value: complex = 0j
    error_estimate: float = 0.0
    class_values: Dict[str, complex] = field(default_factory=dict)
    density_samples: List[complex] = field(default_factory=list)
    projector_samples: List[complex] = field(default_factory=list)
    nodes: int = 0
    skipped: bool = False
    collisions: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'orbit': self.orbit,
            'value': [self.value.real, self.value.imag],
            'error_estimate': self.error_estimate,
            'class_values': {k: [v.real, v.imag] for k, v in sorted(self.class_values.items())},
            'nodes': self.nodes,
            'skipped': self.skipped,
            'collisions': list(self.collisions),
        }


@dataclass
class SpectralSum:
    contributions: List[OrbitContribution]
    total: Optional[complex]

    @property
    def skipped(self) -> bool:
        return any(c.skipped for c in self.contributions)


# contour pairing


def default_contour(rd: RootDatum, ctx: EvalContext, kappa: float = DEFAULT_SHIFT,
                    nodes: int = DEFAULT_NODES, **kwargs) -> ContourSpec:
    """Shift q^{kappa rho^vee} (additively kappa rho^vee), admissible iff kappa > 1."""
    rho = rd.rho_check_array()
    if ctx.additive:
        shift = tuple(complex(kappa * v) for v in rho)
    else:
        shift = tuple(complex(ctx.q ** (kappa * v)) for v in rho)
    return ContourSpec(rank=rd.rank, shift=shift, nodes=nodes, **kwargs)


def eis_integrand(rd: RootDatum, ctx: EvalContext, f1: Callable, f2: Callable, x) -> np.ndarray:
    """
    (1/z^r) sum_w f1(x) f2(w^-1 x) prod_{alpha > 0, w^-1 alpha < 0} Z(x^alpha)/Z(q x^alpha).

    Args:
        rd: root datum
        ctx: evaluation context
        f1, f2: vectorised test functions
        x: (M, r) points

    Returns:
        (M,) values.
    """
    x = np.asarray(x, dtype=complex)
    ratios = z_ratio(ctx, ctx.char(x, rd.positive_roots))
    total = np.zeros(x.shape[0], dtype=complex)
    for w in rd.weyl:
        inv = rd.inversions(w)
        factor = np.prod(ratios[:, inv], axis=1) if inv else 1.0
        total = total + f2(ctx.apply_point(w.matrix.T, x)) * factor
    return f1(x) * total / little_z(ctx) ** rd.rank


def check_contour(rd: RootDatum, ctx: EvalContext, contour: ContourSpec) -> None:
    violated = admissible_violations(rd.positive_roots, contour.shift, ctx.q, ctx.additive)
    if violated:
        raise InadmissibleContourError(violated)


@retry_with_node_perturbation()
def eis_pairing(rd: RootDatum, ctx: EvalContext, f1: Callable, f2: Callable, contour: ContourSpec) -> QuadResult:
    """Contour pairing over the admissible shifted compact torus (additively the vertical subspace)."""
    check_contour(rd, ctx, contour)
    if not ctx.genus.critical_zeros_only(ctx.q):
        logger.warning(f"Genus {ctx.genus.kind} has zeros outside the critical region; pairing is experimental")

    def integrand(x):
        return eis_integrand(rd, ctx, f1, f2, x)

    if ctx.additive:
        return line_integral(integrand, contour)
    return torus_integral(integrand, contour)


# projectors


def _pi_plus(rd: RootDatum, ctx: EvalContext, y) -> np.ndarray:
    """prod over negative roots of Psi(y^alpha)/Psi(y^alpha / q)."""
    return np.prod(psi_ratio(ctx, ctx.char(y, rd.negative_roots)), axis=-1)


def _pi_minus(rd: RootDatum, ctx: EvalContext, y) -> np.ndarray:
    return np.prod(psi_ratio(ctx, ctx.char(y, rd.positive_roots)), axis=-1)


def _projector_terms(rd: RootDatum, ctx: EvalContext, f: Callable, sign: int, x, elements) -> np.ndarray:
    """sum over elements of Pi_+(w^-1 x) g(w^-1 x); g = f for the + projector and f o w0 for the - one."""
    total = np.zeros(x.shape[0], dtype=complex)
    w0 = rd.w0
    for w in elements:
        y = ctx.apply_point(w.matrix.T, x)
        arg = y if sign > 0 else ctx.apply_point(w0.point_exponents, y)
        total = total + _pi_plus(rd, ctx, y) * f(arg)
    return total


def _singular_rows(rd: RootDatum, ctx: EvalContext, x) -> np.ndarray:
    values = ctx.char(x, rd.positive_roots)
    return np.any(np.abs(ctx.defect(values)) < COINCIDENCE_TOL, axis=-1)


def _perturb(ctx: EvalContext, x, eps, direction) -> np.ndarray:
    """x exp(eps v) (additively x + eps v) for every eps: result (K, M, r)."""
    step = eps[:, None, None] * direction[None, None, :]
    return x[None, :, :] + step if ctx.additive else x[None, :, :] * np.exp(step)


def _regularised(rd: RootDatum, ctx: EvalContext, evaluate: Callable, x) -> np.ndarray:
    """evaluate(x) where x is regular, its limit along a generic direction elsewhere."""
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    mask = _singular_rows(rd, ctx, x)
    out = np.zeros(x.shape[0], dtype=complex)
    if np.any(~mask):
        out[~mask] = evaluate(x[~mask])
    if np.any(mask):
        singular = x[mask]
        direction = np.array(GENERIC_DIRECTION[:rd.rank], dtype=float)

        def along(eps):
            pts = _perturb(ctx, singular, eps, direction)
            return evaluate(pts.reshape(-1, rd.rank)).reshape(eps.shape[0], singular.shape[0])

        out[mask] = cancellation_limit(along).value
        logger.debug(f"Took cancellation limits at {int(mask.sum())} non-regular points")
    return out


def projector_PB(rd: RootDatum, ctx: EvalContext, f: Callable, sign: int, x) -> np.ndarray:
    """
    Full Weyl-symmetrised projector sum_w w(Pi_B f) at points x.

    sign = +1 uses Pi_+ (product over negative roots), sign = -1 uses Pi_- (positive roots).
    Non-regular points are evaluated as limits along a generic direction.
    """
    if sign not in (1, -1):
        raise SpectralError(f"Projector sign must be +1 or -1, got {sign}")
    pi = _pi_plus if sign > 0 else _pi_minus

    def evaluate(points):
        total = np.zeros(points.shape[0], dtype=complex)
        for w in rd.weyl:
            y = ctx.apply_point(w.matrix.T, points)
            total = total + pi(rd, ctx, y) * f(y)
        return total

    return _regularised(rd, ctx, evaluate, x)


def projector_z(rd: RootDatum, ctx: EvalContext, f: Callable, sign: int, x) -> np.ndarray:
    """Symmetric form sum_w w[prod_{alpha >< 0} (1 - q x^alpha)/(1 - x^-alpha) Z^1(x^alpha) f]."""
    roots = rd.positive_roots if sign > 0 else rd.negative_roots

    def evaluate(points):
        total = np.zeros(points.shape[0], dtype=complex)
        for w in rd.weyl:
            y = ctx.apply_point(w.matrix.T, points)
            ya = ctx.char(y, roots)
            factor = ctx.defect(ctx.shift(ya, 1.0)) / ctx.defect(ctx.invert(ya)) * z1_of(ctx, ya)
            total = total + np.prod(factor, axis=-1) * f(y)
        return total

    return _regularised(rd, ctx, evaluate, x)


def psi_shift_product(rd: RootDatum, ctx: EvalContext, x) -> np.ndarray:
    """prod over all roots of psi(x^alpha / q): the factor relating the two projector forms."""
    return np.prod(ctx.genus(ctx.shift(ctx.char(np.atleast_2d(x), rd.roots), -1.0)), axis=-1)


def projector_langlands(rd: RootDatum, ctx: EvalContext, f: Callable) -> Callable:
    """The operator f -> (1/|W|) sum_w prod_{beta > 0, w^-1 beta < 0} Z(x^beta)/Z(q x^beta) f(w^-1 x)."""
    order = len(rd.weyl)

    def projected(x):
        x = np.atleast_2d(np.asarray(x, dtype=complex))
        ratios = z_ratio(ctx, ctx.char(x, rd.positive_roots))
        total = np.zeros(x.shape[0], dtype=complex)
        for w in rd.weyl:
            inv = rd.inversions(w)
            factor = np.prod(ratios[:, inv], axis=1) if inv else 1.0
            total = total + factor * f(ctx.apply_point(w.matrix.T, x))
        return total / order

    return projected


def surviving_elements(rd: RootDatum, orbit: NilpotentOrbitRecord) -> List[WeylElement]:
    """Full cosets W^h w for w in W(e)."""
    lookup = {w.key: w for w in rd.weyl}
    seen = {}
    for w in w_of_e(orbit):
        for u in orbit.levi_weyl:
            key = tuple(int(v) for v in (u.matrix @ w.matrix).flatten())
            seen.setdefault(key, lookup[key])
    return sorted(seen.values(), key=lambda w: (w.length, w.word))


def restrict_projector(rd: RootDatum, ctx: EvalContext, orbit: NilpotentOrbitRecord, f: Callable,
                       sign: int, x, elements: Optional[Sequence[WeylElement]] = None) -> np.ndarray:
    """
    Projector at points of q^{h/2} C_phi with only the W(e) cosets contributing.

    Args:
        rd: root datum
        ctx: evaluation context
        orbit: orbit record supplying W(e) and the Levi Weyl group
        f: test function
        sign: +1 or -1
        x: (M, r) points q^{h/2} c t (additively h/2 + Lie T_phi points)
        elements: override of the summation set (all of W for cross-checks)

    Returns:
        (M,) values, limits taken along a generic direction where factors collide.
    """
    elements = list(elements) if elements is not None else surviving_elements(rd, orbit)

    def evaluate(points):
        return _projector_terms(rd, ctx, f, sign, points, elements)

    return _regularised(rd, ctx, evaluate, x)


# orbit densities


def _phase_value(ctx: EvalContext, phase: Fraction):
    return 0.0 if ctx.additive else np.exp(2j * np.pi * float(phase))


def orbit_base_point(ctx: EvalContext, orbit: NilpotentOrbitRecord, cls: ComponentClass) -> np.ndarray:
    """q^{h/2} c in torus coordinates; h/2 additively."""
    half = orbit.h_half()
    if ctx.additive:
        return half.astype(complex)
    return ctx.q ** half * cls.point()


def _key_values(ctx: EvalContext, key, u) -> np.ndarray:
    weights, phase = key
    base = _phase_value(ctx, phase)
    if not any(weights):
        return np.full(u.shape[0], base, dtype=complex)
    moving = ctx.char(u, np.array([weights]))[:, 0]
    return ctx.compose_points(base, moving)


def _root_keys(rd: RootDatum, orbit: NilpotentOrbitRecord, cls: ComponentClass):
    keys = []
    for idx, alpha in enumerate(rd.roots):
        weights = tuple(int(w) for w in orbit.torus_weights[idx]) if cls.toral else tuple(0 for _ in range(orbit.torus_rank))
        phase = sum(int(a) * p for a, p in zip(alpha, cls.phase)) % 1
        keys.append((weights, phase))
    return keys


def orbit_density(rd: RootDatum, ctx: EvalContext, orbit: NilpotentOrbitRecord, u, cls: ComponentClass,
                  form: str = 'psi') -> np.ndarray:
    """
    Orbit density at the points of q^{h/2} c T_phi parametrised by u (unit-torus points, or i R^k additively).

    form='psi': Psi(q^-1)^{-2r} prod Psi(q^{-1-i/2} mu) / (prod_{i=0} psi(mu) prod_{i>0} Psi(q^{i/2} mu)).
    form='z': q^{-(dim g + dim g^e)/2} (1-q)^{2r} / Z^1(g) prod_{i>0} (1 - q^{-i/2} mu) / prod_{i>=0} (1 - q^{-i/2-1} mu).
    """
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    r = rd.rank
    entries = orbit.multiplicity[cls.label]
    if form == 'psi':
        value = np.full(u.shape[0], big_psi(ctx, ctx.shift(ctx.unit, -1.0)) ** (-2 * r), dtype=complex)
        for i, keyed in entries.items():
            for key, mult in keyed:
                mu = _key_values(ctx, key, u)
                value = value * big_psi(ctx, ctx.shift(mu, -1.0 - i / 2.0)) ** mult
                if i == 0:
                    value = value / ctx.genus(mu) ** mult
                else:
                    value = value / big_psi(ctx, ctx.shift(mu, i / 2.0)) ** mult
        return value
    if form == 'z':
        dim = r + len(rd.roots)
        if ctx.additive:
            prefactor = ctx.defect(ctx.shift(ctx.unit, 1.0)) ** (2 * r)
        else:
            prefactor = ctx.q ** (-(dim + orbit.c_e_dim) / 2.0) * (1.0 - ctx.q) ** (2 * r)
        value = np.full(u.shape[0], prefactor, dtype=complex)
        value = value / z1_of(ctx, ctx.unit) ** r
        for idx, key in enumerate(_root_keys(rd, orbit, cls)):
            x_alpha = ctx.shift(_key_values(ctx, key, u), orbit.degrees[idx] / 2.0)
            value = value / z1_of(ctx, x_alpha)
        for i, keyed in entries.items():
            for key, mult in keyed:
                mu = _key_values(ctx, key, u)
                if i > 0:
                    value = value * ctx.defect(ctx.shift(mu, -i / 2.0)) ** mult
                value = value / ctx.defect(ctx.shift(mu, -i / 2.0 - 1.0)) ** mult
        return value
    raise SpectralError(f"Unknown density form {form}")


def density_conversion(rd: RootDatum, ctx: EvalContext, orbit: NilpotentOrbitRecord, u,
                       cls: ComponentClass) -> np.ndarray:
    """prod over roots of psi(x^alpha / q)^2 at q^{h/2} c t: Psi_e = Z_e times this."""
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    value = np.ones(u.shape[0], dtype=complex)
    for idx, key in enumerate(_root_keys(rd, orbit, cls)):
        x_alpha = ctx.shift(_key_values(ctx, key, u), orbit.degrees[idx] / 2.0)
        value = value * ctx.genus(ctx.shift(x_alpha, -1.0)) ** 2
    return value


# collisions


def collision_scan(rd: RootDatum, ctx: EvalContext, orbit: NilpotentOrbitRecord,
                   tol: float = COLLISION_TOL, moving: bool = True) -> List[str]:
    """
    Factor arguments on the orbit's evaluation set that meet a declared psi zero.

    Projector factors divide by psi(y/q) for y = x^beta; densities divide by psi(mu) and
    Psi(q^{i/2} mu). Moving arguments (nonzero torus weight) collide when their circle
    (additively, their vertical line) passes through a zero; fixed arguments when they equal it.
    Moving collisions are labelled as such and left out when moving=False: the poles they
    produce may cancel in the full integrand.
    """
    zeros = ctx.genus.zeros
    if not zeros:
        return []
    found = []
    include_moving = moving

    def check(label, moving, value):
        if moving and not include_moving:
            return
        if moving:
            label = f"moving {label}"
        for z in zeros:
            if moving:
                hit = abs(value.real - z.real) < tol if ctx.additive else abs(abs(value) - abs(z)) < tol
            else:
                hit = abs(value - z) < tol
            if hit:
                found.append(f"{label} meets psi zero {z:.6g}")

    classes = orbit.classes[:1] if ctx.additive else orbit.classes
    for cls in classes:
        zero_u = np.zeros((1, orbit.torus_rank), dtype=complex) if ctx.additive else np.ones((1, orbit.torus_rank), dtype=complex)
        for idx, key in enumerate(_root_keys(rd, orbit, cls)):
            moving = any(key[0])
            value = complex(ctx.shift(_key_values(ctx, key, zero_u)[0], orbit.degrees[idx] / 2.0 - 1.0))
            check(f"projector factor of root {tuple(int(v) for v in rd.roots[idx])} (class {cls.label})", moving, value)
        for i, keyed in orbit.multiplicity[cls.label].items():
            for key, _ in keyed:
                moving = any(key[0])
                mu = complex(_key_values(ctx, key, zero_u)[0])
                check(f"density weight {key[0]} in degree {i} (class {cls.label})", moving, complex(ctx.shift(mu, i / 2.0)))
    if found:
        logger.warning(f"Orbit {orbit.name}: {len(found)} collisions with psi zeros")
    return found


# orbit contributions


def _orbit_spec(ctx: EvalContext, k: int, nodes: Optional[int]) -> ContourSpec:
    if nodes is None:
        nodes = ORBIT_NODES if k == 1 else DEFAULT_NODES
    if ctx.additive:
        return ContourSpec(rank=k, shift=tuple(0j for _ in range(k)))
    return ContourSpec(rank=k, shift=tuple(1 + 0j for _ in range(k)), nodes=nodes)


def _class_integrand(rd, ctx, orbit, cls, f1, f2, elements, absolute=False):
    base = orbit_base_point(ctx, orbit, cls)
    basis = orbit.torus_basis
    phi_roots = np.array(orbit.phi_root_weights, dtype=np.int64).reshape(len(orbit.phi_root_weights), orbit.torus_rank)

    def integrand(u):
        u = np.atleast_2d(np.asarray(u, dtype=complex))
        moving = ctx.char(u, basis.T)
        x = ctx.compose_points(base[None, :], moving)
        p1 = restrict_projector(rd, ctx, orbit, f1, 1, x, elements)
        density = orbit_density(rd, ctx, orbit, u, cls)
        weyl = np.prod(ctx.defect(ctx.char(u, phi_roots)), axis=-1) if phi_roots.shape[0] else 1.0
        if absolute:
            return np.abs(p1) ** 2 * np.abs(density) * np.abs(weyl)
        p2 = restrict_projector(rd, ctx, orbit, f2, -1, x, elements)
        return p1 * p2 * density * weyl

    return integrand


def _check_convergence(result: OrbitContribution) -> OrbitContribution:
    # Only orbits whose cycle passes through a psi zero can carry an uncancelled pole.
    if result.collisions and result.error_estimate > DIVERGENCE_TOL * (1.0 + abs(result.value)):
        logger.warning(f"Orbit {result.orbit}: no convergence across a psi zero "
                       f"(error {result.error_estimate:.3e}), skipped")
        result.skipped = True
    return result


@retry_with_node_perturbation()
def _integrate(ctx: EvalContext, integrand: Callable, contour: ContourSpec) -> QuadResult:
    if ctx.additive:
        return line_integral(integrand, contour)
    return torus_integral(integrand, contour)


def orbit_contribution(rd: RootDatum, ctx: EvalContext, orbit: NilpotentOrbitRecord, f1: Callable, f2: Callable,
                       reduced: bool = True, nodes: Optional[int] = None, absolute: bool = False,
                       elements: Optional[Sequence[WeylElement]] = None,
                       density_factor: float = 1.0) -> OrbitContribution:
    """
    Integral of (P+ f1)(P- f2) times the orbit density over q^{h/2} C_phi (probability Haar).

    For the zero orbit with reduced=True the pairing integrand is integrated over the
    compact torus instead.

    Args:
        rd: root datum
        ctx: evaluation context
        orbit: orbit record
        f1, f2: test functions
        reduced: use the reduced zero-orbit form
        nodes: nodes per torus dimension
        absolute: integrate |P+ f1|^2 |density| instead
        elements: Weyl elements summed in the restricted projectors
        density_factor: multiplier on the density (sensitivity runs)

    Returns:
        OrbitContribution, marked skipped when a fixed factor meets a psi zero, or when a
        moving factor does and the quadrature then fails to converge.
    """
    result = OrbitContribution(orbit=orbit.name)
    fixed = collision_scan(rd, ctx, orbit, moving=False)
    if fixed:
        result.skipped = True
        result.collisions = fixed
        return result
    result.collisions = collision_scan(rd, ctx, orbit)
    try:
        if orbit.is_zero and reduced and not absolute:
            k = rd.rank
            contour = _orbit_spec(ctx, k, nodes)
            quad = _integrate(ctx, lambda x: eis_integrand(rd, ctx, f1, f2, x), contour)
            result.value = quad.value * density_factor
            result.error_estimate = quad.error_estimate
            result.nodes = quad.nodes_used
            result.class_values[orbit.classes[0].label] = quad.value
            return _check_convergence(result)

        classes = orbit.classes[:1] if ctx.additive else orbit.classes
        values, weights = [], []
        error = 0.0
        for cls in classes:
            integrand = _class_integrand(rd, ctx, orbit, cls, f1, f2, elements, absolute)
            if not cls.toral:
                u0 = np.zeros((1, orbit.torus_rank), dtype=complex) if ctx.additive else np.ones((1, orbit.torus_rank), dtype=complex)
                value = complex(integrand(u0)[0])
                nodes_used = 1
            else:
                quad = _integrate(ctx, integrand, _orbit_spec(ctx, orbit.torus_rank, nodes))
                value = quad.value / orbit.weyl_phi_order
                error += quad.error_estimate / orbit.weyl_phi_order
                nodes_used = quad.nodes_used
            values.append(value)
            weights.append(cls.weight)
            result.class_values[cls.label] = value
            result.nodes = max(result.nodes, nodes_used)
        result.value = weyl_average(values, weights) * density_factor
        result.error_estimate = error
        logger.debug(f"Orbit {orbit.name}: contribution {result.value:.12g}")
        return _check_convergence(result)
    except (PoleCollisionError, DivergenceError) as e:
        logger.warning(f"Orbit {orbit.name} skipped, integral diverges: {e}")
        result.skipped = True
        result.collisions = result.collisions + [str(e)]
        return result
    except Exception as e:
        logger.error(f"Error computing contribution of orbit {orbit.name}: {e}", exc_info=True)
        raise


def spectral_sum(rd: RootDatum, ctx: EvalContext, f1: Callable, f2: Callable,
                 catalog: Sequence[NilpotentOrbitRecord], nodes: Optional[int] = None,
                 density_perturbation: Optional[Dict] = None, absolute: bool = False) -> SpectralSum:
    """Sum of orbit contributions; the total is None when any orbit is skipped."""
    contributions = []
    for orbit in catalog:
        factor = 1.0
        if density_perturbation and density_perturbation.get('orbit') == orbit.name:
            factor = float(density_perturbation.get('factor', 1.0))
        contributions.append(orbit_contribution(rd, ctx, orbit, f1, f2, nodes=nodes, absolute=absolute,
                                                density_factor=factor))
    if any(c.skipped for c in contributions):
        return SpectralSum(contributions, None)
    return SpectralSum(contributions, complex(sum(c.value for c in contributions)))


@dataclass
class HermitianNorm:
    total: Optional[float]
    orbit_values: Dict[str, complex]
    absolute_values: Dict[str, float]
    positive: bool
    real: bool


def hermitian_norm(rd: RootDatum, ctx: EvalContext, f, catalog: Sequence[NilpotentOrbitRecord],
                   nodes: Optional[int] = None, tol: float = TOL_POSITIVITY) -> HermitianNorm:
    """||f||^2 as the orbit sum for (f, f*); each orbit value must be real and non-negative."""
    if not check_hypotheses(ctx).passed:
        logger.warning("Positivity is only asserted for genera passing the hypotheses")
    summed = spectral_sum(rd, ctx, f, dual_star(f), catalog, nodes=nodes)
    absolute = {}
    for orbit in catalog:
        if orbit.is_zero:
            continue
        contribution = orbit_contribution(rd, ctx, orbit, f, dual_star(f), nodes=nodes, absolute=True)
        if not contribution.skipped:
            absolute[orbit.name] = contribution.value.real
    values = {c.orbit: c.value for c in summed.contributions if not c.skipped}
    real = all(abs(v.imag) <= tol * max(1.0, abs(v)) for v in values.values())
    positive = all(v.real >= -tol for v in values.values())
    total = summed.total.real if summed.total is not None else None
    return HermitianNorm(total=total, orbit_values=values, absolute_values=absolute, positive=positive, real=real)


def cohomological_identity_sides(rd: RootDatum, ctx: EvalContext, f, catalog: Sequence[NilpotentOrbitRecord],
                                 kappa: float = DEFAULT_SHIFT) -> Tuple[QuadResult, SpectralSum]:
    """Both sides in additive mode for (f, f*): the vertical-subspace pairing and the orbit sum."""
    if not ctx.additive:
        raise SpectralError("The cohomological identity needs an additive context")
    lhs = eis_pairing(rd, ctx, f, dual_star(f), default_contour(rd, ctx, kappa))
    rhs = spectral_sum(rd, ctx, f, dual_star(f), catalog)
    return lhs, rhs


def spectral_support(ctx: EvalContext, orbit: NilpotentOrbitRecord, samples: int = 8) -> List[SpectralPoint]:
    """Sample points of q^{h/2} C_phi per class, for the `measure` subcommand."""
    points = []
    k = orbit.torus_rank
    if ctx.additive:
        grid = 1j * np.linspace(-2.0, 2.0, samples)
        rest = np.zeros(k, dtype=complex)
    else:
        grid = np.exp(2j * np.pi * np.arange(samples) / samples)
        rest = np.ones(k, dtype=complex)
    classes = orbit.classes[:1] if ctx.additive else orbit.classes
    for cls in classes:
        base = orbit_base_point(ctx, orbit, cls)
        if k == 0 or not cls.toral:
            us = [rest]
        else:
            us = [np.full(k, g) for g in grid]
        for u in us:
            moving = ctx.char(u[None, :], orbit.torus_basis.T)[0]
            x = ctx.compose_points(base, moving)
            points.append(SpectralPoint(orbit=orbit.name, component_class=cls.label,
                                        point=tuple(complex(v) for v in x),
                                        support=f"q^(h/2) c T_phi, dim {k}",
                                        u=tuple(complex(v) for v in u)))
    return points


def measure_conversion_factor(rd: RootDatum, ctx: EvalContext) -> complex:
    """little_z^r: converts probability-Haar values to the residue-normalised measure."""
    return little_z(ctx) ** rd.rank
