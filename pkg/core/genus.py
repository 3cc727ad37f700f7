"""
Genus functions and the evaluation context shared by both modes.

In multiplicative mode torus points x live in (C^x)^r and characters are
x^lambda; in additive mode points are vectors s in C^r and characters are
the linear forms lambda(s). EvalContext hides the difference so that the
projector, density and pairing code is written once.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple
import cmath
import logging
import math

import numpy as np

from constants.constants import (
    ADDITIVE_C,
    CANONICAL_C_OFFSET,
    CANONICAL_C_SLOPE,
    LAURENT_NODES,
    LAURENT_RADIUS,
)
from core.errors import ConsistencyError, PoleCollisionError, SpectralError

logger = logging.getLogger(__name__)

MULTIPLICATIVE = 'multiplicative'
ADDITIVE = 'additive'
MODES = (MULTIPLICATIVE, ADDITIVE)


@dataclass(frozen=True, eq=False)
class GenusFunction:
    """
    A genus psi with its declared zeros and analyticity region.

    The region is the annulus 1/R < |x| < R (multiplicative) or the strip
    |Re s| < R (additive); R = inf means analytic away from x = 0.
    """

    kind: str
    mode: str
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    zeros: Tuple[complex, ...] = ()
    region_radius: float = math.inf
    params: Dict = field(default_factory=dict)

    def __call__(self, y):
        return self.evaluator(np.asarray(y, dtype=complex))

    @property
    def origin(self) -> complex:
        return 1.0 + 0j if self.mode == MULTIPLICATIVE else 0j

    @property
    def origin_value(self) -> complex:
        return complex(self(self.origin))

    def critical_zeros_only(self, q: float) -> bool:
        if self.mode == MULTIPLICATIVE:
            return all(1.0 / q < abs(z) < 1.0 for z in self.zeros)
        return all(-1.0 < z.real < 0.0 for z in self.zeros)

    def describe(self) -> Dict:
        spec = {'kind': self.kind, 'mode': self.mode}
        spec.update(self.params)
        return spec


def canonical_c(q: float) -> float:
    return CANONICAL_C_SLOPE / q + CANONICAL_C_OFFSET


def canonical_genus(q: float, c: Optional[float] = None, scale: float = 1.0) -> GenusFunction:
    """psi(x) = scale * (1 - c/x); positive test genus for 1/q < c < 1."""
    c = canonical_c(q) if c is None else float(c)
    return GenusFunction(
        kind='one_minus_c_over_x',
        mode=MULTIPLICATIVE,
        evaluator=lambda y: scale * (1.0 - c / y),
        zeros=(complex(c),),
        params={'c': c, 'scale': scale},
    )


def constant_genus(value: complex = 1.0, mode: str = MULTIPLICATIVE) -> GenusFunction:
    return GenusFunction(
        kind='constant',
        mode=mode,
        evaluator=lambda y: np.full(np.shape(y), complex(value)),
        params={'value': value},
    )


def additive_genus(c: float = ADDITIVE_C) -> GenusFunction:
    """psi(s) = s + c, the cohomological counterpart of the canonical genus."""
    return GenusFunction(
        kind='s_plus_c',
        mode=ADDITIVE,
        evaluator=lambda s: s + c,
        zeros=(complex(-c),),
        params={'c': c},
    )


def bridge_genus(q: float, c: float = ADDITIVE_C) -> GenusFunction:
    """psi_q(x) = (1 - q^-c / x) / ln q, so that psi_q(q^s) -> s + c as q -> 1."""
    a = q ** (-c)
    log_q = math.log(q)
    return GenusFunction(
        kind='bridge',
        mode=MULTIPLICATIVE,
        evaluator=lambda y: (1.0 - a / y) / log_q,
        zeros=(complex(a),),
        params={'c': c, 'q': q},
    )


def _half_set(alphas: Sequence[complex], tol: float) -> List[complex]:
    upper = [a for a in alphas if a.imag > tol]
    lower = [a for a in alphas if a.imag < -tol]
    real = sorted((a for a in alphas if abs(a.imag) <= tol), key=lambda a: a.real)
    for a in upper:
        if not any(abs(a.conjugate() - b) < 1e-8 for b in lower):
            raise ConsistencyError(f"Frobenius eigenvalue {a} has no conjugate partner")
    if len(upper) != len(lower):
        raise ConsistencyError("Frobenius eigenvalues are not closed under conjugation")
    positive = [a for a in real if a.real > 0]
    negative = [a for a in real if a.real < 0]
    if len(positive) % 2 or len(negative) % 2:
        raise ConsistencyError("Real Frobenius eigenvalues must occur with even multiplicity")
    return upper + [complex(a.real, 0.0) for a in positive[::2] + negative[::2]]


def function_field_completed_zeta(alphas: Sequence[complex], q: float, x) -> np.ndarray:
    """xi(x) = x^(g-1) zeta(x), zeta(x) = prod(1 - a/x)(1 - q/(a x)) / ((1 - 1/x)(1 - q/x)) over the half set."""
    x = np.asarray(x, dtype=complex)
    half = _half_set([complex(a) for a in alphas], 1e-12)
    g = len(half)
    num = np.ones_like(x)
    for a in half:
        num = num * (1.0 - a / x) * (1.0 - q / (a * x))
    return x ** (g - 1) * num / ((1.0 - 1.0 / x) * (1.0 - q / x))


def function_field_genus(frobenius_alphas: Sequence[complex], q: float, check_points: int = 10) -> GenusFunction:
    """
    Genus factor of the completed zeta function of a curve over F_q.

    Args:
        frobenius_alphas: all 2g Frobenius eigenvalues, |alpha| = sqrt(q)
        q: size of the constant field
        check_points: sample points for the factorization check

    Returns:
        GenusFunction psi(y) = kappa * prod(alpha_i - 1/y) over the upper half set,
        kappa the principal square root of (-1)^(g-1) / prod(alpha_i).
    """
    alphas = [complex(a) for a in frobenius_alphas]
    root_q = math.sqrt(q)
    for i, a in enumerate(alphas):
        if abs(abs(a) - root_q) > 1e-9 * root_q:
            raise ConsistencyError(f"Frobenius eigenvalue {i} has modulus {abs(a)}, expected {root_q}")
    half = _half_set(alphas, 1e-12)
    g = len(half)
    kappa = cmath.sqrt((-1) ** (g - 1) / np.prod(np.array(half, dtype=complex))) if g else 1j
    half_arr = np.array(half, dtype=complex)

    def evaluator(y):
        out = np.full(np.shape(y), kappa, dtype=complex)
        for a in half_arr:
            out = out * (a - 1.0 / y)
        return out

    genus = GenusFunction(
        kind='function_field',
        mode=MULTIPLICATIVE,
        evaluator=evaluator,
        zeros=tuple(1.0 / a for a in half),
        params={'alphas': [[a.real, a.imag] for a in alphas], 'genus': g, 'kappa': [kappa.real, kappa.imag]},
    )

    rng = np.random.default_rng(len(alphas) + 7)
    xs = np.exp(rng.uniform(-1.0, 1.0, check_points) + 1j * rng.uniform(0, 2 * np.pi, check_points)) * (1.0 + root_q)
    lhs = genus(1.0 / xs) * genus(xs / q) / ((1.0 - xs) * (1.0 - q / xs))
    rhs = function_field_completed_zeta(alphas, q, xs)
    err = np.max(np.abs(lhs - rhs) / (1.0 + np.abs(rhs)))
    if err > 1e-10:
        raise ConsistencyError(f"Function-field genus fails the zeta factorization (error {err:.3e})")
    logger.debug(f"Function-field genus g = {g}, kappa = {kappa}")
    return genus


def genus_one_alphas(q: float, angle: float) -> List[complex]:
    a = math.sqrt(q) * cmath.exp(1j * angle)
    return [a, a.conjugate()]


@dataclass(frozen=True, eq=False)
class EvalContext:
    """q, mode and genus; all derived functions below dispatch on the mode."""

    q: float
    genus: GenusFunction
    mode: str = MULTIPLICATIVE

    def __post_init__(self):
        if self.mode not in MODES:
            raise SpectralError(f"Unknown mode {self.mode}")
        if self.mode != self.genus.mode:
            raise SpectralError(f"Genus {self.genus.kind} is {self.genus.mode}, context is {self.mode}")
        if self.mode == MULTIPLICATIVE and not abs(self.q) > 1.0:
            raise SpectralError(f"|q| must exceed 1 in multiplicative mode, got {self.q}")

    @property
    def additive(self) -> bool:
        return self.mode == ADDITIVE

    @property
    def unit(self) -> complex:
        return self.genus.origin

    def char(self, points, exps) -> np.ndarray:
        """x^lambda (or lambda(s)) for points (..., r) and exponent rows (m, r): result (..., m)."""
        points = np.asarray(points, dtype=complex)
        exps = np.asarray(exps)
        if self.additive:
            return points @ exps.T.astype(float)
        return np.prod(points[..., None, :] ** exps.astype(float), axis=-1)

    def shift(self, v, k: float):
        """q^k v, additively v + k."""
        return v + k if self.additive else v * self.q ** k

    def invert(self, v):
        return -v if self.additive else 1.0 / v

    def defect(self, v):
        """1 - v (multiplicatively) or -v: the factor vanishing at the unit."""
        return -v if self.additive else 1.0 - v

    def apply_point(self, exponents: np.ndarray, points) -> np.ndarray:
        """Point action (w.x)_k = x^{row k}; linear in additive mode."""
        return self.char(points, exponents)

    def compose_points(self, a, b):
        return a + b if self.additive else a * b

    def describe(self) -> Dict:
        return {'q': self.q, 'mode': self.mode, 'genus': self.genus.describe()}


def _check_pole(den, what: str):
    if np.any(den == 0):
        raise PoleCollisionError(f"{what} evaluated at its pole")


def big_psi(ctx: EvalContext, x):
    """Psi(x) = psi(x)/(1 - 1/x), additively psi(s)/s."""
    x = np.asarray(x, dtype=complex)
    den = x if ctx.additive else 1.0 - 1.0 / x
    _check_pole(den, 'Psi')
    return ctx.genus(x) / den


def psi_ratio(ctx: EvalContext, y):
    """Psi(y)/Psi(y/q), additively Psi(s)/Psi(s-1)."""
    y = np.asarray(y, dtype=complex)
    if ctx.additive:
        _check_pole(y * ctx.genus(y - 1.0), 'Psi ratio')
        return ctx.genus(y) * (y - 1.0) / (ctx.genus(y - 1.0) * y)
    den = ctx.genus(y / ctx.q) * (1.0 - 1.0 / y)
    _check_pole(den, 'Psi ratio')
    return ctx.genus(y) * (1.0 - ctx.q / y) / den


def z1_of(ctx: EvalContext, x):
    """Entire part Z^1(x) = -psi(1/x) psi(x/q) / x, additively -psi(-s) psi(s-1)."""
    x = np.asarray(x, dtype=complex)
    if ctx.additive:
        return -ctx.genus(-x) * ctx.genus(x - 1.0)
    return -ctx.genus(1.0 / x) * ctx.genus(x / ctx.q) / x


def z_of(ctx: EvalContext, x):
    """Z(x) = Psi(1/x) Psi(x/q), additively Psi(-s) Psi(s-1)."""
    x = np.asarray(x, dtype=complex)
    den = x * (x - 1.0) if ctx.additive else (1.0 - 1.0 / x) * (1.0 - ctx.q / x)
    _check_pole(den, 'Z')
    return z1_of(ctx, x) / den


def z_ratio(ctx: EvalContext, y):
    """Z(y)/Z(qy) with the common pole at y = 1 cancelled."""
    y = np.asarray(y, dtype=complex)
    if ctx.additive:
        den = z1_of(ctx, y + 1.0) * (y - 1.0)
        _check_pole(den, 'Z ratio')
        return z1_of(ctx, y) * (y + 1.0) / den
    den = z1_of(ctx, ctx.q * y) * (1.0 - ctx.q / y)
    _check_pole(den, 'Z ratio')
    return z1_of(ctx, y) * (1.0 - 1.0 / (ctx.q * y)) / den


def little_z(ctx: EvalContext) -> complex:
    """Residue constant psi(1) Psi(1/q), additively -psi(0) psi(-1)."""
    if ctx.additive:
        return complex(-ctx.genus(0.0) * ctx.genus(-1.0))
    return complex(ctx.genus(1.0) * big_psi(ctx, 1.0 / ctx.q))


def laurent_data(ctx: EvalContext, radius: float = LAURENT_RADIUS, nodes: int = LAURENT_NODES) -> Tuple[complex, complex]:
    """
    (z_-1, z_0) with Z(x) = z_-1/(1 - 1/x) + z_0 + O(1 - 1/x), additively Z(s) = z_-1/s + z_0 + O(s).

    Computed from Cauchy means on a small circle in u = 1 - 1/x (resp. s).
    """
    u = radius * np.exp(2j * np.pi * (np.arange(nodes) + 0.5) / nodes)
    x = u if ctx.additive else 1.0 / (1.0 - u)
    values = z_of(ctx, x)
    return complex(np.mean(values * u)), complex(np.mean(values))


def residue_at_q(ctx: EvalContext, radius: float = LAURENT_RADIUS, nodes: int = LAURENT_NODES) -> complex:
    """Res_{u=q} Z(u) du/(2 pi i u) / little_z (additively at s = 1, measure ds/(2 pi i))."""
    theta = 2j * np.pi * (np.arange(nodes) + 0.5) / nodes
    if ctx.additive:
        s = 1.0 + radius * np.exp(theta)
        return complex(np.mean(z_of(ctx, s) * (s - 1.0)) / little_z(ctx))
    u = ctx.q * (1.0 + radius * np.exp(theta))
    return complex(np.mean(z_of(ctx, u) * (u - ctx.q) / u) / little_z(ctx))


def cauchy_reconstruct(fn: Callable, center: complex, radius: float, nodes: int = 128) -> complex:
    """f(center) from the Cauchy integral over a circle; matches f when f is analytic inside."""
    w = radius * np.exp(2j * np.pi * (np.arange(nodes) + 0.5) / nodes)
    return complex(np.mean(fn(center + w)))


@dataclass
class HypothesisReport:
    conditions: Dict[str, bool] = field(default_factory=dict)
    witnesses: Dict[str, List] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def to_dict(self) -> Dict:
        return {'conditions': dict(self.conditions),
                'witnesses': {k: [str(w) for w in v] for k, v in self.witnesses.items()}}


def _analytic_samples(ctx: EvalContext, rng: np.random.Generator, count: int) -> np.ndarray:
    if ctx.additive:
        return rng.uniform(-2.0, 2.0, count) + 1j * rng.uniform(-2.0, 2.0, count)
    return np.exp(rng.uniform(-1.0, 1.0, count) + 1j * rng.uniform(0.0, 2 * np.pi, count))


def check_hypotheses(ctx: EvalContext, samples: int = 50, seed: int = 0) -> HypothesisReport:
    """
    Check the positivity hypotheses on the genus.

    Conditions:
        zeros_declared: every declared zero is a zero of psi
        analytic: Cauchy reconstruction reproduces psi at sample points
        critical_zeros: zeros lie in 1/q < |x| < 1 (resp. -1 < Re s < 0)
        positive_z1: -psi(1/x) psi(x/q) (resp. -psi(-s) psi(s-1)) is real and positive for x > q (resp. s > 1)
    """
    report = HypothesisReport()
    genus = ctx.genus
    rng = np.random.default_rng(seed)

    bad_zeros = [z for z in genus.zeros if abs(complex(genus(z))) > 1e-10 * (1.0 + abs(genus.origin_value))]
    report.conditions['zeros_declared'] = not bad_zeros
    report.witnesses['zeros_declared'] = bad_zeros

    failures = []
    for y0 in _analytic_samples(ctx, rng, 5):
        if ctx.additive:
            radius = 0.25
        else:
            radius = 0.25 * abs(y0)
        value = complex(genus(y0))
        rebuilt = cauchy_reconstruct(genus, y0, radius)
        if abs(value - rebuilt) > 1e-10 * (1.0 + abs(value)):
            failures.append(y0)
    report.conditions['analytic'] = not failures
    report.witnesses['analytic'] = failures

    if ctx.additive:
        outside = [z for z in genus.zeros if not -1.0 < z.real < 0.0]
    else:
        outside = [z for z in genus.zeros if not 1.0 / ctx.q < abs(z) < 1.0]
    report.conditions['critical_zeros'] = not outside
    report.witnesses['critical_zeros'] = outside

    if ctx.additive:
        points = 1.0 + np.concatenate([rng.uniform(1e-3, 10.0, samples), [1e3]])
        values = z1_of(ctx, points)
    else:
        points = ctx.q * np.concatenate([1.0 + rng.uniform(1e-3, 10.0, samples), [1e3]])
        values = points * z1_of(ctx, points)
    scale = np.abs(values) + 1e-300
    negative = [complex(p) for p, v, s in zip(points, values, scale) if not (v.real > 0 and abs(v.imag) <= 1e-12 * s)]
    report.conditions['positive_z1'] = not negative
    report.witnesses['positive_z1'] = negative[:5]

    if not report.passed:
        logger.warning(f"Genus {genus.kind} fails hypotheses: {[k for k, v in report.conditions.items() if not v]}")
    return report


# test functions


@dataclass(frozen=True)
class LaurentPolynomial:
    """Finite sum of c_lambda x^lambda with lambda in the character lattice."""

    coeffs: Mapping[Tuple[int, ...], complex]
    rank: int

    @classmethod
    def monomial(cls, lam: Sequence[int], coeff: complex = 1.0) -> 'LaurentPolynomial':
        return cls({tuple(int(v) for v in lam): complex(coeff)}, len(lam))

    @classmethod
    def constant(cls, rank: int, value: complex = 1.0) -> 'LaurentPolynomial':
        return cls({tuple(0 for _ in range(rank)): complex(value)}, rank)

    @classmethod
    def random(cls, rank: int, degree: int, rng: np.random.Generator, terms: int = 4) -> 'LaurentPolynomial':
        coeffs: Dict[Tuple[int, ...], complex] = {}
        for _ in range(terms):
            lam = tuple(int(v) for v in rng.integers(-degree, degree + 1, size=rank))
            coeffs[lam] = coeffs.get(lam, 0) + complex(rng.normal(), rng.normal())
        return cls(coeffs, rank)

    def _arrays(self):
        lams = np.array(list(self.coeffs.keys()), dtype=float).reshape(-1, self.rank)
        cs = np.array(list(self.coeffs.values()), dtype=complex)
        return lams, cs

    def __call__(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=complex)
        if not self.coeffs:
            return np.zeros(points.shape[:-1], dtype=complex)
        lams, cs = self._arrays()
        monomials = np.prod(points[..., None, :] ** lams, axis=-1)
        return monomials @ cs

    def log_gradient(self, points) -> np.ndarray:
        """(x_k d/dx_k f)_k, shape (..., r)."""
        points = np.asarray(points, dtype=complex)
        lams, cs = self._arrays()
        monomials = np.prod(points[..., None, :] ** lams, axis=-1) * cs
        return monomials @ lams

    def dual_star(self) -> 'LaurentPolynomial':
        return LaurentPolynomial({tuple(-v for v in lam): complex(c).conjugate() for lam, c in self.coeffs.items()},
                                 self.rank)

    def act(self, matrix: np.ndarray) -> 'LaurentPolynomial':
        """The polynomial x -> f(w^-1 x), i.e. exponents lambda -> w lambda."""
        out: Dict[Tuple[int, ...], complex] = {}
        for lam, c in self.coeffs.items():
            image = tuple(int(v) for v in np.asarray(matrix) @ np.array(lam))
            out[image] = out.get(image, 0) + c
        return LaurentPolynomial(out, self.rank)

    def to_dict(self) -> Dict:
        return {'kind': 'laurent',
                'terms': [[list(lam), [complex(c).real, complex(c).imag]] for lam, c in sorted(self.coeffs.items())]}


@dataclass(frozen=True)
class ExpPolynomial:
    """P(s) exp(s^T G s) with P a polynomial in s; G negative definite on the imaginary directions."""

    coeffs: Mapping[Tuple[int, ...], complex]
    gram: np.ndarray = field(default=None)
    rank: int = 1

    def __post_init__(self):
        if self.gram is None:
            object.__setattr__(self, 'gram', np.eye(self.rank))

    def _poly(self, s, lam_shift=None):
        s = np.asarray(s, dtype=complex)
        total = np.zeros(s.shape[:-1], dtype=complex)
        for lam, c in self.coeffs.items():
            total = total + c * np.prod(s ** np.array(lam, dtype=float), axis=-1)
        return total

    def _gauss(self, s):
        s = np.asarray(s, dtype=complex)
        return np.exp(np.einsum('...i,ij,...j->...', s, self.gram, s))

    def __call__(self, s) -> np.ndarray:
        return self._poly(s) * self._gauss(s)

    def gradient(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        poly = self._poly(s)
        grad_poly = np.zeros(s.shape, dtype=complex)
        for lam, c in self.coeffs.items():
            for k in range(self.rank):
                if lam[k] == 0:
                    continue
                lowered = np.array(lam, dtype=float)
                lowered[k] -= 1
                grad_poly[..., k] += c * lam[k] * np.prod(s ** lowered, axis=-1)
        gs = s @ (self.gram + self.gram.T).T
        return (grad_poly + poly[..., None] * gs) * self._gauss(s)[..., None]

    def dual_star(self) -> 'ExpPolynomial':
        """f*(s) = conj(f)(-s): conjugated coefficients times (-1)^|lambda|."""
        return ExpPolynomial({lam: complex(c).conjugate() * (-1) ** sum(lam) for lam, c in self.coeffs.items()},
                             self.gram, self.rank)

    def to_dict(self) -> Dict:
        return {'kind': 'exp_polynomial', 'gram': np.asarray(self.gram).tolist(),
                'terms': [[list(lam), [complex(c).real, complex(c).imag]] for lam, c in sorted(self.coeffs.items())]}


@dataclass(frozen=True)
class ChartFunction:
    """An additive test function pulled back to the torus through s = log(x)/ln q (principal branch)."""

    additive: ExpPolynomial
    q: float

    @property
    def rank(self) -> int:
        return self.additive.rank

    def __call__(self, points) -> np.ndarray:
        return self.additive(np.log(np.asarray(points, dtype=complex)) / math.log(self.q))

    def log_gradient(self, points) -> np.ndarray:
        s = np.log(np.asarray(points, dtype=complex)) / math.log(self.q)
        return self.additive.gradient(s) / math.log(self.q)

    def dual_star(self) -> 'ChartFunction':
        return ChartFunction(self.additive.dual_star(), self.q)

    def to_dict(self) -> Dict:
        return {'kind': 'chart', 'q': self.q, 'additive': self.additive.to_dict()}


def dual_star(f):
    """f*(x) = conj(f)(1/x); for Laurent polynomials: conjugate coefficients and negate exponents."""
    return f.dual_star()


def build_context(q: float, genus_spec: Mapping, seed: int = 0) -> EvalContext:
    """Context from a config genus entry; unknown kinds raise SpectralError."""
    kind = genus_spec.get('kind')
    if kind == 'one_minus_c_over_x':
        genus = canonical_genus(q, genus_spec.get('c'), genus_spec.get('scale', 1.0))
    elif kind == 'function_field':
        genus = function_field_genus([complex(a[0], a[1]) for a in genus_spec.get('alphas', [])], q)
    elif kind == 'constant':
        genus = constant_genus(genus_spec.get('value', 1.0))
    elif kind == 's_plus_c':
        return EvalContext(q=1.0, genus=additive_genus(genus_spec.get('c', ADDITIVE_C)), mode=ADDITIVE)
    elif kind == 'bridge':
        genus = bridge_genus(q, genus_spec.get('c', ADDITIVE_C))
    else:
        raise SpectralError(f"Unknown genus kind {kind}")
    return EvalContext(q=q, genus=genus)
