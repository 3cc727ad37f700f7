"""
Closed-form evaluators used as independent oracles for the orbit sum:
the regular orbit, the three component classes of the G2 subregular orbit,
its additive counterpart with the symbolic discrete-point template, residue
and scissor checks, and the q -> 1 bridge between the two modes.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence
import logging
import math

import numpy as np
import sympy

from constants.constants import ADDITIVE_C, DEFAULT_SHIFT, LAURENT_NODES, LAURENT_RADIUS
from core.errors import SpectralError
from core.genus import (
    ChartFunction,
    EvalContext,
    ExpPolynomial,
    big_psi,
    bridge_genus,
    laurent_data,
    residue_at_q,
    z_of,
)
from core.quad import ContourSpec, line_integral, torus_integral
from core.rootsys import RootDatum
from core.spectral import default_contour, eis_pairing

logger = logging.getLogger(__name__)

NU = np.exp(2j * np.pi / 3)


def _at(f: Callable, *point) -> complex:
    return complex(f(np.array([point], dtype=complex))[0])


def regular_closed_form(rd: RootDatum, ctx: EvalContext, f1: Callable, f2: Callable) -> complex:
    """
    Regular-orbit term: sum over the center of f1(q^{rho^vee} c) f2(q^{-rho^vee} c), divided by
    |center| prod_i Z(q^{m_i + 1}). Additively f1(rho^vee) f2(-rho^vee) / prod_i Z(m_i + 1).
    """
    rho = rd.rho_check_array()
    denominator = 1.0 + 0j
    for m in rd.exponents:
        denominator *= complex(z_of(ctx, ctx.shift(ctx.unit, m + 1.0)))
    if ctx.additive:
        return _at(f1, *rho) * _at(f2, *(-rho)) / denominator
    total = 0j
    for c in rd.center.points():
        total += _at(f1, *(ctx.q ** rho * c)) * _at(f2, *(ctx.q ** (-rho) * c))
    return total / (rd.center.order * denominator)


def regular_residues(rd: RootDatum, ctx: EvalContext, radius: float = LAURENT_RADIUS,
                     nodes: int = LAURENT_NODES) -> Dict[str, complex]:
    """
    Residue at u = q of the regular density along each simple root.

    In the etale coordinate u = x^alpha near q^{rho^vee} the only factor of the density with a
    pole on x^alpha = q is Z(u)/(little_z u), so each entry is that rank-one residue. The
    circle radius is scaled by the root length; the values agree across roots, which checks
    that the residue does not depend on the circle.
    """
    out = {}
    for i, alpha in enumerate(rd.simple_roots):
        value = residue_at_q(ctx, radius=radius / rd.symmetrizer[i], nodes=nodes)
        out[str(tuple(int(v) for v in alpha))] = complex(value)
    return out


def scissor_sides(ctx: EvalContext, f: Callable, eps: float = 0.1, nodes: int = 256):
    """
    (difference, expected) for the rank-one stratification identity:
    int over (1+eps)U(1) minus int over (1-eps)U(1) of Psi f equals psi(1) f(1);
    additively the vertical lines Re s = +-eps and psi(0) f(0).
    """
    def integrand(x):
        return big_psi(ctx, x[:, 0]) * f(x)

    if ctx.additive:
        outer = line_integral(integrand, ContourSpec(rank=1, shift=(complex(eps),), line_nodes=4 * nodes))
        inner = line_integral(integrand, ContourSpec(rank=1, shift=(complex(-eps),), line_nodes=4 * nodes))
        expected = complex(ctx.genus(0.0)) * _at(f, 0.0)
    else:
        outer = torus_integral(integrand, ContourSpec(rank=1, shift=(complex(1 + eps),), nodes=nodes))
        inner = torus_integral(integrand, ContourSpec(rank=1, shift=(complex(1 - eps),), nodes=nodes))
        expected = complex(ctx.genus(1.0)) * _at(f, 1.0)
    return outer.value - inner.value, expected


# G2 subregular orbit


@dataclass
class G2ClosedForms:
    identity: complex
    transposition: complex
    three_cycle: complex
    laurent: tuple = ()

    @property
    def total(self) -> complex:
        return self.identity + self.transposition + self.three_cycle

    def to_dict(self) -> Dict:
        return {name: [v.real, v.imag] for name, v in
                (('1', self.identity), ('(12)', self.transposition), ('(123)', self.three_cycle))}


def d_operator(ctx: EvalContext, f, laurent, point) -> complex:
    """(z_-1 + 2 z_0) f + z_-1 (x1 d1 - x2 d2) f at a point of the diagonal."""
    z_m1, z_0 = laurent
    pt = np.array([point], dtype=complex)
    grad = f.log_gradient(pt)[0]
    return (z_m1 + 2 * z_0) * complex(f(pt)[0]) + z_m1 * (grad[0] - grad[1])


def _w0_pullback(f):
    """g(x) = f(w0 x); on G2 w0 inverts every coordinate."""
    if hasattr(f, 'act'):
        return f.act(-np.eye(2, dtype=np.int64))
    raise SpectralError("Closed forms need a Laurent polynomial test function")


def g2_subregular_closed_forms(ctx: EvalContext, f1, f2=None) -> G2ClosedForms:
    """
    The three class terms of the G2 subregular contribution in (x1, x2) coordinates.

    Args:
        ctx: multiplicative context
        f1: LaurentPolynomial on the G2 torus
        f2: second test function (defaults to the dual star of f1)

    Returns:
        G2ClosedForms with the identity, transposition and three-cycle terms.
    """
    if ctx.additive:
        raise SpectralError("Use additive_g2_closed_form in additive mode")
    q = ctx.q
    f2 = f1.dual_star() if f2 is None else f2
    g = _w0_pullback(f2)
    laurent = laurent_data(ctx)

    def Z(v):
        return complex(z_of(ctx, v))

    def identity_part(f):
        return d_operator(ctx, f, laurent, (q, q)) + 3 * Z(q ** 2) * _at(f, q, 1.0)

    def transposition_part(f):
        return Z(-1.0) * (_at(f, -q, q) + _at(f, q, -q)) + Z(-q ** 2) * _at(f, -q, -1.0)

    def cycle_part(f):
        return Z(1.0 / NU) * _at(f, q * NU, q * NU ** 2) + Z(NU) * _at(f, q * NU ** 2, q * NU)

    identity = identity_part(f1) * identity_part(g) / (6 * Z(q ** 2) ** 3 * Z(q ** 3))
    transposition = transposition_part(f1) * transposition_part(g) / (
        2 * Z(q ** 2) ** 2 * Z(-q ** 2) * Z(-q ** 3))
    cycle = cycle_part(f1) * cycle_part(g) / (
        3 * Z(q ** 2) * Z(q ** 2 * NU) * Z(q ** 2 * NU ** 2) * Z(q ** 3))
    return G2ClosedForms(identity, transposition, cycle, laurent)


def additive_g2_closed_form(ctx: EvalContext, f1: ExpPolynomial, f2: Optional[ExpPolynomial] = None) -> complex:
    """(1/6) A[f1] A[g] / (Z(2)^3 Z(3)), A[f] = z_-1 (d1 - d2) f + 2 z_0 f at (1, 1) plus 3 Z(2) f(1, 0)."""
    if not ctx.additive:
        raise SpectralError("additive_g2_closed_form needs an additive context")
    f2 = f1.dual_star() if f2 is None else f2
    z_m1, z_0 = laurent_data(ctx)

    def g(s):
        return f2(-np.asarray(s))

    def g_gradient(s):
        return -f2.gradient(-np.asarray(s))

    def part(fn, grad):
        pt = np.array([[1.0, 1.0]], dtype=complex)
        d = grad(pt)[0]
        return z_m1 * (d[0] - d[1]) + 2 * z_0 * complex(fn(pt)[0]) + 3 * complex(z_of(ctx, 2.0)) * _at(fn, 1.0, 0.0)

    value = part(f1, f1.gradient) * part(g, g_gradient)
    return value / (6 * complex(z_of(ctx, 2.0)) ** 3 * complex(z_of(ctx, 3.0)))


@dataclass
class TemplateMatch:
    emitted: sympy.Expr
    template: sympy.Expr
    coefficients: Dict[str, sympy.Expr] = field(default_factory=dict)

    @property
    def matches(self) -> bool:
        return all(v == 0 for v in self.coefficients.values())


def langlands_g2_match() -> TemplateMatch:
    """
    Expand (1 + (12)) xi(x1 - x2) f(x1, x2) on the diagonal with xi(x) = -1/x + a + b x,
    add the 3 xi(2) f(1, 0) stratum term, and compare coefficient-wise with the
    template (d1 - d2) f - 2 a f - 3 xi(2) f(1, 0).
    """
    d, a, b, xi2 = sympy.symbols('d a b xi2')
    F0, F1, F2, F11, F12, F22, G = sympy.symbols('F0 F1 F2 F11 F12 F22 G')

    def taylor(u, v):
        return F0 + F1 * u + F2 * v + (F11 * u ** 2 + 2 * F12 * u * v + F22 * v ** 2) / 2

    def xi(x):
        return -1 / x + a + b * x

    expr = xi(d) * taylor(d / 2, -d / 2) + xi(-d) * taylor(-d / 2, d / 2)
    expanded = sympy.expand(expr)
    pole = expanded.coeff(d, -1)
    if sympy.simplify(pole) != 0:
        raise SpectralError(f"Diagonal expansion keeps a pole: {pole}")
    emitted = sympy.expand(expanded.coeff(d, 0) + 3 * xi2 * G)
    template = (F1 - F2) - 2 * a * F0 - 3 * xi2 * G
    residual = sympy.Poly(sympy.expand(emitted + template), F0, F1, F2, F11, F12, F22, G)
    coefficients = {str(monom): coeff for monom, coeff in zip(residual.monoms(), residual.coeffs())}
    if not coefficients:
        coefficients = {'0': sympy.Integer(0)}
    return TemplateMatch(emitted=emitted, template=template, coefficients=coefficients)


# q -> 1 bridge


@dataclass
class BridgePoint:
    delta: float
    q: float
    multiplicative: complex
    rescaled: complex
    additive: complex

    @property
    def error(self) -> float:
        return abs(self.rescaled - self.additive)


def genus_mode_bridge(rd: RootDatum, f: ExpPolynomial, deltas: Sequence[float], c: float = ADDITIVE_C,
                      kappa: float = DEFAULT_SHIFT, nodes: int = 4096,
                      additive_value: Optional[complex] = None) -> List[BridgePoint]:
    """
    Pairings at q = 1 + delta with the bridge genus and the chart pullback of f, rescaled
    by (ln q)^(-2r), against the additive pairing with psi(s) = s + c.
    """
    from core.genus import ADDITIVE, additive_genus

    ctx_add = EvalContext(q=1.0, genus=additive_genus(c), mode=ADDITIVE)
    if additive_value is None:
        additive_value = eis_pairing(rd, ctx_add, f, f.dual_star(), default_contour(rd, ctx_add, kappa)).value
    points = []
    for delta in deltas:
        q = 1.0 + delta
        ctx = EvalContext(q=q, genus=bridge_genus(q, c))
        chart = ChartFunction(f, q)
        contour = default_contour(rd, ctx, kappa, nodes=nodes)
        value = eis_pairing(rd, ctx, chart, chart.dual_star(), contour).value
        rescaled = value * math.log(q) ** (-2 * rd.rank)
        points.append(BridgePoint(delta=delta, q=q, multiplicative=value, rescaled=rescaled, additive=additive_value))
        logger.info(f"Bridge at q = {q}: rescaled {rescaled:.10g}, additive {additive_value:.10g}")
    return points
