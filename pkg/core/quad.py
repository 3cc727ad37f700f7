"""
Quadrature on shifted compact tori and on vertical affine subspaces.

Trapezoid product rules throughout: the integrands are analytic and periodic
on the chosen contours, so convergence is geometric. Error estimates compare
the full grid with its every-other-node subgrid.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence
import logging

import numpy as np

from constants.constants import (
    DEFAULT_NODES,
    DEFAULT_OFFSET,
    LIMIT_LEVELS,
    LIMIT_POINTS,
    LIMIT_RADIUS,
    LINE_NODES,
    MAX_TRUNC_HEIGHT,
    TAIL_DECAY,
    TRUNC_HEIGHT,
)
from core.errors import DivergenceError, PoleCollisionError

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class ContourSpec:
    """
    Integration cycle.

    Multiplicative: nodes shift_j * exp(i(2 pi m/N + offset)), Haar weight N^-k.
    Additive: shift + i u with u in [-T, T]^k, weight (step / 2 pi)^k.
    """

    rank: int
    shift: tuple
    nodes: int = DEFAULT_NODES
    offset: float = DEFAULT_OFFSET
    trunc_height: float = TRUNC_HEIGHT
    line_nodes: int = LINE_NODES
    decay: str = 'gaussian'

    def with_offset(self, offset: float) -> 'ContourSpec':
        return replace(self, offset=offset)

    def with_nodes(self, nodes: int) -> 'ContourSpec':
        return replace(self, nodes=nodes)

    def to_dict(self):
        return {
            'rank': self.rank,
            'shift': [[complex(s).real, complex(s).imag] for s in self.shift],
            'nodes': self.nodes,
            'offset': self.offset,
            'trunc_height': self.trunc_height,
            'line_nodes': self.line_nodes,
        }


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error_estimate: float
    nodes_used: int

    def to_dict(self):
        return {'value': [self.value.real, self.value.imag], 'error_estimate': self.error_estimate,
                'nodes_used': self.nodes_used}


def _evaluate(integrand: Callable, points: np.ndarray) -> np.ndarray:
    values = np.empty(points.shape[0], dtype=complex)
    for start in range(0, points.shape[0], CHUNK_SIZE):
        values[start:start + CHUNK_SIZE] = integrand(points[start:start + CHUNK_SIZE])
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise PoleCollisionError(f"Integrand is not finite at {bad} quadrature nodes")
    return values


def torus_grid(spec: ContourSpec) -> np.ndarray:
    """All nodes of the product rule as an (N^k, k) array."""
    angles = 2.0 * np.pi * np.arange(spec.nodes) / spec.nodes + spec.offset
    circle = np.exp(1j * angles)
    axes = [complex(s) * circle for s in spec.shift]
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack([m.ravel() for m in mesh], axis=-1)


def torus_integral(integrand: Callable[[np.ndarray], np.ndarray], spec: ContourSpec) -> QuadResult:
    """
    Haar integral over the shifted compact torus.

    Args:
        integrand: vectorised map from (M, k) torus points to (M,) values
        spec: contour

    Returns:
        QuadResult with error estimated from the N/2 subgrid.
    """
    k, n = spec.rank, spec.nodes
    if k == 0:
        value = complex(integrand(np.zeros((1, 0), dtype=complex))[0])
        return QuadResult(value, 0.0, 1)
    values = _evaluate(integrand, torus_grid(spec)).reshape((n,) * k)
    full = complex(values.mean())
    coarse = complex(values[(slice(None, None, 2),) * k].mean()) if n >= 4 else full
    return QuadResult(full, abs(full - coarse), n ** k)


def _line_samples(integrand: Callable, spec: ContourSpec, T: float, m: int):
    k = spec.rank
    u = np.linspace(-T, T, m)
    axes = [float(np.real(s)) + 1j * u for s in spec.shift]
    mesh = np.meshgrid(*axes, indexing='ij')
    points = np.stack([a.ravel() for a in mesh], axis=-1)
    return u, _evaluate(integrand, points).reshape((m,) * k)


def _line_trapezoid(values: np.ndarray, step: float) -> complex:
    k, m = values.ndim, values.shape[0]
    weights = np.full(m, step)
    weights[0] = weights[-1] = step / 2.0
    weighted = values
    for axis in range(k):
        shape = [1] * k
        shape[axis] = m
        weighted = weighted * weights.reshape(shape)
    return complex(weighted.sum()) / (2.0 * np.pi) ** k


def _envelope(values: np.ndarray) -> np.ndarray:
    """max |integrand| over slices at distance u from the origin along any axis, symmetrised."""
    k = values.ndim
    magnitude = np.abs(values)
    env = np.max([magnitude.max(axis=tuple(a for a in range(k) if a != axis)) if k > 1 else magnitude
                  for axis in range(k)], axis=0)
    return np.maximum(env, env[::-1])


def line_integral(integrand: Callable[[np.ndarray], np.ndarray], spec: ContourSpec) -> QuadResult:
    """
    Integral over shift + i R^k against ds/(2 pi i) per coordinate.

    Starts at |Im s| <= spec.trunc_height and doubles the window (same step) until the
    outer samples drop below TAIL_DECAY times the peak, up to MAX_TRUNC_HEIGHT. A log-linear
    fit over the outer decade must show decay.

    Raises:
        DivergenceError: the outer decade does not decay, or the tail is still above
            1e-6 of the peak at the widest window
    """
    k, m, T = spec.rank, spec.line_nodes, spec.trunc_height
    if k == 0:
        value = complex(integrand(np.zeros((1, 0), dtype=complex))[0])
        return QuadResult(value, 0.0, 1)
    while True:
        u, values = _line_samples(integrand, spec, T, m)
        env = _envelope(values)
        peak = float(env.max())
        edge = max(2, m // 10)
        tail = float(env[-edge:].max())
        if tail <= TAIL_DECAY * peak:
            break
        slope = np.polyfit(u[-edge:], np.log(np.maximum(env[-edge:], 1e-300)), 1)[0]
        if slope > -1e-8:
            raise DivergenceError(f"Line integrand does not decay: log-slope {slope:.3e} over |Im s| in "
                                  f"[{u[-edge]:.3g}, {T:.3g}]")
        if T >= MAX_TRUNC_HEIGHT:
            if tail > 1e-6 * peak:
                raise DivergenceError(f"Line integrand does not decay: boundary {tail:.3e} against peak {peak:.3e}")
            logger.debug(f"Line integrand tail {tail:.3e} above decay target at |Im s| <= {T:g}")
            break
        T, m = 2.0 * T, 2 * m - 1
        logger.debug(f"Widening line window to |Im s| <= {T:g} ({m} nodes per axis)")

    step = u[1] - u[0]
    full = _line_trapezoid(values, step)
    coarse = _line_trapezoid(values[(slice(None, None, 2),) * k], 2 * step)
    error = max(abs(full - coarse), tail * (2 * T) ** k / (2 * np.pi) ** k)
    return QuadResult(full, error, m ** k)


def cancellation_limit(fn: Callable[[np.ndarray], np.ndarray], radius: float = LIMIT_RADIUS,
                       levels: int = LIMIT_LEVELS, points: int = LIMIT_POINTS,
                       tolerance: float = 1e-6) -> QuadResult:
    """
    Value at eps = 0 of a function that is regular there but is formed from singular pieces.

    Circle means over eps = r e^{i theta} return the constant Laurent coefficient up to
    r^K terms (K = points); Richardson extrapolation over r, r/2, r/4 removes those.
    A non-negligible mean of eps * fn(eps) signals a genuine pole.

    Args:
        fn: vectorised in eps; returns shape (K,) or (K, M) for a batch of M limits
        radius: largest circle radius
        levels: number of halvings
        points: nodes per circle
        tolerance: relative size of the residue treated as divergence

    Returns:
        QuadResult whose value is a complex, or an (M,) array for batched fn.
    """
    theta = np.exp(2j * np.pi * (np.arange(points) + 0.5) / points)
    table = []
    residue = None
    for level in range(levels):
        eps = radius * 2.0 ** (-level) * theta
        values = np.asarray(fn(eps), dtype=complex)
        if not np.all(np.isfinite(values)):
            raise PoleCollisionError("Cancellation samples hit a pole")
        table.append(values.mean(axis=0))
        weights = eps.reshape((-1,) + (1,) * (values.ndim - 1))
        residue = (values * weights).mean(axis=0)
    scale = 1.0 + np.max(np.abs(np.array(table)), axis=0)
    if np.any(np.abs(residue) > tolerance * scale):
        raise DivergenceError(f"Limit does not exist: residue {np.max(np.abs(residue)):.3e}")
    current = table
    estimates = [table[-1]]
    for order in range(1, levels):
        factor = 2.0 ** (points * order)
        current = [(factor * current[i + 1] - current[i]) / (factor - 1.0) for i in range(len(current) - 1)]
        estimates.append(current[-1])
    value = estimates[-1]
    error = float(np.max(np.abs(estimates[-1] - estimates[-2]))) if len(estimates) > 1 else 0.0
    if np.ndim(value) == 0:
        value = complex(value)
    return QuadResult(value, error, levels * points)


def weyl_average(values: Sequence[complex], weights: Sequence) -> complex:
    """Haar integral over a disconnected compact group: sum of class values times |class|/|group|."""
    if len(values) != len(weights):
        raise ValueError("One weight per component class is required")
    return complex(sum(float(w) * complex(v) for v, w in zip(values, weights)))


def admissible_violations(positive_roots: np.ndarray, shift: Sequence, q: float, additive: bool = False):
    """Positive roots alpha with |shift^alpha| <= |q| (additively Re alpha(shift) <= 1)."""
    violated = []
    for alpha in positive_roots:
        if additive:
            ok = float(np.real(np.dot(alpha, np.asarray(shift, dtype=complex)))) > 1.0
        else:
            ok = abs(np.prod(np.asarray(shift, dtype=complex) ** alpha.astype(float))) > abs(q)
        if not ok:
            violated.append(tuple(int(v) for v in alpha))
    return violated
