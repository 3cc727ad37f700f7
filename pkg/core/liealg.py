"""
Exact Chevalley-basis model of the Lie algebra and the orbit oracle.

Structure constants follow the extraspecial-pair construction, so every
bracket is an integer combination of basis vectors. Null spaces, ranks and
sl2 completions are computed exactly with sympy; the per-orbit grading and
multiplicity data come from the root combinatorics and are cross-checked
against the oracle's centralizer dimensions.
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple
import itertools
import logging
import math

import numpy as np
import sympy

from core.errors import ConsistencyError, SpectralError
from core.rootsys import RootDatum, WeylElement, dominant_conjugate, stabilizer

logger = logging.getLogger(__name__)

ORACLE_SEED = 20240611

# Key of a weight of the centralizer torus: (weights on the cocharacter basis, phase mod 1)
WeightKey = Tuple[Tuple[int, ...], Fraction]


@dataclass(frozen=True, eq=False)
class LieAlgebraModel:
    """Chevalley basis h_1..h_r, then e_alpha for rd.roots (positive roots, then negatives)."""

    rd: RootDatum
    ad_basis: np.ndarray = field(repr=False)
    structure_constants: Dict[Tuple[int, int], int] = field(repr=False)

    @property
    def dimension(self) -> int:
        return int(self.ad_basis.shape[0])

    @property
    def rank(self) -> int:
        return self.rd.rank

    def root_basis_index(self, root_index: int) -> int:
        return self.rank + root_index

    def basis_labels(self) -> List[str]:
        labels = [f"h{i + 1}" for i in range(self.rank)]
        labels += [f"e{tuple(int(v) for v in alpha)}" for alpha in self.rd.roots]
        return labels

    @cached_property
    def _ad_sympy(self) -> List[sympy.Matrix]:
        return [sympy.Matrix(m.tolist()) for m in self.ad_basis]

    def zero(self) -> sympy.Matrix:
        return sympy.zeros(self.dimension, 1)

    def ad(self, u: sympy.Matrix) -> sympy.Matrix:
        result = sympy.zeros(self.dimension, self.dimension)
        for k in range(self.dimension):
            if u[k] != 0:
                result += u[k] * self._ad_sympy[k]
        return result

    def bracket(self, u: sympy.Matrix, v: sympy.Matrix) -> sympy.Matrix:
        return self.ad(u) * v

    def root_vector(self, root_index: int, scale=1) -> sympy.Matrix:
        vec = self.zero()
        vec[self.root_basis_index(root_index)] = sympy.nsimplify(scale)
        return vec

    def cartan_vector(self, coweight: Sequence) -> sympy.Matrix:
        """Element of the Cartan subalgebra from Lambda^vee coordinates."""
        coeffs = sympy.Matrix(self.rd.simple_coroots.tolist()).T.solve(
            sympy.Matrix([sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in coweight]))
        vec = self.zero()
        for i in range(self.rank):
            vec[i] = coeffs[i]
        return vec


@dataclass(frozen=True)
class Sl2Triple:
    e: sympy.Matrix
    h: sympy.Matrix
    f: sympy.Matrix
    phi_label: str = ''
    support: Tuple[int, ...] = ()
    coweight: Optional[Tuple[Fraction, ...]] = None
    scales: Tuple = ()

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.e)


@dataclass(frozen=True)
class ComponentClass:
    label: str
    phase: Tuple[Fraction, ...]
    weight: Fraction
    toral: bool = True

    def point(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.array([float(p) for p in self.phase]))


@dataclass(frozen=True, eq=False)
class NilpotentOrbitRecord:
    name: str
    triple: Sl2Triple
    h_dominant: Tuple[Fraction, ...]
    degrees: Tuple[int, ...]
    orbit_dim: int
    c_e_dim: int
    c_phi_dim: int
    torus_basis: np.ndarray
    torus_weights: np.ndarray
    classes: Tuple[ComponentClass, ...]
    multiplicity: Dict[str, Dict[int, Tuple[Tuple[WeightKey, int], ...]]] = field(repr=False)
    levi_weyl: Tuple[WeylElement, ...] = field(repr=False)
    coset_representatives: Tuple[WeylElement, ...] = field(repr=False)
    w_of_e: Tuple[WeylElement, ...] = field(repr=False)
    phi_root_weights: Tuple[Tuple[int, ...], ...] = ()
    weyl_phi_order: int = 1
    externally_sourced: bool = False

    @property
    def torus_rank(self) -> int:
        return int(self.torus_basis.shape[0])

    @property
    def is_zero(self) -> bool:
        return self.triple.is_zero

    @property
    def component_order(self) -> int:
        return len(self.classes)

    def h_half(self) -> np.ndarray:
        return np.array([float(v) / 2.0 for v in self.h_dominant])

    def class_by_label(self, label: str) -> ComponentClass:
        for cls in self.classes:
            if cls.label == label:
                return cls
        raise SpectralError(f"Orbit {self.name} has no component class {label}")

    def grading_dims(self) -> Dict[int, int]:
        dims = Counter(self.degrees)
        dims[0] += len(self.h_dominant)
        return dict(dims)

    def multiplicity_dims(self, cls_label: Optional[str] = None) -> Dict[int, int]:
        label = cls_label or self.classes[0].label
        return {i: sum(m for _, m in entries) for i, entries in self.multiplicity[label].items()}

    def coset_of(self, w: WeylElement) -> WeylElement:
        """Minimal-length representative of W^h w."""
        keys = {(u.matrix @ w.matrix).tobytes() for u in self.levi_weyl}
        for rep in self.coset_representatives:
            if rep.matrix.tobytes() in keys:
                return rep
        raise ConsistencyError(f"Weyl element {w.word} not found in any coset")


# structure constants


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _structure_constants(rd: RootDatum) -> Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], int]:
    """N_{alpha,beta} on pairs of positive roots with alpha < beta, extraspecial pairs positive."""
    pos = list(rd.positive_coefficients)
    order = {c: i for i, c in enumerate(pos)}
    roots = set(pos) | {_neg(c) for c in pos}

    def is_positive(c):
        return c in order

    def norm(c):
        return rd.inner_product(c, c)

    def string_p(a, b):
        p = 0
        while tuple(y - (p + 1) * x for x, y in zip(a, b)) in roots:
            p += 1
        return p

    special: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Fraction] = {}

    def N(x, y) -> Fraction:
        s = _add(x, y)
        if s not in roots:
            return Fraction(0)
        if is_positive(x) and is_positive(y):
            if order[x] < order[y]:
                return special[(x, y)]
            return -special[(y, x)]
        if not is_positive(x) and not is_positive(y):
            return -N(_neg(x), _neg(y))
        z = _neg(s)
        if is_positive(y) == is_positive(z):
            return norm(z) / norm(x) * N(y, z)
        return norm(z) / norm(y) * N(z, x)

    for xi in pos:
        pairs = [(a, b) for a in pos for b in pos if order[a] < order[b] and _add(a, b) == xi]
        if not pairs:
            continue
        a0, b0 = min(pairs, key=lambda ab: order[ab[0]])
        special[(a0, b0)] = Fraction(string_p(a0, b0) + 1)
        for a, b in pairs:
            if (a, b) == (a0, b0):
                continue
            total = Fraction(0)
            d1 = tuple(x - y for x, y in zip(b, a0))
            if d1 in roots:
                total += N(b, _neg(a0)) * N(a, _neg(b0)) / norm(d1)
            d2 = tuple(x - y for x, y in zip(a, a0))
            if d2 in roots:
                total += N(_neg(a0), a) * N(b, _neg(b0)) / norm(d2)
            special[(a, b)] = -norm(xi) * total / (-special[(a0, b0)])

    table = {}
    for a in pos + [_neg(c) for c in pos]:
        for b in pos + [_neg(c) for c in pos]:
            value = N(a, b)
            if value != 0:
                if value.denominator != 1 or abs(value) != string_p(a, b) + 1:
                    raise ConsistencyError(f"Structure constant N{a},{b} = {value} violates the Chevalley property")
                table[(a, b)] = int(value)
    return table


def build_lie_algebra(rd: RootDatum) -> LieAlgebraModel:
    """
    Build the Chevalley-basis model of the Lie algebra of rd.

    Args:
        rd: root datum of a supported type

    Returns:
        LieAlgebraModel whose ad operators satisfy the Jacobi identity exactly.
    """
    try:
        r = rd.rank
        coeff_roots = [tuple(c) for c in rd.positive_coefficients] + [_neg(c) for c in rd.positive_coefficients]
        index = {c: i for i, c in enumerate(coeff_roots)}
        dim = r + len(coeff_roots)
        table = _structure_constants(rd)
        coroot_coords = []
        cor_mat = sympy.Matrix(rd.simple_coroots.tolist()).T
        for cor in rd.coroots:
            sol = cor_mat.solve(sympy.Matrix([int(v) for v in cor]))
            coroot_coords.append([int(v) for v in sol])

        ad = np.zeros((dim, dim, dim), dtype=np.int64)
        for k, c in enumerate(coeff_roots):
            alpha = rd.roots[k]
            for i in range(r):
                weight = int(alpha @ rd.simple_coroots[i])
                # [h_i, e_alpha] = <alpha, alpha_i^vee> e_alpha
                ad[i, r + k, r + k] = weight
                ad[r + k, r + k, i] = -weight
            for m, d in enumerate(coeff_roots):
                s = _add(c, d)
                if all(v == 0 for v in s):
                    for i in range(r):
                        ad[r + k, i, r + m] = coroot_coords[k][i]
                elif s in index:
                    ad[r + k, r + index[s], r + m] = table[(c, d)]
        model = LieAlgebraModel(rd=rd, ad_basis=ad, structure_constants={
            (index[a], index[b]): v for (a, b), v in table.items()})
        verify_jacobi(model)
        logger.info(f"Built Lie algebra of {rd.label}: dimension {dim}")
        return model
    except ConsistencyError:
        raise
    except Exception as e:
        logger.error(f"Error building Lie algebra for {rd.label}: {e}", exc_info=True)
        raise ConsistencyError(f"Could not build Lie algebra for {rd.label}: {e}") from e


def verify_jacobi(model: LieAlgebraModel) -> None:
    """ad must be a representation: ad([x, y]) = [ad x, ad y] on all basis pairs, plus antisymmetry."""
    ad = model.ad_basis
    dim = model.dimension
    for a in range(dim):
        for b in range(dim):
            if not np.array_equal(ad[a][:, b], -ad[b][:, a]):
                raise ConsistencyError(f"Antisymmetry fails on basis pair ({a}, {b})")
            bracket = ad[a][:, b]
            lhs = np.tensordot(bracket, ad, axes=(0, 0))
            rhs = ad[a] @ ad[b] - ad[b] @ ad[a]
            if not np.array_equal(lhs, rhs):
                raise ConsistencyError(f"Jacobi identity fails on basis pair ({a}, {b})")


# sl2 triples


def _solve_linear(A: sympy.Matrix, b: sympy.Matrix) -> Optional[sympy.Matrix]:
    try:
        sol, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    return sol


def _is_nilpotent(model: LieAlgebraModel, e: sympy.Matrix) -> bool:
    ade = np.zeros((model.dimension, model.dimension), dtype=object)
    for k in range(model.dimension):
        if e[k] != 0:
            ade = ade + model.ad_basis[k].astype(object) * sympy.nsimplify(e[k])
    power = np.eye(model.dimension, dtype=object)
    for _ in range(model.dimension):
        power = power.dot(ade)
    return all(v == 0 for v in power.flatten())


def _root_support(model: LieAlgebraModel, e: sympy.Matrix) -> Optional[List[Tuple[int, object]]]:
    r = model.rank
    if any(e[i] != 0 for i in range(r)):
        return None
    return [(k - r, e[k]) for k in range(r, model.dimension) if e[k] != 0]


def complete_sl2(model: LieAlgebraModel, e: sympy.Matrix, label: str = '') -> Sl2Triple:
    """
    Complete a nilpotent element to an sl2 triple with dominant characteristic.

    Args:
        model: Lie algebra model
        e: nilpotent element (column vector in the Chevalley basis)
        label: orbit name stored on the triple

    Returns:
        Sl2Triple with [h,e] = 2e, [h,f] = -2f, [e,f] = h exactly.
    """
    rd = model.rd
    zero = model.zero()
    if all(v == 0 for v in e):
        return Sl2Triple(e=zero, h=zero, f=zero, phi_label=label, coweight=tuple(Fraction(0) for _ in range(rd.rank)))
    if not _is_nilpotent(model, e):
        raise ConsistencyError(f"Element is not nilpotent; cannot complete {label or 'e'} to an sl2 triple")

    support = _root_support(model, e)
    coweight = None
    if support is not None:
        roots = [rd.roots[i] for i, _ in support]
        coroots = [rd.coroots[i] for i, _ in support]
        A = sympy.Matrix([[int(a @ c) for c in coroots] for a in roots])
        c = _solve_linear(A, sympy.Matrix([2] * len(roots)))
        if c is not None:
            h_vec = sum((c[j] * sympy.Matrix([int(v) for v in coroots[j]]) for j in range(len(coroots))),
                        sympy.zeros(rd.rank, 1))
            coweight = tuple(Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in h_vec)
            w, dominant = dominant_conjugate(rd, coweight)
            if not all(a == b for a, b in zip(dominant, coweight)):
                # move e with h so that the characteristic is dominant
                moved = model.zero()
                for i, scale in support:
                    image = w.act(rd.roots[i])
                    moved[model.root_basis_index(rd.root_index(image))] = scale
                logger.debug(f"Conjugated {label or 'e'} by {w.word} into the dominant chamber")
                return complete_sl2(model, moved, label)
            h = model.cartan_vector(coweight)
        else:
            support = None
    if support is None:
        ade = model.ad(e)
        z = _solve_linear(-ade * ade, 2 * e)
        if z is None:
            raise ConsistencyError(f"No characteristic found for {label or 'e'}")
        h = ade * z
        logger.warning(f"Characteristic of {label or 'e'} found outside the Cartan subalgebra")

    system = model.ad(e).col_join(model.ad(h) + 2 * sympy.eye(model.dimension))
    rhs = h.col_join(model.zero())
    f = _solve_linear(system, rhs)
    if f is None:
        raise ConsistencyError(f"No sl2 completion exists for {label or 'e'}")
    triple = Sl2Triple(e=e, h=h, f=f, phi_label=label,
                       support=tuple(i for i, _ in support) if support else (),
                       coweight=coweight, scales=tuple(s for _, s in support) if support else ())
    check_triple(model, triple)
    return triple


def check_triple(model: LieAlgebraModel, triple: Sl2Triple) -> None:
    e, h, f = triple.e, triple.h, triple.f
    if model.bracket(h, e) != 2 * e or model.bracket(h, f) != -2 * f or model.bracket(e, f) != h:
        raise ConsistencyError(f"sl2 relations fail for {triple.phi_label}")


# orbit records


def _primitive(vec) -> Tuple[int, ...]:
    denominators = [sympy.fraction(sympy.nsimplify(v))[1] for v in vec]
    lcm = 1
    for d in denominators:
        lcm = lcm * int(d) // math.gcd(lcm, int(d))
    ints = [int(sympy.nsimplify(v) * lcm) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    ints = [v // g for v in ints]
    first = next(v for v in ints if v != 0)
    return tuple(v if first > 0 else -v for v in ints)


def _saturated_kernel(rows: np.ndarray, r: int) -> np.ndarray:
    """Z-basis of {v in Z^r : rows . v = 0} for kernels of dimension 0, 1 or r."""
    if rows.shape[0] == 0:
        return np.eye(r, dtype=np.int64)
    null = sympy.Matrix(rows.tolist()).nullspace()
    if not null:
        return np.zeros((0, r), dtype=np.int64)
    if len(null) == 1:
        return np.array([_primitive(null[0])], dtype=np.int64)
    raise SpectralError(f"Centralizer torus of dimension {len(null)} with nonzero e is not supported")


def _annihilator(basis: np.ndarray, r: int) -> np.ndarray:
    """Integer rows spanning the characters that vanish on the torus basis."""
    if basis.shape[0] == 0:
        return np.eye(r, dtype=np.int64)
    if basis.shape[0] == r:
        return np.zeros((0, r), dtype=np.int64)
    return _saturated_kernel(basis, r)


def _component_classes(rd: RootDatum, support_roots: np.ndarray, basis: np.ndarray) -> Tuple[ComponentClass, ...]:
    """Classes of D / D°, D the torus elements fixing every support root vector."""
    r = rd.rank
    if support_roots.shape[0] == 0:
        return (ComponentClass(label='1', phase=tuple(Fraction(0) for _ in range(r)), weight=Fraction(1)),)
    S = sympy.Matrix(support_roots.tolist())
    minors = []
    m = S.shape[0]
    for cols in itertools.combinations(range(r), m):
        minors.append(abs(int(S.extract(list(range(m)), list(cols)).det())))
    n = 0
    for v in minors:
        n = math.gcd(n, v)
    n = max(n, 1)
    annihilator = _annihilator(basis, r)
    found: Dict[Tuple[Fraction, ...], Tuple[Fraction, ...]] = {}
    for k in itertools.product(range(n), repeat=r):
        phi = tuple(Fraction(v, n) for v in k)
        if any(sum(int(b) * p for b, p in zip(beta, phi)) % 1 != 0 for beta in support_roots):
            continue
        key = tuple(sum(int(a) * p for a, p in zip(row, phi)) % 1 for row in annihilator)
        found.setdefault(key, phi)
    phases = sorted(found.values(), key=lambda ph: (any(ph), ph))
    weight = Fraction(1, len(phases))
    return tuple(ComponentClass(label='1' if i == 0 else f"c{i}", phase=ph, weight=weight)
                 for i, ph in enumerate(phases))


def _class_key(weights: Sequence[int], root: Optional[np.ndarray], phase: Sequence[Fraction]) -> WeightKey:
    if root is None:
        return tuple(0 for _ in weights), Fraction(0)
    return tuple(int(w) for w in weights), sum(int(a) * p for a, p in zip(root, phase)) % 1


def _multiplicities(rd: RootDatum, degrees, torus_weights, k: int, cls: ComponentClass):
    """Virtual characters g_i^e = g_i - g_{i+2}, keyed by torus weight and class phase."""
    by_degree: Dict[int, Counter] = {}
    for idx, d in enumerate(degrees):
        if d < 0:
            continue
        weights = torus_weights[idx] if cls.toral else tuple(0 for _ in range(k))
        key = _class_key(weights, rd.roots[idx], cls.phase)
        by_degree.setdefault(d, Counter())[key] += 1
    zero_key = (tuple(0 for _ in range(k)), Fraction(0))
    by_degree.setdefault(0, Counter())[zero_key] += rd.rank
    result = {}
    for i in sorted(by_degree):
        upper = by_degree.get(i + 2, Counter())
        current = by_degree[i]
        for key, mult in upper.items():
            if current.get(key, 0) < mult:
                raise ConsistencyError(f"Negative multiplicity for weight {key} in degree {i}")
        diff = current - upper
        if diff:
            result[i] = tuple(sorted(diff.items(), key=lambda kv: (kv[0][0], kv[0][1])))
    return result


def reflection_group_order(roots: Sequence[Tuple[int, ...]], k: int) -> int:
    """Order of the group generated by the reflections in roots, given as characters of a rank-k torus."""
    if not roots or k == 0:
        return 1
    stacked = sympy.Matrix([[int(v) for v in r] for r in roots])
    form = (stacked.T * stacked).pinv()
    generators = []
    for root in set(roots):
        b = sympy.Matrix([int(v) for v in root])
        generators.append(sympy.eye(k) - 2 * b * (b.T * form) / (b.T * form * b)[0])
    identity = sympy.ImmutableMatrix(sympy.eye(k))
    seen, frontier = {identity}, [identity]
    while frontier:
        g = frontier.pop()
        for s in generators:
            h = sympy.ImmutableMatrix(s * g)
            if h not in seen:
                seen.add(h)
                frontier.append(h)
    return len(seen)


def _centralizer_rank(model: LieAlgebraModel, stacked: sympy.Matrix, basis: List[sympy.Matrix]) -> int:
    if not basis:
        return 0
    rng = np.random.default_rng(ORACLE_SEED)
    x = sum((int(c) * v for c, v in zip(rng.integers(-40, 41, size=len(basis)), basis)), model.zero())
    return len(stacked.col_join(model.ad(x)).nullspace())


def _open_orbit_test(model: LieAlgebraModel, degrees, levi_indices, w: WeylElement, dim_g2: int) -> Tuple[bool, int]:
    """(w n)_2 meets the open orbit in g_2 iff [g_0, x] = g_2 for a generic x in (w n)_2."""
    rd = model.rd
    targets = []
    for alpha in rd.positive_roots:
        idx = rd.root_index(w.act(alpha))
        if degrees[idx] == 2:
            targets.append(idx)
    if dim_g2 == 0:
        return True, 0
    if not targets:
        return False, 0
    rng = np.random.default_rng(ORACLE_SEED + len(targets))
    x = model.zero()
    for idx, c in zip(targets, rng.integers(1, 97, size=len(targets))):
        x[model.root_basis_index(idx)] = int(c)
    adx = model.ad(x)
    columns = list(range(model.rank)) + [model.root_basis_index(i) for i in levi_indices]
    return adx.extract(list(range(model.dimension)), columns).rank() == dim_g2, len(targets)


def orbit_record(model: LieAlgebraModel, triple: Sl2Triple, name: str = '',
                 classes: Optional[Sequence[ComponentClass]] = None,
                 externally_sourced: bool = False) -> NilpotentOrbitRecord:
    """
    Compute the full orbit record of a triple with characteristic in the Cartan subalgebra.

    Args:
        model: Lie algebra model
        triple: sl2 triple from complete_sl2
        name: orbit name
        classes: component classes replacing the torus-derived ones
        externally_sourced: flag for catalog entries not derived by the oracle

    Returns:
        NilpotentOrbitRecord with all invariants checked.
    """
    rd = model.rd
    r = rd.rank
    name = name or triple.phi_label
    if triple.coweight is None:
        raise SpectralError(f"Orbit {name}: characteristic outside the Cartan subalgebra is not supported")
    h = triple.coweight
    degrees = []
    for alpha in rd.roots:
        d = sum(int(a) * v for a, v in zip(alpha, h))
        if d.denominator != 1:
            raise ConsistencyError(f"Orbit {name}: non-integral ad(h) eigenvalue {d}")
        degrees.append(int(d))
    degrees = tuple(degrees)

    ade, adh = model.ad(triple.e), model.ad(triple.h)
    c_e = ade.nullspace()
    stacked = ade.col_join(adh)
    c_phi = stacked.nullspace()

    support_roots = np.array([rd.roots[i] for i in triple.support], dtype=np.int64).reshape(-1, r)
    basis = _saturated_kernel(support_roots, r)
    k = basis.shape[0]
    rank_phi = _centralizer_rank(model, stacked, c_phi)
    if rank_phi != k:
        raise ConsistencyError(f"Orbit {name}: torus rank {k} differs from centralizer rank {rank_phi}")
    torus_weights = (rd.roots @ basis.T).astype(np.int64) if k else np.zeros((len(rd.roots), 0), dtype=np.int64)

    if classes is None:
        classes = _component_classes(rd, support_roots, basis)
    classes = tuple(classes)
    multiplicity = {cls.label: _multiplicities(rd, degrees, torus_weights, k, cls) for cls in classes}

    identity = multiplicity[classes[0].label]
    phi_roots = tuple(key[0] for key, mult in identity.get(0, ()) for _ in range(mult) if any(key[0]))
    if triple.is_zero:
        weyl_phi = len(rd.weyl)
    else:
        weyl_phi = reflection_group_order(phi_roots, k)

    levi = stabilizer(rd, h)
    cosets: Dict[frozenset, WeylElement] = {}
    for w in rd.weyl:
        key = frozenset((u.matrix @ w.matrix).tobytes() for u in levi)
        if key not in cosets or w.length < cosets[key].length:
            cosets[key] = w
    reps = tuple(sorted(cosets.values(), key=lambda w: (w.length, w.word)))
    levi_indices = [i for i, d in enumerate(degrees) if d == 0]
    dim_g2 = sum(1 for d in degrees if d == 2)
    w_of_e = tuple(w for w in reps if _open_orbit_test(model, degrees, levi_indices, w, dim_g2)[0])

    record = NilpotentOrbitRecord(
        name=name,
        triple=triple,
        h_dominant=tuple(h),
        degrees=degrees,
        orbit_dim=model.dimension - len(c_e),
        c_e_dim=len(c_e),
        c_phi_dim=len(c_phi),
        torus_basis=basis,
        torus_weights=torus_weights,
        classes=classes,
        multiplicity=multiplicity,
        levi_weyl=tuple(levi),
        coset_representatives=reps,
        w_of_e=w_of_e,
        phi_root_weights=phi_roots,
        weyl_phi_order=weyl_phi,
        externally_sourced=externally_sourced,
    )
    check_orbit_record(model, record)
    logger.debug(f"Orbit {name}: dim {record.orbit_dim}, torus rank {k}, |W(e)| = {len(w_of_e)}")
    return record


def slice_character_identity_holds(rd: RootDatum, record: NilpotentOrbitRecord) -> bool:
    """q^-1 T(Slice) - c_e = (q^-1 - 1) g as characters in (q, torus weight, class phase)."""
    for cls in record.classes:
        lhs: Counter = Counter()
        for i, entries in record.multiplicity[cls.label].items():
            for key, mult in entries:
                lhs[(Fraction(-2 - i, 2), key)] += mult
                lhs[(Fraction(i, 2), key)] -= mult
        rhs: Counter = Counter()
        k = record.torus_rank
        for idx, d in enumerate(record.degrees):
            weights = record.torus_weights[idx] if cls.toral else tuple(0 for _ in range(k))
            key = _class_key(weights, rd.roots[idx], cls.phase)
            rhs[(Fraction(d, 2) - 1, key)] += 1
            rhs[(Fraction(d, 2), key)] -= 1
        zero_key = (tuple(0 for _ in range(k)), Fraction(0))
        rhs[(Fraction(-1), zero_key)] += rd.rank
        rhs[(Fraction(0), zero_key)] -= rd.rank
        lhs = Counter({key: v for key, v in lhs.items() if v})
        rhs = Counter({key: v for key, v in rhs.items() if v})
        if lhs != rhs:
            return False
    return True


def check_orbit_record(model: LieAlgebraModel, record: NilpotentOrbitRecord) -> None:
    """Raise ConsistencyError when a multiplicity or dimension invariant fails."""
    rd = model.rd
    name = record.name
    dims = record.multiplicity_dims()
    if sum((i + 1) * d for i, d in dims.items()) != model.dimension:
        raise ConsistencyError(f"Orbit {name}: sum (i+1) dim g_i^e != dim g")
    grading = record.grading_dims()
    for i, d in grading.items():
        if i < 0:
            continue
        if d != sum(dims.get(j, 0) for j in range(i, max(grading) + 1, 2)):
            raise ConsistencyError(f"Orbit {name}: grading identity fails in degree {i}")
    if grading.get(1, 0) % 2:
        raise ConsistencyError(f"Orbit {name}: dim g_1 is odd")
    if record.orbit_dim % 2:
        raise ConsistencyError(f"Orbit {name}: orbit dimension is odd")
    if sum(dims.values()) != record.c_e_dim:
        raise ConsistencyError(f"Orbit {name}: multiplicity data disagree with dim c_e")
    if dims.get(0, 0) != record.c_phi_dim:
        raise ConsistencyError(f"Orbit {name}: dim g_0^e differs from dim c_phi")
    total = np.zeros(record.torus_rank, dtype=np.int64)
    for cls in record.classes:
        for i, entries in record.multiplicity[cls.label].items():
            counts = Counter(dict(entries))
            for (weights, phase), mult in entries:
                dual = (tuple(-w for w in weights), (-phase) % 1)
                if counts.get(dual, 0) != mult:
                    raise ConsistencyError(f"Orbit {name}: g_{i}^e is not self-dual for class {cls.label}")
                if cls is record.classes[0]:
                    total += mult * np.array(weights, dtype=np.int64)
    if np.any(total):
        raise ConsistencyError(f"Orbit {name}: torus weights of g^e do not sum to zero")
    if not slice_character_identity_holds(rd, record):
        raise ConsistencyError(f"Orbit {name}: slice character identity fails")


def class_character(record: NilpotentOrbitRecord, cls_label: str, degree: int) -> complex:
    """Trace of a component class on g_degree^e at the identity of the centralizer torus."""
    entries = record.multiplicity[cls_label].get(degree, ())
    return complex(sum(mult * np.exp(2j * np.pi * float(phase)) for (_, phase), mult in entries))


def w_of_e(record: NilpotentOrbitRecord) -> Tuple[WeylElement, ...]:
    """Shortest representatives of the cosets W/W^h whose Bruhat stratum meets the orbit openly."""
    return record.w_of_e


def dclp_dimension(record: NilpotentOrbitRecord, rd: RootDatum, w: WeylElement) -> Optional[int]:
    """dim G^h/B^h - dim g_2/(w n)_2 for w in W(e), None when the stratum is empty."""
    rep = record.coset_of(w)
    if rep not in record.w_of_e:
        return None
    levi_positive = sum(1 for d in record.degrees[:rd.n_positive] if d == 0)
    dim_g2 = sum(1 for d in record.degrees if d == 2)
    wn2 = sum(1 for alpha in rd.positive_roots if record.degrees[rd.root_index(rep.act(alpha))] == 2)
    return levi_positive - (dim_g2 - wn2)


def springer_stratum_dimension(record: NilpotentOrbitRecord, rd: RootDatum, w: WeylElement) -> Optional[int]:
    """dim g_[0,1] - dim (w b)_[0,1] for w in W(e), None when the stratum is empty."""
    rep = record.coset_of(w)
    if rep not in record.w_of_e:
        return None
    g01 = rd.rank + sum(1 for d in record.degrees if d in (0, 1))
    wb01 = rd.rank + sum(1 for alpha in rd.positive_roots
                         if record.degrees[rd.root_index(rep.act(alpha))] in (0, 1))
    return g01 - wb01


# catalog


def _g2_subregular_classes() -> Tuple[ComponentClass, ...]:
    return (
        ComponentClass(label='1', phase=(Fraction(0), Fraction(0)), weight=Fraction(1, 6)),
        ComponentClass(label='(12)', phase=(Fraction(1, 2), Fraction(0)), weight=Fraction(1, 2)),
        ComponentClass(label='(123)', phase=(Fraction(1, 3), Fraction(2, 3)), weight=Fraction(1, 3)),
    )


def default_b2_phase(lattice: str) -> Tuple[Fraction, Fraction]:
    if lattice == 'adjoint':
        return Fraction(1, 2), Fraction(1, 2)
    return Fraction(1, 2), Fraction(0)


def _b2_subregular_classes(phase: Sequence[Fraction]) -> Tuple[ComponentClass, ...]:
    return (
        ComponentClass(label='1', phase=(Fraction(0), Fraction(0)), weight=Fraction(1, 2)),
        ComponentClass(label='s', phase=tuple(Fraction(p) for p in phase), weight=Fraction(1, 2), toral=False),
    )


def _catalog_candidates(model: LieAlgebraModel, scales: Optional[Dict[str, Sequence]] = None):
    rd = model.rd
    r = rd.rank
    candidates = [('zero', [])]
    for size in range(1, r + 1):
        for subset in itertools.combinations(range(r), size):
            candidates.append((f"simple{''.join(str(i + 1) for i in subset)}", [rd.root_index(rd.simple_roots[i]) for i in subset]))
    if rd.type_label == 'G2':
        # e_{3a+b} + e_{a+b}: an orthogonal pair of roots, one long and one short
        long_root = rd.simple_roots[0] * 3 + rd.simple_roots[1]
        short_root = rd.simple_roots[0] + rd.simple_roots[1]
        candidates.append(('g2_extra', [rd.root_index(long_root), rd.root_index(short_root)]))
    built = []
    for tag, support in candidates:
        factors = list((scales or {}).get(tag, [1] * len(support)))
        e = model.zero()
        for idx, s in zip(support, factors):
            e[model.root_basis_index(idx)] = sympy.nsimplify(s)
        built.append((tag, e))
    return built


def _orbit_names(records_dims: List[Tuple[str, int, Tuple[int, ...]]], model: LieAlgebraModel) -> Dict[str, str]:
    rd = model.rd
    names = {}
    nonzero = [(tag, dim) for tag, dim, _ in records_dims if dim > 0]
    max_dim = max((dim for _, dim in nonzero), default=0)
    min_dim = min((dim for _, dim in nonzero), default=0)
    min_count = sum(1 for _, dim in nonzero if dim == min_dim)
    sub_dim = model.dimension - rd.rank - 2
    for tag, dim, support in records_dims:
        if dim == 0:
            names[tag] = 'zero'
        elif dim == max_dim:
            names[tag] = 'regular'
        elif dim == min_dim and min_count == 1:
            names[tag] = 'minimal'
        elif dim == sub_dim and sum(1 for _, d in nonzero if d == sub_dim) == 1:
            names[tag] = 'subregular'
        elif len(support) == 1 and len(set(rd.symmetrizer)) > 1:
            idx = support[0]
            coeffs = rd.positive_coefficients[idx % rd.n_positive]
            long = rd.inner_product(coeffs, coeffs) == 2 * max(rd.symmetrizer)
            names[tag] = 'long_root' if long else 'short_root'
        else:
            names[tag] = f"root_{''.join(str(i) for i in support)}"
    return names


def orbit_catalog(model: LieAlgebraModel, b2_phase: Optional[Sequence] = None,
                  scales: Optional[Dict[str, Sequence]] = None) -> List[NilpotentOrbitRecord]:
    """
    One record per nilpotent orbit, ordered by orbit dimension.

    Args:
        model: Lie algebra model
        b2_phase: phase of the non-toral class on the B2/C2 subregular orbit
        scales: optional root-vector rescaling per candidate tag

    Returns:
        List of NilpotentOrbitRecord.
    """
    rd = model.rd
    try:
        triples = {}
        for tag, e in _catalog_candidates(model, scales):
            triple = complete_sl2(model, e, label=tag)
            key = tuple(triple.coweight)
            if key not in triples:
                triples[key] = (tag, triple)
        dims = []
        for key, (tag, triple) in triples.items():
            c_e = len(model.ad(triple.e).nullspace())
            dims.append((tag, model.dimension - c_e, triple.support))
        names = _orbit_names(dims, model)
        records = []
        for key, (tag, triple) in triples.items():
            name = names[tag]
            classes, external = None, False
            if name == 'subregular' and rd.type_label == 'G2':
                classes = _g2_subregular_classes()
            elif name == 'subregular' and rd.type_label in ('B2', 'C2'):
                classes = _b2_subregular_classes(b2_phase or default_b2_phase(rd.lattice))
                external = True
            triple = Sl2Triple(e=triple.e, h=triple.h, f=triple.f, phi_label=name, support=triple.support,
                               coweight=triple.coweight, scales=triple.scales)
            records.append(orbit_record(model, triple, name=name, classes=classes, externally_sourced=external))
        records.sort(key=lambda rec: (rec.orbit_dim, rec.name))
        logger.info(f"Orbit catalog of {rd.label}: {[rec.name for rec in records]}")
        return records
    except SpectralError:
        raise
    except Exception as e:
        logger.error(f"Error building orbit catalog for {rd.label}: {e}", exc_info=True)
        raise ConsistencyError(f"Could not build orbit catalog for {rd.label}: {e}") from e


def record_to_dict(record: NilpotentOrbitRecord) -> Dict:
    """JSON-ready description used by the `orbits` subcommand."""
    return {
        'name': record.name,
        'h': [str(v) for v in record.h_dominant],
        'orbit_dim': record.orbit_dim,
        'c_e_dim': record.c_e_dim,
        'c_phi_dim': record.c_phi_dim,
        'torus_basis': record.torus_basis.tolist(),
        'component_classes': [
            {'label': c.label, 'phase': [str(p) for p in c.phase], 'weight': str(c.weight), 'toral': c.toral}
            for c in record.classes
        ],
        'multiplicities': {
            cls: {str(i): [{'weights': list(key[0]), 'phase': str(key[1]), 'mult': m} for key, m in entries]
                  for i, entries in data.items()}
            for cls, data in record.multiplicity.items()
        },
        'w_of_e': [list(w.word) for w in record.w_of_e],
        'weyl_phi_order': record.weyl_phi_order,
        'externally_sourced': record.externally_sourced,
    }
