"""
Root systems, Weyl groups and lattices for the split groups of rank at most two.

Characters are integer row vectors in a fixed Z-basis of the character lattice
Lambda; cocharacters use the dual basis and pair with characters by the dot
product. The basis is encoded by the matrix whose rows are the simple roots.
"""

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple
import itertools
import logging

import numpy as np
import sympy

from core.errors import ConsistencyError, UnsupportedTypeError

logger = logging.getLogger(__name__)

ADJOINT = 'adjoint'
SIMPLY_CONNECTED = 'simply_connected'
LATTICES = (ADJOINT, SIMPLY_CONNECTED)

# A_ij = <alpha_i^vee, alpha_j>
CARTAN_MATRICES = {
    'A1': [[2]],
    'A1xA1': [[2, 0], [0, 2]],
    'A2': [[2, -1], [-1, 2]],
    'B2': [[2, -1], [-2, 2]],
    'C2': [[2, -2], [-1, 2]],
    'G2': [[2, -3], [-1, 2]],
}

# (alpha_i, alpha_i) / 2, shortest roots have squared length 2
SYMMETRIZERS = {
    'A1': (1,),
    'A1xA1': (1, 1),
    'A2': (1, 1),
    'B2': (2, 1),
    'C2': (1, 2),
    'G2': (1, 3),
}

# Rows are simple roots in lattice coordinates, for lattices that are not
# the plain identity (adjoint) or transposed Cartan (simply connected) choice.
CUSTOM_BASES = {
    ('B2', ADJOINT): [[1, -1], [0, 1]],
    ('G2', ADJOINT): [[1, -1], [-1, 2]],
    ('G2', SIMPLY_CONNECTED): [[1, -1], [-1, 2]],
}

TYPE_ALIASES = {
    'A1XA1': 'A1xA1',
    'A1+A1': 'A1xA1',
    'D2': 'A1xA1',
}


@dataclass(frozen=True, eq=False)
class WeylElement:
    """An element of W acting on characters as column vectors (lambda -> M lambda)."""

    matrix: np.ndarray
    inverse: np.ndarray
    word: Tuple[int, ...]
    length: int

    @property
    def key(self) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.matrix.flatten())

    def act(self, lams: np.ndarray) -> np.ndarray:
        """Apply w to characters given as rows."""
        return np.asarray(lams) @ self.matrix.T

    def act_inverse(self, lams: np.ndarray) -> np.ndarray:
        return np.asarray(lams) @ self.inverse.T

    @property
    def coweight_matrix(self) -> np.ndarray:
        """Matrix of w on cocharacters (column convention), preserving the pairing."""
        return self.inverse.T

    @property
    def point_exponents(self) -> np.ndarray:
        """Rows k such that (w.x)_k = x^{row k}; uses (w.x)^lambda = x^{w^-1 lambda}."""
        return self.inverse.T


@dataclass(frozen=True)
class CenterGroup:
    """Center of G as phases phi in Lambda^vee (x = exp(2 pi i phi)) modulo the cocharacter lattice."""

    phases: Tuple[Tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        return len(self.phases)

    def points(self) -> np.ndarray:
        phi = np.array([[float(p) for p in ph] for ph in self.phases], dtype=float)
        return np.exp(2j * np.pi * phi)

    def compose(self, i: int, j: int) -> int:
        target = tuple((a + b) % 1 for a, b in zip(self.phases[i], self.phases[j]))
        return self.phases.index(target)


@dataclass(frozen=True, eq=False)
class RootDatum:
    type_label: str
    lattice: str
    cartan_matrix: np.ndarray
    symmetrizer: Tuple[int, ...]
    simple_roots: np.ndarray
    simple_coroots: np.ndarray
    positive_coefficients: Tuple[Tuple[int, ...], ...]
    positive_roots: np.ndarray
    positive_coroots: np.ndarray
    heights: Tuple[int, ...]
    exponents: Tuple[int, ...]
    rho: Tuple[Fraction, ...]
    rho_check: Tuple[Fraction, ...]
    weyl: Tuple[WeylElement, ...] = field(repr=False)
    center: CenterGroup = field(repr=False)

    @property
    def rank(self) -> int:
        return int(self.cartan_matrix.shape[0])

    @property
    def n_positive(self) -> int:
        return int(self.positive_roots.shape[0])

    @property
    def roots(self) -> np.ndarray:
        """All roots: positive roots followed by their negatives, same order."""
        return np.vstack([self.positive_roots, -self.positive_roots])

    @property
    def coroots(self) -> np.ndarray:
        return np.vstack([self.positive_coroots, -self.positive_coroots])

    @property
    def negative_roots(self) -> np.ndarray:
        return -self.positive_roots

    @property
    def w0(self) -> WeylElement:
        return max(self.weyl, key=lambda w: w.length)

    @property
    def identity(self) -> WeylElement:
        return self.weyl[0]

    @property
    def label(self) -> str:
        return f"{self.type_label}/{self.lattice}"

    def rho_check_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.rho_check])

    def root_index(self, lam: Sequence[int]) -> Optional[int]:
        """Index of a root in `roots`, or None when lam is not a root."""
        return self._lookup.get(tuple(int(v) for v in lam))

    def is_positive(self, lam: Sequence[int]) -> bool:
        idx = self.root_index(lam)
        return idx is not None and idx < self.n_positive

    def inversions(self, w: WeylElement) -> List[int]:
        """Indices of positive roots alpha with w^{-1} alpha < 0."""
        images = w.act_inverse(self.positive_roots)
        return [i for i, img in enumerate(images) if not self.is_positive(img)]

    def inner_product(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        """(a, b) for roots given by simple-root coefficients."""
        gram = self._gram
        return sum((Fraction(int(a[i]) * int(b[j])) * gram[i][j]
                    for i in range(self.rank) for j in range(self.rank)), Fraction(0))

    def root_coefficients(self, lam: Sequence[int]) -> Tuple[Fraction, ...]:
        """Simple-root coefficients of a character lying in the root lattice span."""
        sol = sympy.Matrix(self.simple_roots.tolist()).T.solve(sympy.Matrix([int(v) for v in lam]))
        return tuple(Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in sol)

    def coroot_of(self, lam: Sequence[int]) -> np.ndarray:
        idx = self.root_index(lam)
        if idx is None:
            raise ConsistencyError(f"{tuple(lam)} is not a root of {self.label}")
        return self.coroots[idx]

    @cached_property
    def _lookup(self) -> Dict[Tuple[int, ...], int]:
        return {tuple(int(v) for v in row): i for i, row in enumerate(self.roots)}

    @cached_property
    def _gram(self) -> List[List[Fraction]]:
        A = self.cartan_matrix
        return [[Fraction(int(A[i][j]) * self.symmetrizer[i]) for j in range(self.rank)]
                for i in range(self.rank)]


def normalize_type(type_label: str) -> str:
    label = type_label.strip()
    label = TYPE_ALIASES.get(label.upper(), label.upper())
    if label not in CARTAN_MATRICES:
        raise UnsupportedTypeError(
            f"Unsupported root system type '{type_label}'; supported: {sorted(CARTAN_MATRICES)}")
    return label


def _positive_root_coefficients(cartan: np.ndarray) -> List[Tuple[int, ...]]:
    """Positive roots in simple-root coordinates, built level by level from root strings."""
    r = cartan.shape[0]
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    found = set(simple)
    frontier = list(simple)
    while frontier:
        new_level = []
        for beta in frontier:
            for i in range(r):
                p = 0
                while True:
                    lower = tuple(b - (p + 1) * int(k == i) for k, b in enumerate(beta))
                    if lower in found:
                        p += 1
                    else:
                        break
                pairing = sum(beta[j] * int(cartan[i][j]) for j in range(r))
                if p - pairing > 0:
                    upper = tuple(b + int(k == i) for k, b in enumerate(beta))
                    if upper not in found:
                        found.add(upper)
                        new_level.append(upper)
        frontier = new_level
    return sorted(found, key=lambda c: (sum(c), c))


def _lattice_basis(label: str, lattice: str, cartan: np.ndarray) -> np.ndarray:
    custom = CUSTOM_BASES.get((label, lattice))
    if custom is not None:
        return np.array(custom, dtype=np.int64)
    if lattice == ADJOINT:
        return np.eye(cartan.shape[0], dtype=np.int64)
    return cartan.T.copy()


def _integer_solve(M: np.ndarray, b: Sequence[int]) -> np.ndarray:
    sol = sympy.Matrix(M.tolist()).solve(sympy.Matrix([int(v) for v in b]))
    if any(not v.is_integer for v in sol):
        raise ConsistencyError(f"Non-integral coroot {list(sol)} for basis {M.tolist()}")
    return np.array([int(v) for v in sol], dtype=np.int64)


def enumerate_weyl(simple_roots: np.ndarray, simple_coroots: np.ndarray) -> Tuple[WeylElement, ...]:
    """
    Enumerate W by breadth-first search over simple reflections.

    Args:
        simple_roots: rows alpha_i in lattice coordinates
        simple_coroots: rows alpha_i^vee in dual coordinates

    Returns:
        Tuple of WeylElement ordered by length, identity first; words are reduced.
    """
    r = simple_roots.shape[0]
    eye = np.eye(r, dtype=np.int64)
    reflections = [eye - np.outer(simple_roots[i], simple_coroots[i]) for i in range(r)]
    seen = {tuple(eye.flatten()): ((), eye)}
    order = [tuple(eye.flatten())]
    queue = deque([tuple(eye.flatten())])
    while queue:
        key = queue.popleft()
        word, mat = seen[key]
        for i, s in enumerate(reflections):
            nxt = s @ mat
            nkey = tuple(int(v) for v in nxt.flatten())
            if nkey not in seen:
                seen[nkey] = ((i,) + word, nxt)
                order.append(nkey)
                queue.append(nkey)
    elements = []
    for key in order:
        word, mat = seen[key]
        inv = np.rint(np.linalg.inv(mat.astype(float))).astype(np.int64)
        elements.append(WeylElement(matrix=mat, inverse=inv, word=word, length=len(word)))
    logger.debug(f"Enumerated Weyl group of order {len(elements)}")
    return tuple(elements)


def compute_center(simple_roots: np.ndarray) -> CenterGroup:
    """Phases phi with <alpha_i, phi> integral for all simple roots, modulo integers."""
    M = sympy.Matrix(simple_roots.tolist())
    det = abs(int(M.det()))
    Minv = M.inv()
    r = simple_roots.shape[0]
    phases = set()
    for k in itertools.product(range(det), repeat=r):
        phi = Minv * sympy.Matrix(k)
        phases.add(tuple(Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) % 1
                         for v in phi))
    ordered = tuple(sorted(phases))
    if len(ordered) != det:
        raise ConsistencyError(f"Center has {len(ordered)} elements, expected |Lambda/Q| = {det}")
    return CenterGroup(phases=ordered)


def exponents_from_heights(heights: Sequence[int], rank: int) -> Tuple[int, ...]:
    """
    Exponents m_i from the height multiset via (1 - 1/q) sum q^ht = sum q^m_i - r.

    The multiplicity of exponent k is n_k - n_{k+1}, where n_k counts roots of height k.
    """
    if not heights:
        raise ConsistencyError("Empty height multiset")
    counts = {}
    for h in heights:
        counts[h] = counts.get(h, 0) + 1
    if counts.get(1, 0) != rank:
        raise ConsistencyError(f"Expected {rank} roots of height one, found {counts.get(1, 0)}")
    exponents = []
    for k in range(1, max(counts) + 1):
        mult = counts.get(k, 0) - counts.get(k + 1, 0)
        if mult < 0:
            raise ConsistencyError(f"Inconsistent heights: {sorted(heights)}")
        exponents.extend([k] * mult)
    return tuple(exponents)


def height_identity_holds(rd: RootDatum) -> bool:
    """Exact check of (1 - 1/q) sum_{alpha>0} q^ht(alpha) = sum_i q^m_i - r."""
    q = sympy.symbols('q')
    lhs = sympy.expand((1 - 1 / q) * sum(q ** h for h in rd.heights))
    rhs = sum(q ** m for m in rd.exponents) - rd.rank
    return sympy.simplify(lhs - rhs) == 0


def build_root_system(type_label: str, lattice: str = ADJOINT) -> RootDatum:
    """
    Build the root datum of a split group of rank at most two.

    Args:
        type_label: one of A1, A1xA1, A2, B2, C2, G2
        lattice: 'adjoint' or 'simply_connected'

    Returns:
        RootDatum with Weyl group, exponents and center; all invariants checked.
    """
    label = normalize_type(type_label)
    if lattice not in LATTICES:
        raise UnsupportedTypeError(f"Unsupported lattice choice '{lattice}'; use one of {LATTICES}")
    try:
        cartan = np.array(CARTAN_MATRICES[label], dtype=np.int64)
        r = cartan.shape[0]
        M = _lattice_basis(label, lattice, cartan)
        coroots = np.array([_integer_solve(M, cartan[i]) for i in range(r)], dtype=np.int64)
        coeffs = _positive_root_coefficients(cartan)
        sym = SYMMETRIZERS[label]
        positive = np.array(coeffs, dtype=np.int64) @ M
        pos_coroots = []
        for c in coeffs:
            norm = sum(Fraction(c[i] * c[j] * int(cartan[i][j]) * sym[i]) for i in range(r) for j in range(r)) / 2
            vec = [sum(Fraction(c[i] * sym[i]) / norm * int(coroots[i][k]) for i in range(r)) for k in range(r)]
            if any(v.denominator != 1 for v in vec):
                raise ConsistencyError(f"Non-integral coroot for root coefficients {c}")
            pos_coroots.append([int(v) for v in vec])
        pos_coroots = np.array(pos_coroots, dtype=np.int64)
        heights = tuple(sum(c) for c in coeffs)
        rho = tuple(Fraction(int(v), 2) for v in positive.sum(axis=0))
        rho_check = tuple(Fraction(int(v), 2) for v in pos_coroots.sum(axis=0))
        rd = RootDatum(
            type_label=label,
            lattice=lattice,
            cartan_matrix=cartan,
            symmetrizer=sym,
            simple_roots=M,
            simple_coroots=coroots,
            positive_coefficients=tuple(coeffs),
            positive_roots=positive,
            positive_coroots=pos_coroots,
            heights=heights,
            exponents=exponents_from_heights(heights, r),
            rho=rho,
            rho_check=rho_check,
            weyl=enumerate_weyl(M, coroots),
            center=compute_center(M),
        )
        validate_root_datum(rd)
        logger.info(f"Built root datum {rd.label}: {rd.n_positive} positive roots, |W| = {len(rd.weyl)}, "
                    f"|Z| = {rd.center.order}")
        return rd
    except (UnsupportedTypeError, ConsistencyError):
        raise
    except Exception as e:
        logger.error(f"Error building root system {type_label}: {e}", exc_info=True)
        raise ConsistencyError(f"Could not build root system {type_label}: {e}") from e


def validate_root_datum(rd: RootDatum) -> None:
    """Raise ConsistencyError when a structural invariant of the root datum fails."""
    r = rd.rank
    for i in range(r):
        for j in range(r):
            if int(rd.simple_roots[j] @ rd.simple_coroots[i]) != int(rd.cartan_matrix[i][j]):
                raise ConsistencyError(f"Cartan entry ({i},{j}) not reproduced")
    for alpha, coroot in zip(rd.positive_roots, rd.positive_coroots):
        if int(alpha @ coroot) != 2:
            raise ConsistencyError(f"<alpha, alpha^vee> != 2 for {alpha.tolist()}")
    if len(rd.heights) != sum(rd.exponents):
        raise ConsistencyError("Number of positive roots differs from the sum of exponents")
    if not height_identity_holds(rd):
        raise ConsistencyError("Heights versus exponents identity fails")
    lookup = set(tuple(int(v) for v in row) for row in rd.roots)
    for w in rd.weyl:
        images = w.act(rd.roots)
        if set(tuple(int(v) for v in row) for row in images) != lookup:
            raise ConsistencyError(f"Weyl element {w.word} does not permute the roots")
        inverted = sum(1 for img in w.act(rd.positive_roots) if not rd.is_positive(img))
        if inverted != w.length:
            raise ConsistencyError(f"Length mismatch for {w.word}: {inverted} != {w.length}")
    w0 = rd.w0
    rc = np.array([float(v) for v in rd.rho_check])
    if not np.allclose(w0.coweight_matrix @ rc, -rc):
        raise ConsistencyError("Longest element does not send rho^vee to -rho^vee")
    if not np.array_equal(w0.matrix @ w0.matrix, np.eye(r, dtype=np.int64)):
        raise ConsistencyError("Longest element is not an involution")


def dominant_conjugate(rd: RootDatum, coweight: Sequence) -> Tuple[WeylElement, np.ndarray]:
    """Find w with w.coweight dominant; returns (w, w.coweight) with exact rational entries."""
    v = np.array([Fraction(x) for x in coweight], dtype=object)
    for w in rd.weyl:
        image = w.coweight_matrix.astype(object) @ v
        if all(sum(int(a) * b for a, b in zip(alpha, image)) >= 0 for alpha in rd.simple_roots):
            return w, image
    raise ConsistencyError(f"No dominant conjugate found for {list(coweight)}")


def stabilizer(rd: RootDatum, coweight: Sequence) -> List[WeylElement]:
    v = np.array([Fraction(x) for x in coweight], dtype=object)
    return [w for w in rd.weyl if all(a == b for a, b in zip(w.coweight_matrix.astype(object) @ v, v))]


def root_datum_to_dict(rd: RootDatum) -> Dict:
    """JSON-ready description used by the `roots` subcommand."""
    return {
        'type': rd.type_label,
        'lattice': rd.lattice,
        'rank': rd.rank,
        'cartan_matrix': rd.cartan_matrix.tolist(),
        'simple_roots': rd.simple_roots.tolist(),
        'simple_coroots': rd.simple_coroots.tolist(),
        'positive_roots': [
            {
                'root': alpha.tolist(),
                'coroot': coroot.tolist(),
                'coefficients': list(c),
                'height': h,
                'norm_squared': int(rd.inner_product(c, c)),
            }
            for alpha, coroot, c, h in zip(rd.positive_roots, rd.positive_coroots,
                                           rd.positive_coefficients, rd.heights)
        ],
        'heights': sorted(rd.heights),
        'exponents': list(rd.exponents),
        'rho': [str(v) for v in rd.rho],
        'rho_check': [str(v) for v in rd.rho_check],
        'weyl_order': len(rd.weyl),
        'longest_word': list(rd.w0.word),
        'center': [[str(v) for v in ph] for ph in rd.center.phases],
    }
