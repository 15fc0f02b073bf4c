"""
Exact integral lattices: constructors, involutions, eigenlattices, discriminant
groups, root enumeration, and Mukai vectors on a Neron-Severi model.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd, isqrt
from functools import reduce
from typing import List, Optional, Sequence, Tuple
import logging

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from app.core.config import settings
from app.core.exceptions import (
    DegenerateLatticeError,
    EnumerationLimitError,
    LatticeInputError,
    MukaiDimensionError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]
IntMatrix = Tuple[Tuple[int, ...], ...]

# Bourbaki numbering, 1-based
_E8_EDGES = ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4))


def _as_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    try:
        return tuple(tuple(int(x) for x in row) for row in rows)
    except (TypeError, ValueError) as e:
        raise LatticeInputError(f"Matrix entries must be integers: {e}")


def _identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    columns = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in columns) for row in a)


def _transpose(a: IntMatrix) -> IntMatrix:
    return tuple(zip(*a))


@dataclass(frozen=True)
class IntegralLattice:
    """Z^rank with a symmetric integer bilinear form"""
    gram: IntMatrix
    name: str = field(default="", compare=False)

    def __post_init__(self):
        gram = _as_matrix(self.gram)
        n = len(gram)
        if any(len(row) != n for row in gram):
            raise LatticeInputError(f"Gram matrix of {self.name or 'lattice'} is not square")
        if any(gram[i][j] != gram[j][i] for i in range(n) for j in range(i)):
            raise LatticeInputError(f"Gram matrix of {self.name or 'lattice'} is not symmetric")
        object.__setattr__(self, "gram", gram)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, u: Sequence[int], v: Sequence[int]) -> int:
        if len(u) != self.rank or len(v) != self.rank:
            raise LatticeInputError(f"Vectors must have length {self.rank}")
        return sum(u[i] * self.gram[i][j] * v[j] for i in range(self.rank) for j in range(self.rank) if u[i] and v[j])

    def norm(self, v: Sequence[int]) -> int:
        return self.pair(v, v)


def e8(scale: int = -1) -> IntegralLattice:
    """E8 with Gram matrix scale * Cartan matrix"""
    gram = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for a, b in _E8_EDGES:
        gram[a - 1][b - 1] = gram[b - 1][a - 1] = -1
    return IntegralLattice(tuple(tuple(scale * x for x in row) for row in gram), name=f"E8({scale})")


def hyperbolic_plane() -> IntegralLattice:
    return IntegralLattice(((0, 1), (1, 0)), name="H")


def twist(lattice: IntegralLattice, k: int) -> IntegralLattice:
    if k == 0:
        raise LatticeInputError("Twisting by 0 is not allowed")
    return IntegralLattice(tuple(tuple(k * x for x in row) for row in lattice.gram), name=f"{lattice.name}({k})")


def direct_sum(*lattices: IntegralLattice) -> IntegralLattice:
    n = sum(L.rank for L in lattices)
    gram = [[0] * n for _ in range(n)]
    offset = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                gram[offset + i][offset + j] = L.gram[i][j]
        offset += L.rank
    return IntegralLattice(_as_matrix(gram), name="+".join(L.name for L in lattices))


@dataclass(frozen=True)
class LatticeInvolution:
    """Integer matrix acting on column vectors"""
    matrix: IntMatrix

    def __post_init__(self):
        matrix = _as_matrix(self.matrix)
        if any(len(row) != len(matrix) for row in matrix):
            raise LatticeInputError("Involution matrix is not square")
        object.__setattr__(self, "matrix", matrix)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def apply(self, v: Sequence[int]) -> Vector:
        return tuple(sum(row[j] * v[j] for j in range(self.rank)) for row in self.matrix)


def involution_check(lattice: IntegralLattice, involution: LatticeInvolution) -> List[str]:
    """Names of the failed involution axioms; empty when P^2 = Id and P^T G P = G"""
    if lattice.rank != involution.rank:
        return [f"rank mismatch: lattice {lattice.rank}, involution {involution.rank}"]
    failures = []
    p = involution.matrix
    if _matmul(p, p) != _identity(lattice.rank):
        failures.append("P^2 != Id")
    if _matmul(_matmul(_transpose(p), lattice.gram), p) != lattice.gram:
        failures.append("P^T G P != G")
    return failures


def k3_lattice_with_involution() -> Tuple[IntegralLattice, LatticeInvolution]:
    """
    L = E8(-1) + E8(-1) + H + H + H with (x, y, z1, z2, z3) -> (y, x, -z1, z3, z2)

    Coordinates: x 0..7, y 8..15, z1 16..17, z2 18..19, z3 20..21.
    """
    lattice = direct_sum(e8(-1), e8(-1), hyperbolic_plane(), hyperbolic_plane(), hyperbolic_plane())
    p = [[0] * 22 for _ in range(22)]
    for i in range(8):
        p[i][8 + i] = 1
        p[8 + i][i] = 1
    for j in range(2):
        p[16 + j][16 + j] = -1
        p[18 + j][20 + j] = 1
        p[20 + j][18 + j] = 1
    involution = LatticeInvolution(_as_matrix(p))
    failures = involution_check(lattice, involution)
    if failures:
        raise LatticeInputError(f"K3 involution is not an isometric involution: {failures}")
    return IntegralLattice(lattice.gram, name="L"), involution


def _echelon(rows: List[List[int]], ncols: int) -> int:
    """Integer row echelon form on the first ncols columns, in place; returns the rank"""
    r = 0
    for col in range(ncols):
        while True:
            nonzero = [i for i in range(r, len(rows)) if rows[i][col] != 0]
            if not nonzero:
                break
            pivot = min(nonzero, key=lambda i: abs(rows[i][col]))
            rows[r], rows[pivot] = rows[pivot], rows[r]
            clean = True
            for i in range(r + 1, len(rows)):
                q = rows[i][col] // rows[r][col]
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                if rows[i][col] != 0:
                    clean = False
            if clean:
                r += 1
                break
        if r == len(rows):
            break
    return r


def integer_kernel(matrix: Sequence[Sequence[int]]) -> List[Vector]:
    """A basis of {v in Z^n : M v = 0}, saturated in Z^n"""
    m = _as_matrix(matrix)
    n = len(m[0]) if m else 0
    # rows of [M^T | I]; the identity part records the unimodular transform
    rows = [[m[i][j] for i in range(len(m))] + [1 if k == j else 0 for k in range(n)] for j in range(n)]
    rank = _echelon(rows, len(m))
    return [tuple(row[len(m):]) for row in rows[rank:]]


def hermite_rows(basis: Sequence[Sequence[int]]) -> List[Vector]:
    """Row Hermite normal form: positive pivots, entries above pivots reduced"""
    rows = [list(v) for v in basis]
    if not rows:
        return []
    ncols = len(rows[0])
    rank = _echelon(rows, ncols)
    rows = rows[:rank]
    for r, row in enumerate(rows):
        col = next(c for c in range(ncols) if row[c] != 0)
        if row[col] < 0:
            rows[r] = row = [-x for x in row]
        for i in range(r):
            q = rows[i][col] // row[col]
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], row)]
    return [tuple(row) for row in rows]


@dataclass(frozen=True)
class SubLattice:
    """A sublattice with its basis in ambient coordinates"""
    lattice: IntegralLattice
    basis: Tuple[Vector, ...]


def cross_pairing(lattice: IntegralLattice, basis_1: Sequence[Sequence[int]],
                  basis_2: Sequence[Sequence[int]]) -> IntMatrix:
    """Matrix of pairings between two families of vectors"""
    return tuple(tuple(lattice.pair(u, v) for v in basis_2) for u in basis_1)


def eigenlattice(lattice: IntegralLattice, involution: LatticeInvolution, sign: int) -> SubLattice:
    """
    The sublattice {v : Pv = sign * v}

    Raises:
        PreconditionError: If sign is not +1 or -1, or P is not an isometric involution
    """
    if sign not in (1, -1):
        raise PreconditionError(f"sign must be +1 or -1, got {sign}")
    failures = involution_check(lattice, involution)
    if failures:
        raise PreconditionError(f"Not an involution of the lattice: {failures}")
    n = lattice.rank
    shifted = [[involution.matrix[i][j] - (sign if i == j else 0) for j in range(n)] for i in range(n)]
    basis = tuple(hermite_rows(integer_kernel(shifted)))
    gram = cross_pairing(lattice, basis, basis)
    label = "invariant" if sign == 1 else "antiinvariant"
    logger.debug(f"{label} sublattice of {lattice.name} has rank {len(basis)}")
    return SubLattice(IntegralLattice(gram, name=f"{lattice.name}^{'+' if sign == 1 else '-'}"), basis)


def signature(lattice: IntegralLattice) -> Tuple[int, int]:
    """(positive, negative) inertia by exact symmetric pivoting over Q"""
    a = [[Fraction(x) for x in row] for row in lattice.gram]
    positive = negative = 0
    while a:
        n = len(a)
        pivot = next((i for i in range(n) if a[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # congruence by e_i -> e_i + e_j makes the (i, i) entry 2 a_ij
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            pivot = i
        d = a[pivot][pivot]
        if d > 0:
            positive += 1
        else:
            negative += 1
        rest = [k for k in range(n) if k != pivot]
        a = [[a[r][c] - a[r][pivot] * a[pivot][c] / d for c in rest] for r in rest]
    return positive, negative


def determinant(lattice: IntegralLattice) -> int:
    return int(Matrix(lattice.gram).det())


def is_even(lattice: IntegralLattice) -> bool:
    return all(lattice.gram[i][i] % 2 == 0 for i in range(lattice.rank))


def discriminant_group(lattice: IntegralLattice) -> List[int]:
    """
    Elementary divisors of the Gram matrix other than 1

    Raises:
        DegenerateLatticeError: If the determinant is zero
    """
    if determinant(lattice) == 0:
        raise DegenerateLatticeError(f"{lattice.name or 'lattice'} is degenerate")
    snf = smith_normal_form(Matrix(lattice.gram), domain=ZZ)
    divisors = sorted(abs(int(snf[i, i])) for i in range(lattice.rank))
    return [d for d in divisors if d != 1]


def _fincke_pohst(gram: IntMatrix, target: int, bound: int) -> List[Vector]:
    n = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for m in range(k, n):
                q[k][m] -= q[k][i] * q[i][m]
    x = [0] * n
    found = []

    def search(i: int, budget: Fraction):
        center = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        radius = budget / q[i][i]
        reach = isqrt(floor(radius)) + 1
        lo = max(-bound, floor(center) - reach)
        hi = min(bound, ceil(center) + reach)
        for value in range(lo, hi + 1):
            gap = (value - center) ** 2
            if gap > radius:
                continue
            x[i] = value
            rest = budget - q[i][i] * gap
            if i == 0:
                if rest == 0:
                    found.append(tuple(x))
            else:
                search(i - 1, rest)
        x[i] = 0

    search(n - 1, Fraction(target))
    return found


def _box_search(lattice: IntegralLattice, norm: int, bound: int) -> List[Vector]:
    n = lattice.rank
    gram = lattice.gram
    x = [0] * n
    found = []

    def search(i: int, partial: int, image: List[int]):
        # image[k] = sum over assigned j of G[k][j] x[j]
        if i == n:
            if partial == norm:
                found.append(tuple(x))
            return
        for value in range(-bound, bound + 1):
            x[i] = value
            step = value * (2 * image[i] + value * gram[i][i])
            if value:
                search(i + 1, partial + step, [image[k] + value * gram[k][i] for k in range(n)])
            else:
                search(i + 1, partial, image)
        x[i] = 0

    search(0, 0, [0] * n)
    return found


def roots_in_box(lattice: IntegralLattice, norm: int = -2, bound: int = 1) -> List[Vector]:
    """
    Vectors v with v.v = norm and every coordinate in [-bound, bound], sorted

    Definite lattices are searched by Fincke-Pohst pruning inside the box, indefinite
    ones by walking the whole box. Completeness holds only within the box.
    """
    if bound < 1:
        return []
    positive, negative = signature(lattice)
    if positive == lattice.rank and norm > 0:
        found = _fincke_pohst(lattice.gram, norm, bound)
    elif negative == lattice.rank and norm < 0:
        flipped = tuple(tuple(-x for x in row) for row in lattice.gram)
        found = _fincke_pohst(flipped, -norm, bound)
    elif positive == lattice.rank or negative == lattice.rank:
        found = [tuple([0] * lattice.rank)] if norm == 0 else []
    else:
        size = (2 * bound + 1) ** lattice.rank
        if size > settings.MAX_ENUMERATION:
            raise EnumerationLimitError(f"Box of {size} vectors exceeds {settings.MAX_ENUMERATION}")
        found = _box_search(lattice, norm, bound)
    logger.debug(f"{len(found)} vectors of norm {norm} in the box of size {bound} on {lattice.name}")
    return sorted(found)


@dataclass(frozen=True)
class MukaiVector:
    """v = (r, l, s) with s = chi - r"""
    r: int
    l: Vector
    s: int

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(int(x) for x in self.l))

    @classmethod
    def from_chi(cls, r: int, l: Sequence[int], chi: int) -> "MukaiVector":
        return cls(r, tuple(l), chi - r)

    @property
    def chi(self) -> int:
        return self.r + self.s

    def is_primitive(self) -> bool:
        return reduce(gcd, (self.r, self.s) + self.l, 0) == 1


def mukai_pairing(v: MukaiVector, w: MukaiVector, ns: IntegralLattice) -> int:
    """
    (v, w) = l.l' - r s' - r' s

    Raises:
        MukaiDimensionError: If an l-component does not live in the Neron-Severi model
    """
    for u in (v, w):
        if len(u.l) != ns.rank:
            raise MukaiDimensionError(f"l has length {len(u.l)}, the Neron-Severi model has rank {ns.rank}")
    return ns.pair(v.l, w.l) - v.r * w.s - w.r * v.s


def enriques_ns_model() -> IntegralLattice:
    """Pullback of Num of an Enriques surface: (E8(-1) + H)(2)"""
    return IntegralLattice(twist(direct_sum(e8(-1), hyperbolic_plane()), 2).gram, name="NS")


def is_scaled_even(ns: IntegralLattice) -> bool:
    """Every l.l is divisible by 4"""
    n = ns.rank
    return all(ns.gram[i][i] % 4 == 0 for i in range(n)) and \
        all(ns.gram[i][j] % 2 == 0 for i in range(n) for j in range(n))


@dataclass(frozen=True)
class AdmissibilityReport:
    vector: MukaiVector
    v_squared: int
    chi: int
    primitive: bool
    chi_odd: bool
    nonnegative: bool
    dim: int
    n: int
    n_odd: bool
    quotient_dim: int
    quotient_index: int
    quotient_chi: Optional[int]
    failures: Tuple[str, ...]
    notes: Tuple[str, ...] = ()

    @property
    def admissible(self) -> bool:
        return not self.failures


def moduli_admissibility(v: MukaiVector, ns: IntegralLattice, chi: Optional[int] = None) -> AdmissibilityReport:
    """
    Check the hypotheses for a moduli space of sheaves on the K3 cover to carry a free involution

    Args:
        v: Mukai vector (r, l, chi - r)
        ns: Neron-Severi model; l.l must be divisible by 4 for every l
        chi: Euler characteristic; must agree with v when given

    Returns:
        A report naming every failed hypothesis

    Raises:
        PreconditionError: If the model is not an even lattice scaled by 2
        MukaiDimensionError: If l does not match the model's rank
    """
    if not is_scaled_even(ns):
        raise PreconditionError(f"{ns.name or 'NS model'} is not an even lattice scaled by 2")
    if chi is not None and chi != v.chi:
        raise LatticeInputError(f"chi={chi} disagrees with the Mukai vector (r + s = {v.chi})")
    v_squared = mukai_pairing(v, v, ns)
    dim = v_squared + 2
    n = dim // 2
    failures = []
    if not v.is_primitive():
        failures.append("not primitive")
    if v.chi % 2 == 0:
        failures.append("chi even")
    if v_squared < 0:
        failures.append("v^2 negative")
    elif n % 2 == 0:
        failures.append("n even")
    notes = ()
    if not failures:
        notes = ("involution is free: a fixed stable sheaf would descend to the Enriques surface and force chi even",)
    return AdmissibilityReport(
        vector=v,
        v_squared=v_squared,
        chi=v.chi,
        primitive=v.is_primitive(),
        chi_odd=v.chi % 2 == 1,
        nonnegative=v_squared >= 0,
        dim=dim,
        n=n,
        n_odd=n % 2 == 1,
        quotient_dim=dim,
        quotient_index=2,
        quotient_chi=(n + 1) // 2 if n % 2 == 1 else None,
        failures=tuple(failures),
        notes=notes,
    )
