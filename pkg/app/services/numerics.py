"""
Integer invariants of Enriques manifolds: admissible indices, the totient bound,
Hodge numbers h^{p,0}, chi(O) and the table of known hyperkahler families.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Set, Union
import logging

from sympy import divisors, totient

from app.core.config import settings
from app.core.exceptions import NonDivisibleIndexError, PreconditionError
from app.core.reference_data import FAMILY_TABLE, PUBLISHED_INDEX_TABLE

logger = logging.getLogger(__name__)


class Family(str, Enum):
    HILB_K3 = "hilb_k3"
    KUMMER = "kummer"
    OGRADY6 = "ogrady6"
    OGRADY10 = "ogrady10"


class Construction(str, Enum):
    """Known ways of producing Enriques manifolds"""
    Q2_HILB = "Q2Hilb"
    Q2_KM = "Q2Km"
    QD_KM = "QdKm"
    Q2_MODULI = "Q2Moduli"


@dataclass(frozen=True)
class EnriquesShape:
    """An Enriques manifold of dimension 2n with fundamental group of order d"""
    n: int
    d: int

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError(f"n must be at least 1, got {self.n}")
        if self.d < 2:
            raise PreconditionError(f"The index must be at least 2, got {self.d}")
        if (self.n + 1) % self.d:
            raise NonDivisibleIndexError(f"Index {self.d} does not divide n+1={self.n + 1}")

    @property
    def dim(self) -> int:
        return 2 * self.n


@dataclass(frozen=True)
class FamilyInvariants:
    family: Family
    n: int
    dim: int
    chi: int
    b2: int


def euler_phi(d: int) -> int:
    if d < 1:
        raise PreconditionError(f"euler_phi needs d >= 1, got {d}")
    return int(totient(d))


def divisors_at_least_two(k: int) -> List[int]:
    return [d for d in divisors(k) if d >= 2]


def admissible_indices(n: int) -> Set[int]:
    """Indices d >= 2 dividing n+1"""
    if n < 1:
        raise PreconditionError(f"n must be at least 1, got {n}")
    return set(divisors_at_least_two(n + 1))


def phi_bound_indices(b2: int, d_max: Optional[int] = None) -> Set[int]:
    """
    All d >= 2 with phi(d) < b2

    The search stops at d_max, by default PHI_SEARCH_FACTOR * b2^2, which is safe
    because phi(d) >= sqrt(d/2).
    """
    if b2 < 2:
        raise PreconditionError(f"b2 must be at least 2, got {b2}")
    d_max = d_max or settings.PHI_SEARCH_FACTOR * b2 * b2
    return {d for d in range(2, d_max + 1) if euler_phi(d) < b2}


def family_invariants(family: Union[Family, str], n: Optional[int] = None) -> FamilyInvariants:
    """
    dim, chi(O_X) and b2 of a known family

    Raises:
        PreconditionError: If n is missing for the Hilbert scheme or Kummer series,
            or does not match a fixed O'Grady dimension
    """
    family = Family(family)
    row = FAMILY_TABLE[family.value]
    if "n" in row:
        if n is not None and n != row["n"]:
            raise PreconditionError(f"{family.value} has n={row['n']}, got {n}")
        return FamilyInvariants(family, row["n"], row["dim"], row["chi"], row["b2"])
    if n is None or n < 1:
        raise PreconditionError(f"{family.value} needs n >= 1")
    return FamilyInvariants(family, n, 2 * n, n + 1, row["b2"])


def family_index_candidates(family: Union[Family, str], n: Optional[int] = None) -> Set[int]:
    invariants = family_invariants(family, n)
    return admissible_indices(invariants.n) & phi_bound_indices(invariants.b2)


def hodge_h_p0(shape: EnriquesShape, p: int) -> int:
    """h^{p,0} = h^{0,p}: 1 if 2d | p and p <= 2n, else 0"""
    if p < 0:
        raise PreconditionError(f"p must be non-negative, got {p}")
    return 1 if p % (2 * shape.d) == 0 and p <= 2 * shape.n else 0


def hodge_row(shape: EnriquesShape) -> List[int]:
    return [hodge_h_p0(shape, p) for p in range(2 * shape.n + 1)]


def chi_structure_sheaf(target: Union[EnriquesShape, FamilyInvariants]) -> int:
    """(n+1)/d for an Enriques manifold, the table value for a hyperkahler cover"""
    if isinstance(target, FamilyInvariants):
        return target.chi
    return (target.n + 1) // target.d


def shape_summary(shape: EnriquesShape) -> Dict:
    row = hodge_row(shape)
    alternating = sum((-1) ** p * h for p, h in enumerate(row))
    return {
        "n": shape.n,
        "d": shape.d,
        "dim": shape.dim,
        "chi": chi_structure_sheaf(shape),
        "hodge_row": row,
        "alternating_sum": alternating,
        "fundamental_group_order": shape.d,
        "canonical_class_order": shape.d,
        "torsion_of_picard": f"Z/{shape.d}",
    }


def construction_shape(construction: Union[Construction, str], n: int, d: Optional[int] = None) -> EnriquesShape:
    """
    The shape produced by a named construction

    Raises:
        PreconditionError: If n or d violates the parity or divisibility the construction needs
    """
    construction = Construction(construction)
    if construction in (Construction.Q2_HILB, Construction.Q2_KM, Construction.Q2_MODULI):
        if n % 2 == 0:
            raise PreconditionError(f"{construction.value} needs n odd, got {n}")
        if d is not None and d != 2:
            raise PreconditionError(f"{construction.value} has index 2, got {d}")
        return EnriquesShape(n, 2)
    if d not in (2, 3, 4):
        raise PreconditionError(f"QdKm needs d in {{2, 3, 4}}, got {d}")
    return EnriquesShape(n, d)


def index_table_diff(b2: int) -> Dict[str, List[int]]:
    """Computed totient-bound set against the published table row, if there is one"""
    computed = phi_bound_indices(b2)
    published = set(PUBLISHED_INDEX_TABLE.get(b2, []))
    diff = {
        "computed": sorted(computed),
        "published": sorted(published),
        "published_only": sorted(published - computed),
        "computed_only": sorted(computed - published) if published else [],
    }
    if diff["published_only"] or diff["computed_only"]:
        logger.warning(
            f"b2={b2}: published table differs from phi(d) < b2 "
            f"(published only {diff['published_only']}, computed only {diff['computed_only']})"
        )
    return diff
