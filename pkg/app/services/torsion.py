"""
Exact torsion-point arithmetic on elliptic curves C/(Z + tau*Z) and their products.

A point of level N is stored as a pair of residues (a, b) modulo N and represents
(a + b*tau)/N modulo the period lattice. Complex multiplication by -1, omega, i and
zeta acts through integer 2x2 matrices on the basis (1, tau).
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, List, Optional, Sequence, Tuple
import logging
import re

from app.core.exceptions import (
    BasisMismatchError,
    IncompatibleLevelError,
    InvalidLevelError,
    PointSyntaxError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]

IDENTITY: Matrix2 = ((1, 0), (0, 1))
MINUS_IDENTITY: Matrix2 = ((-1, 0), (0, -1))


def mat_mul(m: Matrix2, k: Matrix2) -> Matrix2:
    return (
        (m[0][0] * k[0][0] + m[0][1] * k[1][0], m[0][0] * k[0][1] + m[0][1] * k[1][1]),
        (m[1][0] * k[0][0] + m[1][1] * k[1][0], m[1][0] * k[0][1] + m[1][1] * k[1][1]),
    )


def mat_add(m: Matrix2, k: Matrix2) -> Matrix2:
    return (
        (m[0][0] + k[0][0], m[0][1] + k[0][1]),
        (m[1][0] + k[1][0], m[1][1] + k[1][1]),
    )


def mat_scale(c: int, m: Matrix2) -> Matrix2:
    return ((c * m[0][0], c * m[0][1]), (c * m[1][0], c * m[1][1]))


def mat_pow(m: Matrix2, k: int) -> Matrix2:
    if k < 0:
        raise ValueError("negative matrix power")
    result = IDENTITY
    for _ in range(k):
        result = mat_mul(result, m)
    return result


def mat_inverse(m: Matrix2) -> Matrix2:
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det not in (1, -1):
        raise PreconditionError(f"{m} is not invertible over Z")
    return ((det * m[1][1], -det * m[0][1]), (-det * m[1][0], det * m[0][0]))


def mat_apply(m: Matrix2, a: int, b: int) -> Tuple[int, int]:
    return m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b


def mat_mod(m: Matrix2, level: int) -> Matrix2:
    return ((m[0][0] % level, m[0][1] % level), (m[1][0] % level, m[1][1] % level))


def is_plus_minus_identity(m: Matrix2) -> bool:
    return m == IDENTITY or m == MINUS_IDENTITY


class PeriodBasis(str, Enum):
    """Period tau of the curve: arbitrary, tau = i, or tau = zeta"""
    GENERIC = "generic"
    GAUSS = "gauss"
    EISENSTEIN = "eisenstein"


class CMTag(str, Enum):
    MINUS_ONE = "MINUS_ONE"
    OMEGA = "OMEGA"
    I = "I"
    ZETA = "ZETA"


# Image of the basis (1, tau) under multiplication, as columns
_CM_MATRICES = {
    (CMTag.I, PeriodBasis.GAUSS): ((0, -1), (1, 0)),
    (CMTag.ZETA, PeriodBasis.EISENSTEIN): ((0, -1), (1, 1)),
    (CMTag.OMEGA, PeriodBasis.EISENSTEIN): ((-1, -1), (1, 0)),
}

_CM_ORDERS = {CMTag.MINUS_ONE: 2, CMTag.OMEGA: 3, CMTag.I: 4, CMTag.ZETA: 6}


@dataclass(frozen=True)
class CyclotomicClass:
    """Multiplication by a root of unity on a curve with the given period basis"""
    tag: CMTag
    basis: PeriodBasis = PeriodBasis.GENERIC

    def __post_init__(self):
        object.__setattr__(self, "tag", CMTag(self.tag))
        object.__setattr__(self, "basis", PeriodBasis(self.basis))
        if self.tag != CMTag.MINUS_ONE and (self.tag, self.basis) not in _CM_MATRICES:
            raise BasisMismatchError(
                f"{self.tag.value} requires the "
                f"{'gauss' if self.tag == CMTag.I else 'eisenstein'} basis, got {self.basis.value}"
            )

    @property
    def matrix(self) -> Matrix2:
        if self.tag == CMTag.MINUS_ONE:
            return MINUS_IDENTITY
        return _CM_MATRICES[(self.tag, self.basis)]

    @property
    def order(self) -> int:
        return _CM_ORDERS[self.tag]

    def minimal_polynomial_holds(self) -> bool:
        """Check M^2+M+1=0 (omega), M^2+1=0 (i), M^2-M+1=0 (zeta), M+1=0 (-1)"""
        m = self.matrix
        m2 = mat_mul(m, m)
        zero = ((0, 0), (0, 0))
        if self.tag == CMTag.MINUS_ONE:
            return mat_add(m, IDENTITY) == zero
        if self.tag == CMTag.OMEGA:
            return mat_add(mat_add(m2, m), IDENTITY) == zero
        if self.tag == CMTag.I:
            return mat_add(m2, IDENTITY) == zero
        return mat_add(mat_add(m2, mat_scale(-1, m)), IDENTITY) == zero

    def exact_order(self) -> int:
        """Multiplicative order of the matrix, found by powering"""
        power = self.matrix
        k = 1
        while power != IDENTITY:
            power = mat_mul(power, self.matrix)
            k += 1
            if k > 12:
                raise PreconditionError(f"matrix of {self.tag.value} has no finite order")
        return k

    def power(self, k: int) -> "CyclotomicClass":
        """The class of xi^k, when xi^k is again one of -1, omega, i, zeta"""
        return CyclotomicClass.from_matrix(mat_pow(self.matrix, k % self.order), self.basis)

    @classmethod
    def from_matrix(cls, matrix: Matrix2, basis: PeriodBasis) -> "CyclotomicClass":
        if matrix == MINUS_IDENTITY:
            return cls(CMTag.MINUS_ONE, basis)
        for (tag, tag_basis), candidate in _CM_MATRICES.items():
            if tag_basis == PeriodBasis(basis) and candidate == matrix:
                return cls(tag, basis)
        raise PreconditionError(f"matrix {matrix} is not -1, omega, i or zeta on the {basis} basis")


@dataclass(frozen=True, eq=False)
class TorusPoint:
    """The point (a + b*tau)/level on C/(Z + tau*Z)"""
    level: int
    a: int
    b: int
    basis: PeriodBasis = PeriodBasis.GENERIC

    def __post_init__(self):
        if not isinstance(self.level, int) or self.level < 1:
            raise InvalidLevelError(f"Invalid level {self.level}: must be a positive integer")
        object.__setattr__(self, "a", self.a % self.level)
        object.__setattr__(self, "b", self.b % self.level)
        object.__setattr__(self, "basis", PeriodBasis(self.basis))

    @property
    def order(self) -> int:
        return self.level // gcd(gcd(self.a, self.b), self.level)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def reduced(self) -> "TorusPoint":
        g = gcd(gcd(self.a, self.b), self.level)
        if g == 1:
            return self
        return TorusPoint(self.level // g, self.a // g, self.b // g, self.basis)

    def lift(self, level: int) -> "TorusPoint":
        """Same point written at a level divisible by its order"""
        r = self.reduced()
        if level < 1 or level % r.level:
            raise IncompatibleLevelError(f"Point {self} of order {r.level} does not live at level {level}")
        k = level // r.level
        return TorusPoint(level, r.a * k, r.b * k, self.basis)

    def sort_key(self) -> Tuple[Fraction, Fraction]:
        return Fraction(self.a, self.level), Fraction(self.b, self.level)

    def _common(self, other: "TorusPoint") -> Tuple[int, int, int, int, int]:
        if self.basis != other.basis:
            raise BasisMismatchError(f"Cannot combine points on {self.basis.value} and {other.basis.value} curves")
        level = lcm(self.level, other.level)
        s, t = level // self.level, level // other.level
        return level, self.a * s, self.b * s, other.a * t, other.b * t

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        level, a1, b1, a2, b2 = self._common(other)
        return TorusPoint(level, a1 + a2, b1 + b2, self.basis)

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        level, a1, b1, a2, b2 = self._common(other)
        return TorusPoint(level, a1 - a2, b1 - b2, self.basis)

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(self.level, -self.a, -self.b, self.basis)

    def __rmul__(self, k: int) -> "TorusPoint":
        return TorusPoint(self.level, k * self.a, k * self.b, self.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TorusPoint):
            return NotImplemented
        return self.basis == other.basis and self.a * other.level == other.a * self.level \
            and self.b * other.level == other.b * self.level

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.level, r.a, r.b, r.basis))

    def __lt__(self, other: "TorusPoint") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_point(self)

    def __repr__(self) -> str:
        return f"TorusPoint({format_point(self)}, {self.basis.value})"


def apply_matrix(m: Matrix2, p: TorusPoint) -> TorusPoint:
    a, b = mat_apply(m, p.a, p.b)
    return TorusPoint(p.level, a, b, p.basis)


def make_point(a: int, b: int, level: int, basis: PeriodBasis = PeriodBasis.GENERIC) -> TorusPoint:
    """
    Build the point (a + b*tau)/level

    Raises:
        InvalidLevelError: If level < 1
    """
    if level == 0:
        raise InvalidLevelError("Level 0 is not a torsion level")
    return TorusPoint(level, a, b, basis)


def origin(basis: PeriodBasis = PeriodBasis.GENERIC) -> TorusPoint:
    return TorusPoint(1, 0, 0, basis)


def point_order(p: TorusPoint) -> int:
    return p.order


def torsion_points(level: int, basis: PeriodBasis = PeriodBasis.GENERIC) -> List[TorusPoint]:
    """All level^2 points of the level-N torsion, in canonical order"""
    if level < 1:
        raise InvalidLevelError(f"Invalid level {level}")
    return [TorusPoint(level, a, b, basis) for a in range(level) for b in range(level)]


def cm_apply(xi: CyclotomicClass, p: TorusPoint) -> TorusPoint:
    """
    Multiply a torsion point by a root of unity

    Raises:
        BasisMismatchError: If xi needs a period basis other than the point's
    """
    if xi.tag != CMTag.MINUS_ONE and p.basis != xi.basis:
        raise BasisMismatchError(f"{xi.tag.value} cannot act on a point of the {p.basis.value} curve")
    return apply_matrix(xi.matrix, p)


_TERM = re.compile(r"[+-]?[^+-]+")
_GROUP = re.compile(r"^\((?P<inner>[^()]+)\)/(?P<den>\d+)$")
_NUMBER = re.compile(r"^\d+(?:/\d+)?$")
_TAU_TERM = re.compile(r"^(?:(?P<coef>\d+(?:/\d+)?)\*?)?tau(?:/(?P<den>\d+))?$")


def _parse_term(body: str, text: str) -> Tuple[Fraction, bool]:
    """Value of one unsigned term and whether it is a tau term"""
    try:
        if _NUMBER.match(body):
            return Fraction(body), False
        tau = _TAU_TERM.match(body)
        if tau:
            coef = Fraction(tau.group("coef") or 1)
            return coef / int(tau.group("den") or 1), True
    except ZeroDivisionError:
        raise PointSyntaxError(f"Zero denominator in {text!r}")
    raise PointSyntaxError(f"Cannot parse term {body!r} of {text!r}")


def _parse_coordinates(text: str) -> Tuple[Fraction, Fraction]:
    group = _GROUP.match(text)
    if group:
        x, y = _parse_coordinates(group.group("inner"))
        den = int(group.group("den"))
        if den == 0:
            raise PointSyntaxError(f"Zero denominator in {text!r}")
        return x / den, y / den
    x, y = Fraction(0), Fraction(0)
    terms = _TERM.findall(text)
    if "".join(terms) != text or not terms:
        raise PointSyntaxError(f"Cannot parse point {text!r}")
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        value, is_tau = _parse_term(term[1:] if term[0] in "+-" else term, text)
        if is_tau:
            y += sign * value
        else:
            x += sign * value
    return x, y


def parse_point(text: str, basis: PeriodBasis = PeriodBasis.GENERIC) -> TorusPoint:
    """
    Parse "a/N+b/N*tau" and the short forms "1/2", "1/3*tau", "tau/2", "(1+tau)/3", "0"

    Raises:
        PointSyntaxError: If the text is not a rational combination of 1 and tau
    """
    cleaned = text.replace(" ", "")
    if not cleaned:
        raise PointSyntaxError("Empty point")
    x, y = _parse_coordinates(cleaned)
    level = lcm(x.denominator, y.denominator)
    return TorusPoint(level, int(x * level), int(y * level), basis)


def format_point(p: TorusPoint) -> str:
    """Canonical text of the reduced point; parse_point(format_point(p)) == p"""
    r = p.reduced()
    return f"{r.a}/{r.level}+{r.b}/{r.level}*tau"


@dataclass(frozen=True)
class ProductPoint:
    """A point (e, f) of E x F"""
    e: TorusPoint
    f: TorusPoint

    def __add__(self, other: "ProductPoint") -> "ProductPoint":
        return ProductPoint(self.e + other.e, self.f + other.f)

    def __sub__(self, other: "ProductPoint") -> "ProductPoint":
        return ProductPoint(self.e - other.e, self.f - other.f)

    def __neg__(self) -> "ProductPoint":
        return ProductPoint(-self.e, -self.f)

    def __rmul__(self, k: int) -> "ProductPoint":
        return ProductPoint(k * self.e, k * self.f)

    def is_zero(self) -> bool:
        return self.e.is_zero() and self.f.is_zero()

    def lift(self, level_e: int, level_f: int) -> "ProductPoint":
        return ProductPoint(self.e.lift(level_e), self.f.lift(level_f))

    def sort_key(self):
        return self.e.sort_key(), self.f.sort_key()

    def __lt__(self, other: "ProductPoint") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{format_point(self.e)};{format_point(self.f)}"


def product_origin(basis_e: PeriodBasis = PeriodBasis.GENERIC,
                   basis_f: PeriodBasis = PeriodBasis.GENERIC) -> ProductPoint:
    return ProductPoint(origin(basis_e), origin(basis_f))


def parse_product_point(text: str, basis_e: PeriodBasis = PeriodBasis.GENERIC,
                        basis_f: PeriodBasis = PeriodBasis.GENERIC) -> ProductPoint:
    """Parse "e;f" as written by str(ProductPoint)"""
    parts = text.split(";")
    if len(parts) != 2:
        raise PointSyntaxError(f"Expected 'e;f', got {text!r}")
    return ProductPoint(parse_point(parts[0], basis_e), parse_point(parts[1], basis_f))


@dataclass(frozen=True)
class AffineAuto:
    """g(e, f) = (linear_e * e, linear_f * f) + translation"""
    linear_e: Matrix2
    linear_f: Matrix2
    translation: ProductPoint
    name: str = field(default="g", compare=False)

    def apply(self, p: ProductPoint) -> ProductPoint:
        return ProductPoint(
            self._apply_linear(self.linear_e, p.e, self.translation.e),
            self._apply_linear(self.linear_f, p.f, self.translation.f),
        ) + self.translation

    @staticmethod
    def _apply_linear(m: Matrix2, p: TorusPoint, reference: TorusPoint) -> TorusPoint:
        if not is_plus_minus_identity(m) and p.basis != reference.basis:
            raise BasisMismatchError(f"Linear part {m} needs the {reference.basis.value} basis, got {p.basis.value}")
        return apply_matrix(m, p)

    def compose(self, other: "AffineAuto") -> "AffineAuto":
        """self after other"""
        return AffineAuto(
            mat_mul(self.linear_e, other.linear_e),
            mat_mul(self.linear_f, other.linear_f),
            ProductPoint(apply_matrix(self.linear_e, other.translation.e),
                         apply_matrix(self.linear_f, other.translation.f)) + self.translation,
            name=f"{self.name}*{other.name}",
        )

    def power(self, k: int) -> "AffineAuto":
        if k < 0:
            raise ValueError("negative power")
        result = identity_auto(self.translation.e.basis, self.translation.f.basis)
        for _ in range(k):
            result = self.compose(result)
        return AffineAuto(result.linear_e, result.linear_f, result.translation,
                          name=self.name if k == 1 else f"{self.name}^{k}")

    def inverse(self) -> "AffineAuto":
        inv_e, inv_f = mat_inverse(self.linear_e), mat_inverse(self.linear_f)
        return AffineAuto(
            inv_e,
            inv_f,
            ProductPoint(-apply_matrix(inv_e, self.translation.e), -apply_matrix(inv_f, self.translation.f)),
            name=f"{self.name}^-1",
        )

    def is_identity_at(self, level_e: int, level_f: int) -> bool:
        """True if the map fixes every point of the (level_e, level_f) model"""
        return (mat_mod(self.linear_e, level_e) == mat_mod(IDENTITY, level_e)
                and mat_mod(self.linear_f, level_f) == mat_mod(IDENTITY, level_f)
                and self.translation.is_zero())

    def commutes(self, other: "AffineAuto") -> bool:
        return self.compose(other) == other.compose(self)


def identity_auto(basis_e: PeriodBasis = PeriodBasis.GENERIC,
                  basis_f: PeriodBasis = PeriodBasis.GENERIC) -> AffineAuto:
    return AffineAuto(IDENTITY, IDENTITY, product_origin(basis_e, basis_f), name="id")


def translation_auto(t: ProductPoint, name: str = "t") -> AffineAuto:
    return AffineAuto(IDENTITY, IDENTITY, t, name=name)


def auto_order(g: AffineAuto, level: int) -> int:
    """
    Least k >= 1 with g^k the identity on the level-N model

    Raises:
        IncompatibleLevelError: If the translation of g is not N-torsion
    """
    for part in (g.translation.e, g.translation.f):
        if level % part.order:
            raise IncompatibleLevelError(f"Translation {g.translation} is not {level}-torsion")
    power = g
    # linear parts have order dividing 12, so the order divides 12 * level
    for k in range(1, 12 * level + 1):
        if power.is_identity_at(level, level):
            return k
        power = g.compose(power)
    raise PreconditionError(f"{g.name} has no finite order at level {level}")


@dataclass(frozen=True)
class FiniteSubgroup:
    """Finite group of translations of E x F, stored as its enumerated elements"""
    generators: Tuple[ProductPoint, ...]
    elements: Tuple[ProductPoint, ...]

    @classmethod
    def generated_by(cls, generators: Sequence[ProductPoint],
                     basis_e: PeriodBasis = PeriodBasis.GENERIC,
                     basis_f: PeriodBasis = PeriodBasis.GENERIC) -> "FiniteSubgroup":
        zero = product_origin(basis_e, basis_f)
        elements = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for x in frontier:
                for gen in generators:
                    y = x + gen
                    if y not in elements:
                        elements.add(y)
                        nxt.append(y)
            frontier = nxt
        ordered = tuple(sorted((ProductPoint(x.e.reduced(), x.f.reduced()) for x in elements),
                               key=lambda x: x.sort_key()))
        return cls(tuple(generators), ordered)

    @classmethod
    def trivial(cls, basis_e: PeriodBasis = PeriodBasis.GENERIC,
                basis_f: PeriodBasis = PeriodBasis.GENERIC) -> "FiniteSubgroup":
        return cls.generated_by((), basis_e, basis_f)

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_trivial(self) -> bool:
        return self.order == 1

    def contains(self, p: ProductPoint) -> bool:
        return p in self.elements

    def f_projection(self) -> Tuple[TorusPoint, ...]:
        """The image T of the subgroup in F"""
        return tuple(sorted({x.f for x in self.elements}, key=lambda q: q.sort_key()))

    def e_exponent(self) -> int:
        return reduce(lcm, (x.e.order for x in self.elements), 1)

    def f_exponent(self) -> int:
        return reduce(lcm, (x.f.order for x in self.elements), 1)

    def is_closed(self) -> bool:
        members = set(self.elements)
        return all((x + y) in members and (-x) in members for x in self.elements for y in self.elements)


def quotient_rep(p: ProductPoint, subgroup: FiniteSubgroup) -> ProductPoint:
    """Lexicographic minimum of the coset p + T"""
    if subgroup.is_trivial():
        return p
    return min((p + t for t in subgroup.elements), key=lambda x: x.sort_key())


def kernel_invariance(xi: CyclotomicClass, subgroup: FiniteSubgroup) -> bool:
    """True if (1 x xi) maps the translation subgroup into itself"""
    members = set(subgroup.elements)
    return all(ProductPoint(t.e, cm_apply(xi, t.f)) in members for t in subgroup.elements)


def sum_points(points: Iterable[ProductPoint], zero: ProductPoint) -> ProductPoint:
    return reduce(lambda x, y: x + y, points, zero)


def optional_point(text: Optional[str], basis: PeriodBasis) -> Optional[TorusPoint]:
    return parse_point(text, basis) if text is not None else None
