"""
Zero-cycles on finite torsion models of abelian surfaces and the group actions
induced on symmetric products.

Two independent routes decide invariance and freeness of the zero-sum fiber:
closed-form criteria on the F-component of orbit sums, and exhaustive search on a
finite model A[levels] = (E[level_e] x F[level_f]) / T~. The search can exhibit a
fixed zero-sum cycle but never certifies freeness.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations_with_replacement
from math import lcm
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import logging

from app.core.config import settings
from app.core.exceptions import (
    BasisMismatchError,
    EnumerationLimitError,
    IncompatibleLevelError,
    InvalidActionSpecError,
    PreconditionError,
    VerificationError,
)
from app.core.reference_data import FREENESS_CONDITIONS, LIEBERMAN_CONDITION, get_row
from app.services.torsion import (
    IDENTITY,
    MINUS_IDENTITY,
    AffineAuto,
    CyclotomicClass,
    FiniteSubgroup,
    Matrix2,
    PeriodBasis,
    ProductPoint,
    TorusPoint,
    apply_matrix,
    cm_apply,
    mat_add,
    mat_pow,
    mat_scale,
    origin,
    product_origin,
    quotient_rep,
    sum_points,
    torsion_points,
    translation_auto,
)
from app.utils.progress_tracker import ProgressTracker, SearchStage

logger = logging.getLogger(__name__)

Coords = Tuple[int, int, int, int]


class ActionVariant(str, Enum):
    LIEBERMAN = "lieberman"
    BIELLIPTIC = "bielliptic"


class VerdictStatus(str, Enum):
    FREE_BY_CRITERION = "FREE_BY_CRITERION"
    NOT_FREE = "NOT_FREE"
    UNKNOWN_AT_LEVEL = "UNKNOWN_AT_LEVEL"


@dataclass(frozen=True)
class ActionSpec:
    """
    A free action of G = Z/d on an abelian surface.

    BIELLIPTIC: row 1..7 of the Bagnera-de Franchis list, g(e, f) = (e + 1/d, xi*f + z),
    with A = (E x F)/T~. LIEBERMAN: the involution (b, b') -> (-b + a, b' + a') on E x E'.
    """
    variant: ActionVariant
    row: Optional[int] = None
    z: Optional[TorusPoint] = None
    a: Optional[TorusPoint] = None
    a_prime: Optional[TorusPoint] = None

    def __post_init__(self):
        if self.variant == ActionVariant.BIELLIPTIC:
            data = get_row(self.row) if isinstance(self.row, int) else None
            if data is None:
                raise InvalidActionSpecError(f"Row must be one of 1..7, got {self.row}")
            basis = PeriodBasis(data["basis"])
            if self.z is None:
                object.__setattr__(self, "z", origin(basis))
            elif self.z.basis == PeriodBasis.GENERIC:
                object.__setattr__(self, "z", TorusPoint(self.z.level, self.z.a, self.z.b, basis))
            elif self.z.basis != basis:
                raise BasisMismatchError(f"Row {self.row} needs z on the {basis.value} curve, got {self.z.basis.value}")
        else:
            if self.a is None:
                raise InvalidActionSpecError("Lieberman involution needs a point a on E")
            if self.a_prime is None:
                object.__setattr__(self, "a_prime", TorusPoint(2, 1, 0))
            if self.a_prime.order != 2:
                raise InvalidActionSpecError(f"a' must have order two, got order {self.a_prime.order}")
            if self.a.basis != PeriodBasis.GENERIC or self.a_prime.basis != PeriodBasis.GENERIC:
                raise InvalidActionSpecError("Lieberman curves carry generic periods")

    @classmethod
    def bielliptic(cls, row: int, z: Optional[TorusPoint] = None) -> "ActionSpec":
        return cls(ActionVariant.BIELLIPTIC, row=row, z=z)

    @classmethod
    def lieberman(cls, a: TorusPoint, a_prime: Optional[TorusPoint] = None) -> "ActionSpec":
        return cls(ActionVariant.LIEBERMAN, a=a, a_prime=a_prime)

    @property
    def is_lieberman(self) -> bool:
        return self.variant == ActionVariant.LIEBERMAN

    @property
    def d(self) -> int:
        return 2 if self.is_lieberman else get_row(self.row)["d"]

    @property
    def basis_e(self) -> PeriodBasis:
        return PeriodBasis.GENERIC

    @property
    def basis_f(self) -> PeriodBasis:
        return PeriodBasis.GENERIC if self.is_lieberman else PeriodBasis(get_row(self.row)["basis"])

    @property
    def xi(self) -> Optional[CyclotomicClass]:
        if self.is_lieberman:
            return None
        return CyclotomicClass(get_row(self.row)["xi"], self.basis_f)

    @property
    def kernel(self) -> FiniteSubgroup:
        """T~ = ker(E x F -> A)"""
        generator = None if self.is_lieberman else get_row(self.row)["kernel"]
        if generator is None:
            return FiniteSubgroup.trivial(self.basis_e, self.basis_f)
        (ae, be, ne), (af, bf, nf) = generator
        t = ProductPoint(TorusPoint(ne, ae, be, self.basis_e), TorusPoint(nf, af, bf, self.basis_f))
        return FiniteSubgroup.generated_by([t], self.basis_e, self.basis_f)

    @property
    def kernel_f(self) -> Tuple[TorusPoint, ...]:
        """T, the projection of T~ to F"""
        return self.kernel.f_projection()

    def generator(self) -> AffineAuto:
        """Canonical generator with its translation at natural levels"""
        if self.is_lieberman:
            return AffineAuto(MINUS_IDENTITY, IDENTITY, ProductPoint(self.a, self.a_prime), name="g")
        return AffineAuto(IDENTITY, self.xi.matrix,
                          ProductPoint(TorusPoint(self.d, 1, 0, self.basis_e), self.z), name="g")

    @property
    def label(self) -> str:
        if self.is_lieberman:
            return f"lieberman(a={self.a}, a'={self.a_prime})"
        return f"row {self.row}(z={self.z})"


@dataclass(frozen=True)
class ActionGenerators:
    g: AffineAuto
    kernel_generators: Tuple[AffineAuto, ...]
    level_e: int
    level_f: int

    @property
    def generators(self) -> Tuple[AffineAuto, ...]:
        return (self.g,) + self.kernel_generators


def build_action(spec: ActionSpec, level_e: int, level_f: int) -> ActionGenerators:
    """
    Generators of G x T~ written at the model levels

    Raises:
        IncompatibleLevelError: If a translation does not live at the requested levels
    """
    kernel = spec.kernel
    need_e = lcm(spec.d, kernel.e_exponent()) if not spec.is_lieberman else spec.a.order
    need_f = lcm(spec.z.order, kernel.f_exponent()) if not spec.is_lieberman else 2
    if level_e < 1 or level_e % need_e:
        raise IncompatibleLevelError(f"E-level {level_e} must be divisible by {need_e} for {spec.label}")
    if level_f < 1 or level_f % need_f:
        raise IncompatibleLevelError(f"F-level {level_f} must be divisible by {need_f} for {spec.label}")
    natural = spec.generator()
    g = AffineAuto(natural.linear_e, natural.linear_f, natural.translation.lift(level_e, level_f), name="g")
    kernel_generators = tuple(
        translation_auto(t.lift(level_e, level_f), name=f"t{i + 1}") for i, t in enumerate(kernel.generators)
    )
    for t in kernel_generators:
        if not g.commutes(t):
            raise InvalidActionSpecError(f"{g.name} and {t.name} do not commute")
    return ActionGenerators(g, kernel_generators, level_e, level_f)


class CompiledAuto:
    """An affine map acting on model coordinates (ea, eb, fa, fb)"""

    def __init__(self, g: AffineAuto, model: "PointModel"):
        self.name = g.name
        self._me = g.linear_e
        self._mf = g.linear_f
        self._t = model.encode(g.translation)
        self._model = model

    def __call__(self, x: Coords) -> Coords:
        me, mf, t, le, lf = self._me, self._mf, self._t, self._model.level_e, self._model.level_f
        y = (
            (me[0][0] * x[0] + me[0][1] * x[1] + t[0]) % le,
            (me[1][0] * x[0] + me[1][1] * x[1] + t[1]) % le,
            (mf[0][0] * x[2] + mf[0][1] * x[3] + t[2]) % lf,
            (mf[1][0] * x[2] + mf[1][1] * x[3] + t[3]) % lf,
        )
        return self._model.reduce(y)


class PointModel:
    """
    Finite model of A = (E x F)/T~: the (level_e, level_f) torsion, or the subgroup
    spanned by explicit generators, with one representative per T~-coset.
    """

    def __init__(self, level_e: int, level_f: int,
                 basis_e: PeriodBasis = PeriodBasis.GENERIC,
                 basis_f: PeriodBasis = PeriodBasis.GENERIC,
                 kernel: Optional[FiniteSubgroup] = None,
                 generators: Optional[Sequence[ProductPoint]] = None,
                 action: Optional[ActionGenerators] = None):
        if level_e < 1 or level_f < 1:
            raise IncompatibleLevelError(f"Invalid model levels ({level_e}, {level_f})")
        self.level_e = level_e
        self.level_f = level_f
        self.basis_e = basis_e
        self.basis_f = basis_f
        self.kernel = kernel or FiniteSubgroup.trivial(basis_e, basis_f)
        self.action = action
        self.zero: Coords = (0, 0, 0, 0)
        self._kernel = [self.encode(t) for t in self.kernel.elements]
        if generators is None:
            grid = (
                (ea, eb, fa, fb)
                for ea in range(level_e) for eb in range(level_e)
                for fa in range(level_f) for fb in range(level_f)
            )
        else:
            grid = self._span([self.encode(p) for p in generators])
        self.points: List[Coords] = sorted(x for x in grid if self.reduce(x) == x)
        self.index: Dict[Coords, int] = {x: i for i, x in enumerate(self.points)}
        logger.debug(f"Point model ({level_e}, {level_f}) with {len(self.points)} points")

    @classmethod
    def for_spec(cls, spec: ActionSpec, level_e: int, level_f: int) -> "PointModel":
        action = build_action(spec, level_e, level_f)
        return cls(level_e, level_f, spec.basis_e, spec.basis_f, spec.kernel, action=action)

    @property
    def levels(self) -> Tuple[int, int]:
        return self.level_e, self.level_f

    def _span(self, generators: List[Coords]) -> List[Coords]:
        elements = {self.zero}
        frontier = [self.zero]
        while frontier:
            nxt = []
            for x in frontier:
                for gen in generators:
                    y = self.add(x, gen)
                    if y not in elements:
                        elements.add(y)
                        nxt.append(y)
            frontier = nxt
        return list(elements)

    def encode(self, p: ProductPoint) -> Coords:
        e = p.e.lift(self.level_e)
        f = p.f.lift(self.level_f)
        return e.a, e.b, f.a, f.b

    def decode(self, x: Coords) -> ProductPoint:
        return ProductPoint(TorusPoint(self.level_e, x[0], x[1], self.basis_e),
                            TorusPoint(self.level_f, x[2], x[3], self.basis_f))

    def add(self, x: Coords, y: Coords) -> Coords:
        le, lf = self.level_e, self.level_f
        return (x[0] + y[0]) % le, (x[1] + y[1]) % le, (x[2] + y[2]) % lf, (x[3] + y[3]) % lf

    def neg(self, x: Coords) -> Coords:
        le, lf = self.level_e, self.level_f
        return -x[0] % le, -x[1] % le, -x[2] % lf, -x[3] % lf

    def reduce(self, x: Coords) -> Coords:
        if len(self._kernel) == 1:
            return x
        return min(self.add(x, t) for t in self._kernel)

    def total(self, xs: Sequence[Coords]) -> Coords:
        s = self.zero
        for x in xs:
            s = self.add(s, x)
        return self.reduce(s)

    def compile(self, g: AffineAuto) -> CompiledAuto:
        return CompiledAuto(g, self)

    def orbit(self, h: CompiledAuto, x: Coords, limit: int = 12) -> List[Coords]:
        orbit = [x]
        y = h(x)
        while y != x:
            orbit.append(y)
            if len(orbit) > limit:
                raise PreconditionError(f"{h.name} has an orbit longer than {limit}")
            y = h(y)
        return orbit

    def to_cycle(self, xs: Sequence[Coords]) -> "ZeroCycle":
        return ZeroCycle.of([self.decode(x) for x in xs], self.kernel)


@dataclass(frozen=True)
class ZeroCycle:
    """Sorted multiset of points of A, each reduced modulo T~"""
    points: Tuple[ProductPoint, ...]
    kernel: Optional[FiniteSubgroup] = field(default=None, compare=False, repr=False)

    @classmethod
    def of(cls, points: Sequence[ProductPoint], kernel: Optional[FiniteSubgroup] = None) -> "ZeroCycle":
        if not points:
            raise PreconditionError("A zero-cycle needs at least one point")
        if kernel is None:
            kernel = FiniteSubgroup.trivial(points[0].e.basis, points[0].f.basis)
        reduced = sorted((quotient_rep(p, kernel) for p in points), key=lambda p: p.sort_key())
        return cls(tuple(ProductPoint(p.e.reduced(), p.f.reduced()) for p in reduced), kernel)

    @property
    def length(self) -> int:
        return len(self.points)

    def to_strings(self) -> List[str]:
        return [str(p) for p in self.points]


def act_on_cycle(g: AffineAuto, cycle: ZeroCycle, kernel: Optional[FiniteSubgroup] = None) -> ZeroCycle:
    """Pointwise image, reduced and re-sorted"""
    kernel = kernel or cycle.kernel
    return ZeroCycle.of([g.apply(p) for p in cycle.points], kernel)


def cycle_sum(cycle: ZeroCycle) -> ProductPoint:
    """Group sum of the multiset in A"""
    first = cycle.points[0]
    zero = product_origin(first.e.basis, first.f.basis)
    kernel = cycle.kernel or FiniteSubgroup.trivial(first.e.basis, first.f.basis)
    total = quotient_rep(sum_points(cycle.points, zero), kernel)
    return ProductPoint(total.e.reduced(), total.f.reduced())


def image_sum_formula(g: AffineAuto, cycle: ZeroCycle) -> ProductPoint:
    """M(sum c) + length * t, reduced modulo T~"""
    s = cycle_sum(cycle)
    image = ProductPoint(apply_matrix(g.linear_e, s.e), apply_matrix(g.linear_f, s.f)) \
        + cycle.length * g.translation
    kernel = cycle.kernel or FiniteSubgroup.trivial(s.e.basis, s.f.basis)
    rep = quotient_rep(image, kernel)
    return ProductPoint(rep.e.reduced(), rep.f.reduced())


def _zero_fiber_coords(model: PointModel, length: int, limit: Optional[int] = None) -> Iterator[List[Coords]]:
    if length < 1:
        raise PreconditionError(f"Cycle length must be positive, got {length}")
    limit = limit or settings.MAX_ENUMERATION
    points, index = model.points, model.index
    visited = 0

    def extend(start: int, remaining: int, partial: Coords, chosen: List[Coords]):
        nonlocal visited
        visited += 1
        if visited > limit:
            raise EnumerationLimitError(f"Zero-fiber enumeration exceeded {limit} nodes")
        if remaining == 1:
            last = model.reduce(model.neg(partial))
            if index[last] >= start:
                yield chosen + [last]
            return
        for i in range(start, len(points)):
            x = points[i]
            yield from extend(i, remaining - 1, model.reduce(model.add(partial, x)), chosen + [x])

    yield from extend(0, length, model.zero, [])


def enumerate_zero_fiber(model: PointModel, length: int) -> Iterator[ZeroCycle]:
    """Every multiset of the given length summing to 0, once, in canonical order"""
    for coords in _zero_fiber_coords(model, length):
        yield model.to_cycle(coords)


def f_coefficient(d: int, matrix: Matrix2) -> Matrix2:
    """sum_{k=1}^{d-1} (d-k) M^(k-1)"""
    coefficient = ((0, 0), (0, 0))
    for k in range(1, d):
        coefficient = mat_add(coefficient, mat_scale(d - k, mat_pow(matrix, k - 1)))
    return coefficient


def f_component(d: int, xi: CyclotomicClass, m: int, z: TorusPoint) -> TorusPoint:
    """
    F-component of sum_i sum_j g^j(x_i) for m orbit generators

    Raises:
        BasisMismatchError: If z does not live on the curve xi acts on
    """
    cm_apply(xi, z)
    return apply_matrix(f_coefficient(d, xi.matrix), m * z)


def reduced_f_component(d: int, xi: CyclotomicClass, m: int, z: TorusPoint) -> TorusPoint:
    """mz, (2+omega)mz, 2(1+i)mz, 6*zeta*mz for d = 2, 3, 4, 6"""
    if xi.order != d:
        raise PreconditionError(f"d={d} needs a primitive d-th root of unity, got {xi.tag.value}")
    cm_apply(xi, z)
    mz = m * z
    m_xi = xi.matrix
    if d == 2:
        return mz
    if d == 3:
        return apply_matrix(mat_add(mat_scale(2, IDENTITY), m_xi), mz)
    if d == 4:
        return apply_matrix(mat_scale(2, mat_add(IDENTITY, m_xi)), mz)
    return apply_matrix(mat_scale(6, m_xi), mz)


def orbit_sum(g: AffineAuto, lifts: Sequence[ProductPoint], d: int) -> ProductPoint:
    """sum_i sum_{j<d} g^j(x_i) computed on E x F, without reduction modulo T~"""
    total = product_origin(g.translation.e.basis, g.translation.f.basis)
    for x in lifts:
        y = x
        for _ in range(d):
            total = total + y
            y = g.apply(y)
    return total


@dataclass(frozen=True)
class PrimeElement:
    """h = g^power of prime order p, with the data of h as an action of Z/p"""
    p: int
    power: int
    h: AffineAuto
    m: int

    @property
    def label(self) -> str:
        return "g" if self.power == 1 else f"g^{self.power}"


def _prime_factors(d: int) -> List[int]:
    return [p for p in range(2, d + 1) if d % p == 0 and all(p % q for q in range(2, p))]


def prime_elements(spec: ActionSpec, n: int) -> List[PrimeElement]:
    """g^(d/p) for each prime p dividing both d and n+1"""
    g = spec.generator()
    elements = []
    for p in _prime_factors(spec.d):
        if (n + 1) % p:
            continue
        k = spec.d // p
        elements.append(PrimeElement(p, k, g.power(k), (n + 1) // p))
    return elements


def invariance_criterion(spec: ActionSpec, n: int) -> bool:
    """d | n+1 and (n+1)z = 0; for Lieberman n odd, (n+1)a = 0 and (n+1)a' = 0"""
    if n < 1:
        raise PreconditionError(f"n must be at least 1, got {n}")
    if spec.is_lieberman:
        return n % 2 == 1 and ((n + 1) * spec.a).is_zero() and ((n + 1) * spec.a_prime).is_zero()
    return (n + 1) % spec.d == 0 and ((n + 1) * spec.z).is_zero()


def default_levels(spec: ActionSpec, n: int, multiplier: Optional[int] = None) -> Tuple[int, int]:
    """Brute-force levels: E at d^2 times the exponent of T~ on E, F at lcm(n+1, exponent on F)"""
    multiplier = multiplier or settings.LEVEL_MULTIPLIER
    if spec.is_lieberman:
        return lcm(n + 1, spec.a.order) * multiplier, 4 * multiplier
    kernel = spec.kernel
    level_e = spec.d * spec.d * kernel.e_exponent()
    level_f = lcm(n + 1, kernel.f_exponent(), spec.z.order)
    return level_e * multiplier, level_f * multiplier


def invariance_levels(spec: ActionSpec, n: int) -> Tuple[int, int]:
    """Smallest levels holding the translations, used by the invariance search"""
    if spec.is_lieberman:
        return lcm(n + 1, spec.a.order), 2
    kernel = spec.kernel
    return lcm(spec.d, kernel.e_exponent()), lcm(n + 1, kernel.f_exponent(), spec.z.order)


@dataclass(frozen=True)
class InvarianceReport:
    holds: bool
    checked: int
    levels: Tuple[int, int]
    counterexample: Optional[ZeroCycle] = None
    image_sum: Optional[ProductPoint] = None


def invariance_bruteforce(spec: ActionSpec, n: int,
                          levels: Optional[Tuple[int, int]] = None) -> InvarianceReport:
    """Check on the model that g maps every zero-sum cycle of length n+1 to a zero-sum cycle"""
    levels = levels or invariance_levels(spec, n)
    model = PointModel.for_spec(spec, *levels)
    g = model.compile(model.action.g)
    checked = 0
    for coords in _zero_fiber_coords(model, n + 1):
        checked += 1
        image = model.total([g(x) for x in coords])
        if image != model.zero:
            cycle = model.to_cycle(coords)
            logger.info(f"Zero fiber not invariant for {spec.label}, n={n}: {cycle.to_strings()}")
            return InvarianceReport(False, checked, levels, cycle, model.decode(image))
    logger.info(f"Zero fiber invariant for {spec.label}, n={n} on {checked} cycles at levels {levels}")
    return InvarianceReport(True, checked, levels)


@dataclass(frozen=True)
class FreenessVerdict:
    status: VerdictStatus
    condition_fired: str
    element: Optional[str] = None
    element_power: Optional[int] = None
    criterion_value: Optional[TorusPoint] = None
    witness: Optional[ZeroCycle] = None
    levels: Optional[Tuple[int, int]] = None
    notes: Tuple[str, ...] = ()


_CONVERSE_NOTE = (
    "converse open: the published conditions are stated as sufficient; "
    "NOT_FREE is reported only together with a constructible fixed zero-sum cycle"
)


def published_condition(spec: ActionSpec, n: int) -> Optional[bool]:
    """The freeness hypotheses exactly as printed; None where none is printed (d=6)"""
    d = spec.d
    m = (n + 1) // d
    if spec.is_lieberman:
        return not (m * spec.a).is_zero()
    kernel_f = spec.kernel_f
    trivial = all(t.is_zero() for t in kernel_f)
    mz = m * spec.z
    if d == 2:
        return mz not in kernel_f
    if d == 3:
        line = [TorusPoint(3, k, k, spec.basis_f) for k in range(3)]
        return trivial and mz not in line
    if d == 4:
        line = [TorusPoint(2, k, k, spec.basis_f) for k in range(2)]
        return trivial and (2 * mz) not in line
    return None


def freeness_criterion(spec: ActionSpec, n: int) -> FreenessVerdict:
    """
    Closed-form freeness test on the generalized Kummer variety

    Every prime-order element h = g^(d/p) is tested: its orbit sums have F-component
    f_component(p, xi^(d/p), (n+1)/p, z_h), and a fixed zero-sum cycle of h exists
    exactly when that value lies in T.

    Raises:
        PreconditionError: If the zero fiber is not known to be invariant
    """
    if not invariance_criterion(spec, n):
        raise PreconditionError(f"Invariance hypotheses fail for {spec.label}, n={n}")
    if spec.is_lieberman:
        m = (n + 1) // 2
        value = m * spec.a
        if value.is_zero():
            return FreenessVerdict(VerdictStatus.NOT_FREE, f"violated: {LIEBERMAN_CONDITION}",
                                   element="g", element_power=1, criterion_value=value)
        return FreenessVerdict(VerdictStatus.FREE_BY_CRITERION, LIEBERMAN_CONDITION,
                               criterion_value=value, notes=(_CONVERSE_NOTE,))

    condition = FREENESS_CONDITIONS[spec.d]
    kernel_f = spec.kernel_f
    for element in prime_elements(spec, n):
        xi_h = CyclotomicClass.from_matrix(element.h.linear_f, spec.basis_f)
        value = f_component(element.p, xi_h, element.m, element.h.translation.f)
        logger.debug(f"{spec.label}, n={n}: F-sum of {element.label} is {value}")
        if value in kernel_f:
            return FreenessVerdict(
                VerdictStatus.NOT_FREE, f"violated: {condition}", element=element.label,
                element_power=element.power, criterion_value=value,
                notes=(f"F-sum {value} of {element.label}-orbits lies in T",),
            )
    return FreenessVerdict(VerdictStatus.FREE_BY_CRITERION, condition, notes=(_CONVERSE_NOTE,))


def verify_witness(spec: ActionSpec, n: int, cycle: ZeroCycle, element_power: int) -> bool:
    """Independent re-check: length n+1, fixed by g^k != 1, sum zero in A"""
    if cycle.length != n + 1 or element_power % spec.d == 0:
        return False
    kernel = spec.kernel
    h = spec.generator().power(element_power)
    cycle = ZeroCycle.of(cycle.points, kernel)
    fixed = act_on_cycle(h, cycle, kernel) == cycle
    return fixed and cycle_sum(cycle).is_zero()


def freeness_bruteforce(spec: ActionSpec, n: int, levels: Optional[Tuple[int, int]] = None) -> FreenessVerdict:
    """
    Search the model for a zero-sum cycle fixed by a prime-order element.

    h acts freely on points, so its fixed cycles of length n+1 are unions of m = (n+1)/p
    h-orbits. The orbit sums of all model points are tabulated and the m-fold sums of
    the table are explored exhaustively; a hit is turned into a cycle and re-verified.
    """
    levels = levels or default_levels(spec, n)
    model = PointModel.for_spec(spec, *levels)
    g = model.action.g
    tracker = ProgressTracker(f"{spec.label}, n={n}")

    for element in prime_elements(spec, n):
        h = model.compile(g.power(element.power))
        tracker.set_stage(SearchStage.ORBIT_TABLE, f"{element.label}-orbits on {len(model.points)} points")
        table: Dict[Coords, Coords] = {}
        seen = set()
        for x in model.points:
            if x in seen:
                continue
            orbit = model.orbit(h, x)
            if len(orbit) != element.p:
                raise PreconditionError(f"{element.label} fixes a point of the model: not a free action")
            seen.update(orbit)
            table.setdefault(model.total(orbit), x)
        tracker.complete_stage(SearchStage.ORBIT_TABLE, f"{len(table)} distinct orbit sums")

        tracker.set_stage(SearchStage.SUMSET, f"{element.m}-fold sums")
        reach: Dict[Coords, Tuple[Coords, ...]] = {model.zero: ()}
        for step in range(element.m):
            nxt: Dict[Coords, Tuple[Coords, ...]] = {}
            for s, path in reach.items():
                for value, x in table.items():
                    t = model.reduce(model.add(s, value))
                    if t not in nxt:
                        nxt[t] = path + (x,)
            reach = nxt
            tracker.increment(step + 1, element.m)

        if model.zero in reach:
            tracker.set_stage(SearchStage.WITNESS_CHECK, f"fixed zero-sum cycle for {element.label}")
            coords = [y for x in reach[model.zero] for y in model.orbit(h, x)]
            witness = model.to_cycle(coords)
            if not verify_witness(spec, n, witness, element.power):
                raise VerificationError(f"Witness {witness.to_strings()} failed re-verification")
            tracker.complete_stage(SearchStage.WITNESS_CHECK, "witness verified")
            return FreenessVerdict(
                VerdictStatus.NOT_FREE, f"fixed zero-sum cycle of {element.label}",
                element=element.label, element_power=element.power, witness=witness, levels=levels,
            )

    tracker.complete_stage(SearchStage.COMPLETE, f"no witness at levels {levels}")
    return FreenessVerdict(VerdictStatus.UNKNOWN_AT_LEVEL, f"no fixed zero-sum cycle at levels {levels}",
                           levels=levels)


@dataclass(frozen=True)
class CoherenceReport:
    criterion: FreenessVerdict
    bruteforce: FreenessVerdict

    @property
    def coherent(self) -> bool:
        if self.criterion.status == VerdictStatus.FREE_BY_CRITERION:
            return self.bruteforce.status == VerdictStatus.UNKNOWN_AT_LEVEL
        return self.bruteforce.status == VerdictStatus.NOT_FREE


def criterion_bruteforce_agreement(spec: ActionSpec, n: int,
                                    levels: Optional[Tuple[int, int]] = None) -> CoherenceReport:
    return CoherenceReport(freeness_criterion(spec, n), freeness_bruteforce(spec, n, levels))


@dataclass(frozen=True)
class ScanEntry:
    z: TorusPoint
    verdict: FreenessVerdict
    bruteforce: Optional[FreenessVerdict] = None


def scan_z(row: int, n: int, with_bruteforce: bool = False, workers: Optional[int] = None) -> List[ScanEntry]:
    """
    Criterion verdicts for every z in F[n+1]

    Raises:
        PreconditionError: If d does not divide n+1
    """
    data = get_row(row)
    if data is None:
        raise InvalidActionSpecError(f"Row must be one of 1..7, got {row}")
    if (n + 1) % data["d"]:
        raise PreconditionError(f"d={data['d']} does not divide n+1={n + 1}")
    basis = PeriodBasis(data["basis"])

    def evaluate(z: TorusPoint) -> ScanEntry:
        spec = ActionSpec.bielliptic(row, z)
        verdict = freeness_criterion(spec, n)
        brute = None
        if with_bruteforce and verdict.status == VerdictStatus.FREE_BY_CRITERION:
            brute = freeness_bruteforce(spec, n)
        return ScanEntry(z, verdict, brute)

    candidates = torsion_points(n + 1, basis)
    with ThreadPoolExecutor(max_workers=workers or settings.MAX_WORKERS) as pool:
        entries = list(pool.map(evaluate, candidates))
    free = sum(1 for entry in entries if entry.verdict.status == VerdictStatus.FREE_BY_CRITERION)
    logger.info(f"Row {row}, n={n}: {free}/{len(entries)} values of z free by criterion")
    return entries


def q2hilb_model_check(set_size: int, n: int) -> bool:
    """
    Is the involution induced on n-element multisets of a set with a free involution free?

    The set {0, ..., set_size-1} carries the involution i -> i xor 1.
    """
    if set_size < 2 or set_size % 2:
        raise PreconditionError(f"A free involution needs an even, nonempty set; got {set_size}")
    if n < 1:
        raise PreconditionError(f"n must be at least 1, got {n}")
    for multiset in combinations_with_replacement(range(set_size), n):
        if tuple(sorted(i ^ 1 for i in multiset)) == multiset:
            return False
    return True


@dataclass(frozen=True)
class FixedLengthReport:
    holds: bool
    d: int
    lengths_with_fixed: Tuple[int, ...]
    counts: Dict[int, int]
    examples: Dict[int, ZeroCycle]
    levels: Tuple[int, int]


def fixed_cycle_length_check(spec: ActionSpec, max_len: int,
                             levels: Optional[Tuple[int, int]] = None) -> FixedLengthReport:
    """
    All G-fixed cycles of length <= max_len, counted through the G-orbits of the model

    A multiset is G-fixed exactly when its multiplicities are constant on G-orbits, so
    the fixed cycles of length L are the multisets of orbits of total size L.
    """
    if max_len < 1:
        raise PreconditionError(f"max_len must be positive, got {max_len}")
    if levels is None:
        if spec.is_lieberman:
            levels = (spec.a.order, 2)
        else:
            levels = (lcm(spec.d, spec.kernel.e_exponent()), lcm(spec.kernel.f_exponent(), spec.z.order))
    model = PointModel.for_spec(spec, *levels)
    g = model.compile(model.action.g)
    orbits: List[List[Coords]] = []
    seen = set()
    for x in model.points:
        if x in seen:
            continue
        orbit = model.orbit(g, x)
        if len(orbit) == 1:
            raise PreconditionError(f"{spec.label} fixes the point {model.decode(x)}")
        seen.update(orbit)
        orbits.append(orbit)

    counts = [1] + [0] * max_len
    for orbit in orbits:
        size = len(orbit)
        for length in range(size, max_len + 1):
            counts[length] += counts[length - size]
    lengths = tuple(length for length in range(1, max_len + 1) if counts[length])

    examples = {}
    first = orbits[0]
    for length in lengths:
        if length % len(first) == 0:
            cycle = model.to_cycle(first * (length // len(first)))
            if act_on_cycle(model.action.g, cycle) != cycle:
                raise VerificationError(f"Orbit cycle {cycle.to_strings()} is not fixed")
            examples[length] = cycle
    holds = all(length % spec.d == 0 for length in lengths)
    return FixedLengthReport(holds, spec.d, lengths, {k: counts[k] for k in lengths}, examples, levels)
