from math import lcm

import pytest

from app.core.exceptions import BasisMismatchError, IncompatibleLevelError, InvalidLevelError, PointSyntaxError
from app.services.cycles import ActionSpec, build_action
from app.services.torsion import (
    CMTag,
    CyclotomicClass,
    FiniteSubgroup,
    PeriodBasis,
    ProductPoint,
    TorusPoint,
    auto_order,
    cm_apply,
    format_point,
    identity_auto,
    kernel_invariance,
    make_point,
    origin,
    parse_point,
    parse_product_point,
    point_order,
    product_origin,
    quotient_rep,
    torsion_points,
)
from tests.helpers import bielliptic, random_point

GAUSS = PeriodBasis.GAUSS
EISENSTEIN = PeriodBasis.EISENSTEIN


class TestTorusPoint:
    def test_make_point_normalizes(self):
        assert make_point(0, 0, 4).order == 1
        half = make_point(2, 0, 4)
        assert half == TorusPoint(2, 1, 0)
        assert half.order == 2
        assert make_point(1, 1, 3).order == 3
        assert make_point(-1, 5, 4) == TorusPoint(4, 3, 1)

    def test_make_point_rejects_level_zero(self):
        with pytest.raises(InvalidLevelError):
            make_point(1, 0, 0)
        with pytest.raises(InvalidLevelError):
            TorusPoint(-3, 1, 0)

    def test_order_by_scalar_multiplication(self, rng):
        for _ in range(200):
            p = random_point(rng, 18)
            k = 1
            while not (k * p).is_zero():
                k += 1
            assert point_order(p) == k

    def test_level_times_point_is_zero(self, rng):
        for _ in range(100):
            p = random_point(rng)
            assert (p.level * p).is_zero()

    def test_lift_then_reduce_is_identity(self, rng):
        for _ in range(100):
            p = random_point(rng, 8)
            lifted = p.lift(p.level * rng.randint(1, 5))
            assert lifted == p
            assert lifted.reduced() == p.reduced()

    def test_lift_to_incompatible_level(self):
        with pytest.raises(IncompatibleLevelError):
            TorusPoint(4, 1, 0).lift(6)

    def test_mixed_levels_add_at_lcm(self):
        total = TorusPoint(2, 1, 0) + TorusPoint(3, 0, 1)
        assert total.level == 6
        assert total == TorusPoint(6, 3, 2)

    def test_mixed_bases_do_not_add(self):
        with pytest.raises(BasisMismatchError):
            TorusPoint(2, 1, 0, GAUSS) + TorusPoint(2, 1, 0, EISENSTEIN)

    def test_torsion_points(self):
        points = torsion_points(3)
        assert len(points) == 9
        assert points[0] == origin()
        assert len(set(points)) == 9

    @pytest.mark.parametrize("level", range(1, 25))
    def test_identity_and_inverses(self, level):
        zero = origin()
        for p in torsion_points(level):
            assert p + zero == p == zero + p
            assert (p + (-p)).is_zero()
            assert p - p == zero

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_associative_and_commutative(self, level):
        points = torsion_points(level)
        for p in points:
            for q in points:
                assert p + q == q + p
                for r in points:
                    assert (p + q) + r == p + (q + r)

    def test_associative_across_levels(self, rng):
        for _ in range(500):
            p, q, r = (random_point(rng, 24) for _ in range(3))
            assert (p + q) + r == p + (q + r)
            assert (p - q) + q == p


class TestParsing:
    @pytest.mark.parametrize("text, expected", [
        ("1/2", TorusPoint(2, 1, 0)),
        ("1/3*tau", TorusPoint(3, 0, 1)),
        ("tau/2", TorusPoint(2, 0, 1)),
        ("(1+tau)/3", TorusPoint(3, 1, 1)),
        ("0", TorusPoint(1, 0, 0)),
        ("1/4+3/4*tau", TorusPoint(4, 1, 3)),
        ("-1/6", TorusPoint(6, 5, 0)),
        ("2*tau/3", TorusPoint(3, 0, 2)),
        ("-tau/4", TorusPoint(4, 0, 3)),
        ("3tau/4", TorusPoint(4, 0, 3)),
    ])
    def test_short_forms(self, text, expected):
        assert parse_point(text) == expected

    def test_canonical_text_parses_back(self, rng):
        for _ in range(50):
            p = random_point(rng)
            assert parse_point(format_point(p)) == p

    def test_canonical_text(self):
        assert format_point(TorusPoint(4, 2, 0)) == "1/2+0/2*tau"
        assert str(ProductPoint(origin(), TorusPoint(3, 1, 1))) == "0/1+0/1*tau;1/3+1/3*tau"

    @pytest.mark.parametrize("text", [
        "", "x", "1/0", "1/2;1/2", "(1+tau/3", "tau*tau", "tau1/2", "2tautau", "*tau", "1/2*", "tau/0", "1/2tau/3/4", "1//2",
    ])
    def test_bad_points(self, text):
        with pytest.raises(PointSyntaxError):
            parse_point(text)

    def test_product_point(self):
        p = parse_product_point("1/2;(1+tau)/3", basis_f=EISENSTEIN)
        assert p.e == TorusPoint(2, 1, 0)
        assert p.f == TorusPoint(3, 1, 1, EISENSTEIN)
        with pytest.raises(PointSyntaxError):
            parse_product_point("1/2")


class TestComplexMultiplication:
    @pytest.mark.parametrize("tag, basis, order", [
        (CMTag.MINUS_ONE, PeriodBasis.GENERIC, 2),
        (CMTag.OMEGA, EISENSTEIN, 3),
        (CMTag.I, GAUSS, 4),
        (CMTag.ZETA, EISENSTEIN, 6),
    ])
    def test_minimal_polynomial_and_order(self, tag, basis, order):
        xi = CyclotomicClass(tag, basis)
        assert xi.minimal_polynomial_holds()
        assert xi.exact_order() == order == xi.order

    @pytest.mark.parametrize("tag, basis", [
        (CMTag.I, EISENSTEIN),
        (CMTag.OMEGA, GAUSS),
        (CMTag.ZETA, PeriodBasis.GENERIC),
    ])
    def test_cm_needs_its_curve(self, tag, basis):
        with pytest.raises(BasisMismatchError):
            CyclotomicClass(tag, basis)

    def test_i_on_gauss_curve(self, rng):
        xi = CyclotomicClass(CMTag.I, GAUSS)
        for _ in range(20):
            level = rng.randint(1, 10)
            a, b = rng.randrange(level), rng.randrange(level)
            assert cm_apply(xi, TorusPoint(level, a, b, GAUSS)) == TorusPoint(level, -b, a, GAUSS)

    def test_zeta_on_eisenstein_curve(self):
        zeta = CyclotomicClass(CMTag.ZETA, EISENSTEIN)
        assert cm_apply(zeta, TorusPoint(6, 1, 0, EISENSTEIN)) == TorusPoint(6, 0, 1, EISENSTEIN)

    def test_minus_one_is_an_involution(self, rng):
        xi = CyclotomicClass(CMTag.MINUS_ONE)
        for _ in range(20):
            p = random_point(rng)
            assert cm_apply(xi, p) == -p
            assert cm_apply(xi, cm_apply(xi, p)) == p

    def test_basis_mismatch_on_apply(self):
        xi = CyclotomicClass(CMTag.I, GAUSS)
        with pytest.raises(BasisMismatchError):
            cm_apply(xi, TorusPoint(2, 1, 0, EISENSTEIN))

    def test_powers(self):
        zeta = CyclotomicClass(CMTag.ZETA, EISENSTEIN)
        assert zeta.power(2).tag == CMTag.OMEGA
        assert zeta.power(3).tag == CMTag.MINUS_ONE
        assert CyclotomicClass(CMTag.I, GAUSS).power(2).tag == CMTag.MINUS_ONE


class TestAffineAuto:
    def test_lieberman_involution_has_order_two(self):
        spec = ActionSpec.lieberman(origin(), TorusPoint(2, 1, 0))
        g = spec.generator()
        assert auto_order(g, 2) == 2
        assert g.power(2).is_identity_at(2, 2)

    def test_row_two_generator_has_order_three(self):
        g = bielliptic(2).generator()
        assert auto_order(g, 3) == 3

    def test_identity_has_order_one(self):
        assert auto_order(identity_auto(), 5) == 1

    def test_row_one_at_level_two(self):
        action = build_action(bielliptic(1), 2, 2)
        g = action.g
        assert g.linear_f == ((-1, 0), (0, -1))
        assert g.translation.e == TorusPoint(2, 1, 0)
        assert auto_order(g, 2) == 2

    def test_row_six_generators_commute(self):
        action = build_action(bielliptic(6), 9, 3)
        g, t = action.generators
        assert g.commutes(t)
        assert auto_order(g, 9) == 3
        assert auto_order(t, 9) == 3

    @pytest.mark.parametrize("row, z", [(5, "0"), (5, "1/4"), (6, "0"), (6, "(1+tau)/3"), (7, "0"), (7, "tau/2")])
    def test_order_of_composition_divides_lcm(self, row, z):
        g, t = build_action(bielliptic(row, z), 12, 12).generators
        bound = lcm(auto_order(g, 12), auto_order(t, 12))
        for h in (g.compose(t), t.compose(g), g.power(2).compose(t), g.compose(t.power(2))):
            assert bound % auto_order(h, 12) == 0

    def test_apply_is_affine(self, rng):
        g = bielliptic(3, "(1+tau)/4").generator()
        for _ in range(30):
            p = ProductPoint(random_point(rng, 8), random_point(rng, 8, GAUSS))
            q = ProductPoint(random_point(rng, 8), random_point(rng, 8, GAUSS))
            assert g.apply(p + q) == g.apply(p) + g.apply(q) - g.translation

    def test_compose_matches_apply(self, rng):
        g = bielliptic(4, "1/6").generator()
        g2 = g.power(2)
        for _ in range(20):
            p = ProductPoint(random_point(rng, 6), random_point(rng, 6, EISENSTEIN))
            assert g2.apply(p) == g.apply(g.apply(p))

    @pytest.mark.parametrize("row, basis", [(2, EISENSTEIN), (3, GAUSS), (4, EISENSTEIN)])
    def test_inverse_undoes_the_action(self, rng, row, basis):
        g = bielliptic(row, "1/3").generator()
        inverse = g.inverse()
        for _ in range(20):
            p = ProductPoint(random_point(rng, 6), random_point(rng, 6, basis))
            assert inverse.apply(g.apply(p)) == p
            assert g.apply(inverse.apply(p)) == p

    def test_order_needs_compatible_level(self):
        g = bielliptic(1, "1/4").generator()
        with pytest.raises(IncompatibleLevelError):
            auto_order(g, 2)


class TestFiniteSubgroup:
    def _row_five_kernel(self) -> FiniteSubgroup:
        t = ProductPoint(TorusPoint(2, 0, 1), TorusPoint(2, 1, 0))
        return FiniteSubgroup.generated_by([t])

    def test_closure(self):
        kernel = self._row_five_kernel()
        assert kernel.order == 2
        assert kernel.is_closed()
        assert kernel.f_projection() == (origin(), TorusPoint(2, 1, 0))

    def test_quotient_rep_of_kernel_element(self):
        kernel = self._row_five_kernel()
        t = ProductPoint(TorusPoint(2, 0, 1), TorusPoint(2, 1, 0))
        assert quotient_rep(t, kernel).is_zero()

    def test_quotient_rep_is_constant_on_cosets(self, rng):
        kernel = bielliptic(6).kernel
        for _ in range(50):
            p = ProductPoint(random_point(rng, 9), random_point(rng, 9, EISENSTEIN))
            rep = quotient_rep(p, kernel)
            for t in kernel.elements:
                assert quotient_rep(p + t, kernel) == rep

    def test_trivial_subgroup(self, rng):
        trivial = FiniteSubgroup.trivial()
        p = ProductPoint(random_point(rng), random_point(rng))
        assert quotient_rep(p, trivial) == p
        assert trivial.contains(product_origin())

    @pytest.mark.parametrize("row", [5, 6, 7])
    def test_kernel_is_stable_under_cm(self, row):
        spec = bielliptic(row)
        assert kernel_invariance(spec.xi, spec.kernel)
