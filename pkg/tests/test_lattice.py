import random

import pytest

from app.core.exceptions import (
    DegenerateLatticeError,
    EnumerationLimitError,
    LatticeInputError,
    MukaiDimensionError,
    PreconditionError,
)
from app.core.reference_data import ENRIQUES_PICARD_NUMBER
from app.services.lattice import (
    IntegralLattice,
    LatticeInvolution,
    MukaiVector,
    cross_pairing,
    determinant,
    direct_sum,
    discriminant_group,
    e8,
    eigenlattice,
    enriques_ns_model,
    hermite_rows,
    hyperbolic_plane,
    integer_kernel,
    involution_check,
    is_even,
    k3_lattice_with_involution,
    moduli_admissibility,
    mukai_pairing,
    roots_in_box,
    signature,
    twist,
)

H = hyperbolic_plane()


def unimodular_change(gram, rng: random.Random, steps: int = 12) -> IntegralLattice:
    """U^T G U for a random product of elementary column operations U"""
    n = len(gram)
    g = [list(row) for row in gram]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        # column j += c * column i, then row j += c * row i
        for r in range(n):
            g[r][j] += c * g[r][i]
        for col in range(n):
            g[j][col] += c * g[i][col]
    return IntegralLattice(g)


class TestConstructors:
    def test_hyperbolic_plane(self):
        assert H.gram == ((0, 1), (1, 0))
        assert determinant(H) == -1
        assert twist(H, 2).gram == ((0, 2), (2, 0))

    def test_e8(self):
        lattice = e8(-1)
        assert lattice.rank == 8
        assert determinant(lattice) == 1
        assert signature(lattice) == (0, 8)
        assert is_even(lattice)
        assert signature(e8(1)) == (8, 0)

    def test_direct_sum(self):
        lattice = direct_sum(e8(-1), H, twist(H, 2))
        assert lattice.rank == 12
        assert lattice.gram[9][8] == 1
        assert lattice.gram[11][10] == 2
        assert lattice.gram[0][8] == 0

    def test_bad_gram(self):
        with pytest.raises(LatticeInputError):
            IntegralLattice(((0, 1), (2, 0)))
        with pytest.raises(LatticeInputError):
            IntegralLattice(((1, 0, 0), (0, 1, 0)))
        with pytest.raises(LatticeInputError):
            IntegralLattice((("a", 0), (0, 1)))
        with pytest.raises(LatticeInputError):
            twist(H, 0)


class TestK3Involution:
    def test_involution_axioms(self):
        lattice, involution = k3_lattice_with_involution()
        assert involution_check(lattice, involution) == []
        assert lattice.rank == 22

    def test_involution_check_names_failures(self):
        assert involution_check(H, LatticeInvolution(((1, 1), (0, 1)))) == ["P^2 != Id", "P^T G P != G"]
        assert involution_check(H, LatticeInvolution(((-1, 0), (0, 1)))) == ["P^T G P != G"]

    def test_signature(self):
        lattice, _ = k3_lattice_with_involution()
        assert signature(lattice) == (3, 19)
        assert is_even(lattice)
        assert abs(determinant(lattice)) == 1

    def test_antiinvariant_lattice(self):
        lattice, involution = k3_lattice_with_involution()
        anti = eigenlattice(lattice, involution, -1)
        expected = direct_sum(e8(-2), H, twist(H, 2))
        assert anti.lattice.gram == expected.gram
        assert anti.basis[0] == tuple([1] + [0] * 7 + [-1] + [0] * 13)
        assert anti.basis[8] == tuple([0] * 16 + [1] + [0] * 5)
        assert anti.basis[10] == tuple([0] * 18 + [1, 0, -1, 0])

    def test_invariant_lattice(self):
        lattice, involution = k3_lattice_with_involution()
        anti = eigenlattice(lattice, involution, -1)
        inv = eigenlattice(lattice, involution, 1)
        assert inv.lattice.gram == direct_sum(e8(-2), twist(H, 2)).gram
        assert len(inv.basis) + len(anti.basis) == 22
        assert all(x == 0 for row in cross_pairing(lattice, inv.basis, anti.basis) for x in row)
        for v in inv.basis:
            assert involution.apply(v) == v

    def test_identity_involution(self):
        whole = eigenlattice(H, LatticeInvolution(((1, 0), (0, 1))), 1)
        assert whole.lattice.gram == H.gram
        assert eigenlattice(H, LatticeInvolution(((1, 0), (0, 1))), -1).basis == ()

    def test_eigenlattice_arguments(self):
        with pytest.raises(PreconditionError):
            eigenlattice(H, LatticeInvolution(((1, 0), (0, 1))), 2)
        with pytest.raises(PreconditionError):
            eigenlattice(H, LatticeInvolution(((1, 1), (0, 1))), 1)


class TestLinearAlgebra:
    def test_integer_kernel(self):
        kernel = integer_kernel(((2, 4, 6),))
        assert len(kernel) == 2
        for v in kernel:
            assert 2 * v[0] + 4 * v[1] + 6 * v[2] == 0

    def test_kernel_is_saturated(self):
        kernel = hermite_rows(integer_kernel(((2, -2),)))
        assert kernel == [(1, 1)]

    def test_hermite_rows(self):
        assert hermite_rows([(0, 2), (1, 1)]) == [(1, 1), (0, 2)]
        assert hermite_rows([(2, 0), (0, 1), (2, 1)]) == [(2, 0), (0, 1)]


class TestDiscriminant:
    def test_unimodular(self):
        assert discriminant_group(H) == []
        assert discriminant_group(e8(-1)) == []

    def test_e8_twisted(self):
        assert discriminant_group(e8(-2)) == [2] * 8

    def test_antiinvariant_lattice(self):
        assert discriminant_group(direct_sum(e8(-2), H, twist(H, 2))) == [2] * 10

    def test_degenerate(self):
        with pytest.raises(DegenerateLatticeError):
            discriminant_group(IntegralLattice(((0, 0), (0, 2))))

    def test_invariant_under_base_change(self, rng):
        for base in (direct_sum(e8(-1), H), e8(-2), direct_sum(H, twist(H, 3))):
            expected = discriminant_group(base)
            for _ in range(5):
                changed = unimodular_change(base.gram, rng)
                assert discriminant_group(changed) == expected
                assert determinant(changed) == determinant(base)
                assert signature(changed) == signature(base)


class TestRoots:
    def test_e8_has_240_roots(self):
        roots = roots_in_box(e8(-1), -2, 6)
        assert len(roots) == 240
        assert all(e8(-1).norm(v) == -2 for v in roots)
        assert len(set(roots)) == 240

    def test_positive_e8(self):
        assert len(roots_in_box(e8(1), 2, 6)) == 240

    def test_small_box_sees_part_of_e8(self):
        assert 0 < len(roots_in_box(e8(-1), -2, 1)) < 240

    def test_hyperbolic_plane(self):
        assert roots_in_box(H, -2, 3) == [(-1, 1), (1, -1)]

    def test_empty_box(self):
        assert roots_in_box(H, -2, 0) == []
        assert roots_in_box(e8(-1), -2, 0) == []

    def test_definite_lattice_has_no_roots_of_wrong_sign(self):
        assert roots_in_box(e8(-1), 2, 3) == []

    def test_box_cap(self):
        lattice, _ = k3_lattice_with_involution()
        with pytest.raises(EnumerationLimitError):
            roots_in_box(lattice, -2, 1)


class TestMukai:
    def test_ns_model_has_picard_rank(self):
        assert enriques_ns_model().rank == ENRIQUES_PICARD_NUMBER

    def test_hilbert_scheme_vector(self):
        ns = enriques_ns_model()
        for n in range(1, 21):
            v = MukaiVector.from_chi(1, [0] * 10, 2 - n)
            assert v.s == 1 - n
            assert mukai_pairing(v, v, ns) == 2 * n - 2
            assert moduli_admissibility(v, ns).dim == 2 * n

    def test_pure_l(self):
        ns = enriques_ns_model()
        l = [0] * 8 + [1, 1]
        v = MukaiVector(0, l, 0)
        assert mukai_pairing(v, v, ns) == ns.norm(l) == 4

    def test_pairing_is_symmetric(self, rng):
        ns = enriques_ns_model()
        for _ in range(50):
            v = MukaiVector(rng.randint(-5, 5), [rng.randint(-3, 3) for _ in range(10)], rng.randint(-5, 5))
            w = MukaiVector(rng.randint(-5, 5), [rng.randint(-3, 3) for _ in range(10)], rng.randint(-5, 5))
            assert mukai_pairing(v, w, ns) == mukai_pairing(w, v, ns)

    def test_admissible_example(self):
        ns = enriques_ns_model()
        report = moduli_admissibility(MukaiVector.from_chi(2, [0] * 8 + [1, 1], 1), ns)
        assert report.vector.s == -1
        assert report.v_squared == 8
        assert (report.dim, report.n) == (10, 5)
        assert report.admissible
        assert report.quotient_chi == 3
        assert report.notes

    def test_even_chi_rejected(self):
        ns = enriques_ns_model()
        report = moduli_admissibility(MukaiVector.from_chi(2, [0] * 8 + [1, 1], 2), ns)
        assert "chi even" in report.failures
        assert not report.admissible

    def test_imprimitive_rejected(self):
        ns = enriques_ns_model()
        report = moduli_admissibility(MukaiVector(2, [0] * 8 + [2, 2], 0), ns)
        assert "not primitive" in report.failures

    def test_admissible_vectors_have_odd_n(self, rng):
        ns = enriques_ns_model()
        admissible = 0
        for _ in range(50_000):
            l = [rng.randint(-1, 1) for _ in range(8)] + [rng.randint(-3, 3) for _ in range(2)]
            v = MukaiVector(rng.randint(-6, 6), l, rng.randint(-6, 6))
            report = moduli_admissibility(v, ns)
            if report.primitive and report.chi_odd and report.nonnegative:
                assert report.n_odd
                assert report.admissible
                admissible += 1
                if admissible == 1000:
                    break
        assert admissible == 1000

    def test_model_must_be_scaled_even(self):
        with pytest.raises(PreconditionError):
            moduli_admissibility(MukaiVector(1, [0] * 8, 0), e8(-1))

    def test_dimension_mismatch(self):
        with pytest.raises(MukaiDimensionError):
            mukai_pairing(MukaiVector(1, [0] * 3, 0), MukaiVector(1, [0] * 3, 0), enriques_ns_model())

    def test_chi_must_match(self):
        with pytest.raises(LatticeInputError):
            moduli_admissibility(MukaiVector(1, [0] * 10, 0), enriques_ns_model(), chi=3)
