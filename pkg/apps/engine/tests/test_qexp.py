"""
Tests for truncated Fourier expansions, theta series and the operators
T(p²), U, V, K and H
"""

import math
from fractions import Fraction

import pytest

from exceptions import BoxTooSmallError, VerificationError
from services.cyclotomic import CyclotomicNumber
from services.field_arith import canonical_rep_mod_squared_units, lattice_points, level_power, primes_up_to_norm
from services.qexp import (
    FourierExpansion,
    coeff_at_ideal,
    eigen_power_check,
    hecke_eigenvalue,
    is_proportional,
    make_box,
    newform_power_law_check,
    op_H,
    op_K,
    op_T_p2,
    op_U,
    op_V,
    prime_power_coefficients,
    theta_chi_t,
    theta_level,
)
from services.residue_chars import char_equal


class TestQExp:
    """θ_{χ,t} over Q(√2)"""

    @pytest.fixture
    def theta(self, ctx2, trivial):
        return theta_chi_t(trivial, ctx2.one, (30, 30))

    @pytest.fixture
    def theta_phi(self, ctx2, phi):
        return theta_chi_t(phi, ctx2.one, (80, 10))


class TestThetaSeries(TestQExp):
    """Coefficients and metadata of θ_{χ,t}"""

    def test_plain_theta_coefficients(self, ctx2, theta):
        """a(0)=1, a(1)=2, a(2)=2, a(3+2√2)=2, a(4)=2, a(5)=0"""
        el = ctx2.element
        assert theta[ctx2.zero] == 1
        assert theta[el(1)] == 2
        assert theta[el(2)] == 2
        assert theta[el(3, 2)] == 2
        assert theta[el(4)] == 2
        assert theta[el(5)] == 0

    def test_non_positive_index_is_zero(self, ctx2, theta):
        assert theta[ctx2.element(1, 1)] == 0

    def test_outside_box_raises(self, ctx2, theta):
        with pytest.raises(BoxTooSmallError):
            theta[ctx2.element(31)]

    def test_phi_theta_coefficients(self, ctx2, theta_phi):
        """a(1) = 2 and a((3+4√2)²) = −2; x = √2 contributes nothing"""
        assert theta_phi[ctx2.one] == 2
        assert theta_phi[ctx2.element(41, 24)] == -2
        assert theta_phi[ctx2.element(2)] == 0

    def test_metadata(self, ctx2, trivial, phi, theta, theta_phi):
        assert theta.level == ctx2.element(4)
        assert char_equal(theta.character, trivial)
        assert theta_phi.level == level_power(ctx2, 14)
        assert char_equal(theta_phi.character, phi)

    def test_theta_with_t(self, ctx2, trivial, phi, q):
        f = theta_chi_t(trivial, q, (30, 30))
        assert f.level == level_power(ctx2, 5)
        assert char_equal(f.character, phi)
        assert f[q] == 2
        assert f[ctx2.one] == 0
        assert theta_level(trivial, q) == level_power(ctx2, 5)

    def test_t_is_canonicalized(self, ctx2, trivial):
        """t and tε² give the same series"""
        a = theta_chi_t(trivial, ctx2.element(2), (20, 20))
        b = theta_chi_t(trivial, ctx2.element(6, 4), (20, 20))
        assert a.coeffs == b.coeffs

    def test_unit_invariance(self, ctx2, theta):
        """a(ξε²) = a(ξ) inside the box"""
        eps_sq = ctx2.element(3, 2)
        for xi in theta.support():
            if not xi.is_zero() and theta.covers(xi * eps_sq):
                assert theta[xi * eps_sq] == theta[xi]

    def test_restrict_and_arithmetic(self, ctx2, theta):
        small = theta.restrict(make_box(10, 10))
        assert small[ctx2.element(4)] == 2
        with pytest.raises(BoxTooSmallError):
            small.restrict(make_box(20, 20))
        assert (theta - theta).is_zero()
        assert (theta + theta)[ctx2.one] == 4
        assert theta.equal_on_shared_box(small)


class TestHeckeOperators(TestQExp):
    """T(p²) on good and bad primes"""

    def test_t9_eigenvalue(self, ctx2, trivial, theta):
        """θ | T₉ = (10/9)·θ with b(1) = 20/9"""
        image = op_T_p2(theta, 3, trivial, ctx2.element(4))
        assert image[ctx2.one] == Fraction(20, 9)
        assert is_proportional(image, theta) == Fraction(10, 9)
        assert hecke_eigenvalue(trivial, ctx2.one, ctx2.element(3)) == Fraction(10, 9)

    def test_output_box_shrinks(self, ctx2, trivial, theta):
        image = op_T_p2(theta, 3, trivial, ctx2.element(4))
        assert image.box[0] <= Fraction(30, 9)
        with pytest.raises(BoxTooSmallError):
            op_T_p2(theta, 3, trivial, ctx2.element(4), box=(10, 10))

    def test_eigenvalue_with_character(self, ctx2, phi):
        """θ_φ is a T(p²) eigenform at the split prime 3+√2"""
        p = ctx2.element(3, 1)
        c = level_power(ctx2, 14)
        f = theta_chi_t(phi, ctx2.one, (200, 30))
        expected = hecke_eigenvalue(phi, ctx2.one, p)
        assert (op_T_p2(f, p, phi, c) - f.scale(expected)).is_zero()

    def test_bad_prime_at_two(self, ctx2, phi, q):
        """T(q²) kills ½θ_φ because every x with φ(x) ≠ 0 is odd"""
        f = theta_chi_t(phi, ctx2.one, (30, 30))
        assert op_T_p2(f, q, phi, level_power(ctx2, 14)).is_zero()

    def test_eigen_power_check_at_bad_prime(self, ctx2, trivial, q):
        """θ_{1,1} at level q⁴: T(q²) has eigenvalue 1 and the chain law holds"""
        f = theta_chi_t(trivial, ctx2.one, (40, 40))
        eigenvalue = eigen_power_check(f, q, trivial, ctx2.element(4), k_max=1)
        assert eigenvalue == 1

    def test_newform_power_law(self, ctx2, trivial):
        f = theta_chi_t(trivial, ctx2.one, (100, 100)).scale(Fraction(1, 2))
        assert newform_power_law_check(f, ctx2.element(3), trivial, k_max=1) > 0
        values = prime_power_coefficients(f, ctx2.one, 3, 1)
        assert values == [1, 1]


class TestShiftOperators(TestQExp):
    """U, V, K and H"""

    def test_u3(self, ctx2, theta):
        """(θ | U₃)(3) = a(9) = 2 and (θ | U₃)(1) = a(3) = 0"""
        g = op_U(3, theta)
        assert g[ctx2.element(3)] == 2
        assert g[ctx2.one] == 0

    def test_v_then_u_is_identity(self, ctx2, theta):
        p = ctx2.element(3, 1)
        assert is_proportional(op_U(p, op_V(p, theta)), theta) == 1
        assert op_V(ctx2.one, theta) is theta

    def test_v_rescales_box_and_level(self, ctx2, theta, q):
        g = op_V(q, theta)
        assert g[q] == 2
        assert g[ctx2.one] == 0
        assert g.level == level_power(ctx2, 5)
        with pytest.raises(ValueError):
            op_V(ctx2.element(1, 1), theta)

    def test_k_removes_multiples(self, ctx2, theta):
        """K = 1 − U·V on coefficients: K(3)θ keeps only ξ prime to 3"""
        g = op_K(3, theta)
        assert g[ctx2.element(9)] == 0
        assert g[ctx2.one] == 2
        assert g[ctx2.zero] == 0
        assert g.equal_on_shared_box(theta - op_V(3, op_U(3, theta)))

    def test_h_is_involution(self, ctx2, phi):
        f = theta_chi_t(phi, ctx2.one, (30, 30)).scale(CyclotomicNumber.root_of_unity(Fraction(1, 8)))
        assert op_H(op_H(f)).coeffs == f.coeffs
        assert op_H(f)[ctx2.one] == f[ctx2.one].conj()

    def test_u_commutes_with_t(self, ctx2, trivial, phi, theta):
        """U(q)∘T(9) = T(9)∘U(q) once T carries the character φ of θ | U(q)"""
        q = ctx2.two_prime()
        c = ctx2.element(4)
        left = op_U(q, op_T_p2(theta, 3, trivial, c))
        right = op_T_p2(op_U(q, theta), 3, phi, c)
        assert left.equal_on_shared_box(right)

    def test_v_commutes_with_t(self, ctx2, trivial, phi, q, theta):
        """T(9) after V(q) carries ψε_q = φ at level 4q"""
        left = op_T_p2(op_V(q, theta), 3, phi, level_power(ctx2, 5))
        right = op_V(q, op_T_p2(theta, 3, trivial, ctx2.element(4)))
        assert left.equal_on_shared_box(right)

    def test_h_commutes_with_t(self, ctx2, phi):
        f = theta_chi_t(phi, ctx2.one, (30, 30)).scale(CyclotomicNumber.root_of_unity(Fraction(1, 8)))
        c = level_power(ctx2, 14)
        left = op_H(op_T_p2(f, 3, phi, c))
        right = op_T_p2(op_H(f), 3, phi, c)
        assert left.equal_on_shared_box(right)
        assert not left.is_zero()


class TestComparisons(TestQExp):
    """Proportionality and coefficients at ideals"""

    def test_is_proportional(self, ctx2, trivial, theta):
        assert is_proportional(theta.scale(3), theta) == 3
        other = theta_chi_t(trivial, ctx2.element(2), (30, 30))
        assert is_proportional(theta, other) is None

    def test_is_proportional_of_zero_forms(self, ctx2):
        zero = FourierExpansion(ctx2, make_box(5, 5))
        assert is_proportional(zero, zero) == 1

    def test_coeff_at_ideal(self, ctx2, theta):
        """a((3+2√2)) = a((1)) = 2 and a((5)) = 0"""
        assert coeff_at_ideal(theta, ctx2.element(3, 2)) == 2
        assert coeff_at_ideal(theta, ctx2.element(5)) == 0
        assert coeff_at_ideal(theta.scale(Fraction(1, 2)), ctx2.one) == 1

    def test_eigen_check_rejects_good_prime(self, ctx2, trivial, theta):
        with pytest.raises(ValueError):
            eigen_power_check(theta, 3, trivial, ctx2.element(4))

    def test_power_law_detects_broken_chain(self, ctx2, trivial):
        f = theta_chi_t(trivial, ctx2.one, (100, 100))
        f.coeffs[ctx2.element(9)] = f.coeffs[ctx2.element(9)].scale(3)
        with pytest.raises(VerificationError):
            newform_power_law_check(f, ctx2.element(3), trivial, k_max=1)


def is_square(ctx, y) -> bool:
    """y = x² for some x ∈ R, by scanning |x⁽ʲ⁾| ≤ √|y⁽ʲ⁾|"""
    radii = tuple(math.sqrt(abs(e)) + 1e-9 for e in y.embeddings())
    return any(x * x == y for x in lattice_points(ctx, radii))


class TestThetaInvariants(TestQExp):
    """Support, size and K over several (χ, t) and primes"""

    @pytest.fixture
    def family(self, ctx2, trivial, phi, q):
        pairs = [(trivial, ctx2.one), (trivial, q), (trivial, ctx2.element(2)),
                 (phi, ctx2.one), (phi, q), (phi, ctx2.element(2))]
        return [(canonical_rep_mod_squared_units(t), theta_chi_t(chi, t, (60, 60))) for chi, t in pairs]

    def test_support_is_t_times_squares(self, ctx2, family):
        for t, f in family:
            for xi in f.support():
                if xi.is_zero():
                    continue
                quotient = xi.exact_div(t)
                assert quotient is not None, f"{xi} not divisible by {t}"
                assert is_square(ctx2, quotient), f"{xi}/{t} is not a square"

    def test_coefficients_bounded_by_two(self, family):
        for _, f in family:
            assert not f.is_zero()
            assert f.max_abs() <= 2 + 1e-12

    def test_k_is_one_minus_v_after_u(self, ctx2, theta, theta_phi):
        primes = primes_up_to_norm(ctx2, 50)
        assert len(primes) == 15
        for p in primes:
            for f in (theta, theta_phi):
                assert op_K(p, f).equal_on_shared_box(f - op_V(p, op_U(p, f))), f"K({p})"
