"""
Tests for exact cyclotomic arithmetic and the Bareiss rank
"""

import cmath
import math
from fractions import Fraction

import pytest

from services.cyclotomic import CyclotomicNumber
from services.linear_algebra import fraction_free_rank


def zeta(n, k=1):
    return CyclotomicNumber.root_of_unity(Fraction(k, n))


class TestCyclotomicNumber:
    """Arithmetic in Q(ζ_N)"""

    def test_rationals_normalize_to_order_one(self):
        assert zeta(2).is_rational()
        assert zeta(2) == -1
        assert (zeta(4) * zeta(4)) == -1
        assert (zeta(4) * zeta(4)).order == 1

    def test_sum_of_primitive_cube_roots(self):
        assert zeta(3) + zeta(3, 2) == -1

    def test_mixed_orders(self):
        """ζ₈² = ζ₄ after lifting to the common order"""
        assert zeta(8) ** 2 == zeta(4)
        assert zeta(3) * zeta(4) == zeta(12, 7)

    def test_conjugate(self):
        assert zeta(5).conj() == zeta(5, 4)
        assert (zeta(5) * zeta(5).conj()) == 1
        assert CyclotomicNumber.rational(3).conj() == 3

    def test_inverse(self):
        x = zeta(5) + 1
        assert x * x.inverse() == 1
        assert (x / x) == 1
        with pytest.raises(ZeroDivisionError):
            CyclotomicNumber.zero().inverse()

    def test_powers(self):
        assert zeta(8) ** 8 == 1
        assert zeta(8) ** -1 == zeta(8, 7)

    def test_scale_and_coerce(self):
        half = zeta(4).scale(Fraction(1, 2))
        assert half + half == zeta(4)
        assert CyclotomicNumber.coerce(2) == 2
        with pytest.raises(TypeError):
            CyclotomicNumber.coerce(1.5)

    def test_to_complex(self):
        assert zeta(12).to_complex() == pytest.approx(cmath.exp(2j * math.pi / 12))
        assert abs(zeta(7, 3)) == pytest.approx(1.0)
        assert complex(zeta(6).to_mpc(30)) == pytest.approx(cmath.exp(1j * math.pi / 3))

    def test_dict_form(self):
        x = zeta(8).scale(Fraction(-3, 4)) + 2
        assert CyclotomicNumber.from_dict(x.to_dict()) == x
        assert x.to_dict()["order"] == 8

    def test_hash_consistent_with_equality(self):
        assert hash(zeta(8) ** 2) == hash(zeta(4))
        assert hash(CyclotomicNumber.rational(5)) == hash(Fraction(5))

    def test_hash_ignores_storage_order(self):
        """The same number stored in Q(ζ_12) and in Q(ζ_24) or Q(ζ_60)"""
        for x in (zeta(3) + zeta(4), zeta(12, 5).scale(Fraction(7, 3)) - zeta(4), zeta(3).scale(Fraction(1, 10 ** 9))):
            for order in (24, 60):
                lifted = CyclotomicNumber(order, x.lift(order), reduced=True)
                assert lifted.order == order
                assert lifted == x
                assert hash(lifted) == hash(x)
        assert len({zeta(8, 2), zeta(4), zeta(8, 6) * -1}) == 1


class TestFractionFreeRank:
    """Rank over cyclotomic fields"""

    def test_rational_rank(self):
        assert fraction_free_rank([[1, 2], [2, 4]]) == 1
        assert fraction_free_rank([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3

    def test_skips_zero_columns(self):
        assert fraction_free_rank([[0, 1, 1], [0, 2, 3]]) == 2
        assert fraction_free_rank([[0, 1], [0, 2]]) == 1

    def test_cyclotomic_dependency(self):
        """det [[ζ₃, 1], [1, ζ₃²]] = ζ₃³ − 1 = 0"""
        rows = [[zeta(3), CyclotomicNumber.one()], [CyclotomicNumber.one(), zeta(3, 2)]]
        assert fraction_free_rank(rows) == 1
        rows[1][1] = zeta(3)
        assert fraction_free_rank(rows) == 2

    def test_empty(self):
        assert fraction_free_rank([]) == 0
