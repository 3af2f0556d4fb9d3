"""
Tests for exact real-quadratic arithmetic

Covers field construction for the catalog fields, norms and embeddings,
canonical representatives modulo squared units, factorization, divisor
enumeration and the totally positive box enumeration used by q-expansions.
"""

import math
import random
from collections import Counter
from fractions import Fraction

import pytest

from exceptions import CatalogError, PositivityError, UnitSignError
from services.field_arith import (
    PrimeKind,
    canonical_ideal_generator,
    canonical_rep_mod_squared_units,
    divisors_up_to_units,
    enumerate_box,
    factor,
    ideal_gcd,
    ideal_lcm,
    ideals_up_to_norm,
    in_box,
    is_nonsplit,
    is_squarefree,
    lattice_points,
    level_power,
    make_field,
    primes_over,
    primes_up_to_norm,
    squarefree_part,
    totally_positive_associate,
    valuation,
)


class TestFieldArith:
    """Shared elements of Z[√2]"""

    @pytest.fixture
    def sqrt2(self, ctx2):
        return ctx2.sqrt_d

    @pytest.fixture
    def el(self, ctx2):
        return ctx2.element


class TestFieldConstruction(TestFieldArith):
    """make_field over the vetted catalog"""

    def test_sqrt2_context(self, ctx2, el):
        """Q(√2) has ε = 1+√2, D = 8 and different 4+2√2"""
        assert ctx2.fundamental_unit == el(1, 1)
        assert ctx2.discriminant == 8
        assert ctx2.different_gen == el(4, 2)
        assert ctx2.fundamental_unit.norm() == -1

    def test_sqrt5_context(self):
        """Q(√5) has ε = (1+√5)/2 and D = 5"""
        ctx = make_field(5)
        assert ctx.fundamental_unit == ctx.omega
        assert ctx.discriminant == 5
        assert ctx.fundamental_unit.embeddings()[0] == pytest.approx((1 + math.sqrt(5)) / 2)

    def test_sqrt13_context(self):
        """Q(√13) has a unit of norm −1 and different of norm 13"""
        ctx = make_field(13)
        assert ctx.fundamental_unit.norm() == -1
        assert ctx.different_gen.norm() == 13
        assert ctx.different_gen.is_totally_positive()

    def test_norm_plus_one_unit_is_refused(self):
        """Q(√3) has ε = 2+√3 of norm +1"""
        with pytest.raises(UnitSignError):
            make_field(3)

    def test_fields_outside_catalog(self):
        """Q(√17) has a norm −1 unit but is not vetted; 4 is not squarefree"""
        with pytest.raises(CatalogError) as info:
            make_field(17)
        assert not isinstance(info.value, UnitSignError)
        with pytest.raises(CatalogError):
            make_field(4)

    def test_two_prime(self, ctx2, q, el):
        """The prime above 2 in Z[√2] is ramified with generator 2+√2"""
        assert q == el(2, 1)
        (ideal,) = primes_over(ctx2, 2)
        assert ideal.kind == PrimeKind.RAMIFIED
        assert ideal.norm == 2


class TestElementArithmetic(TestFieldArith):
    """Norms, traces, embeddings and exact division"""

    def test_norm_and_trace(self, el):
        """N(1+√2) = −1 and tr(3+4√2) = 6"""
        assert el(1, 1).norm() == -1
        assert el(3, 4).trace() == 6

    def test_embeddings(self, el):
        """2+√2 embeds as (3.4142…, 0.5858…)"""
        e1, e2 = el(2, 1).embeddings()
        assert e1 == pytest.approx(3.41421356, abs=1e-8)
        assert e2 == pytest.approx(0.58578644, abs=1e-8)

    def test_high_precision_embeddings(self, el):
        """mpmath embeddings agree with floats"""
        e1, e2 = el(1, 1).embeddings(precision=40)
        assert float(e1) == pytest.approx(1 + math.sqrt(2))
        assert float(e2) == pytest.approx(1 - math.sqrt(2))

    def test_total_positivity_is_exact(self, el):
        """Signs are decided without floating point"""
        assert el(3, 2).is_totally_positive()
        assert not el(1, 1).is_totally_positive()
        assert el(1, 1).embedding_sign(1) == -1
        assert el(2, -1).is_totally_positive()

    def test_unit_inverse(self, ctx2, el):
        eps = ctx2.fundamental_unit
        assert eps * eps.unit_inverse() == ctx2.one
        assert eps.unit_inverse() == el(-1, 1)

    def test_exact_division(self, el):
        """6 / (2+√2) = 6−3√2 and 3 does not divide 2+√2"""
        assert el(6).exact_div(el(2, 1)) == el(6, -3)
        assert el(2, 1).exact_div(el(3)) is None
        assert el(2, 1).divides(el(4, 2))

    def test_field_element_inverse(self, ctx2):
        x = ctx2.field_element(Fraction(1, 2), 3)
        assert x * x.inverse() == ctx2.one.to_field()
        assert not x.is_integral()


class TestCanonicalForms(TestFieldArith):
    """Totally positive associates and representatives of R⁺/U²"""

    def test_totally_positive_associate(self, el, sqrt2):
        """√2 → 2+√2, 5 → 5, −1 → 1"""
        assert totally_positive_associate(sqrt2) == el(2, 1)
        assert totally_positive_associate(el(5)) == el(5)
        assert totally_positive_associate(el(-1)) == el(1)

    def test_associate_of_zero(self, ctx2):
        with pytest.raises(PositivityError):
            totally_positive_associate(ctx2.zero)

    def test_canonical_rep_mod_squared_units(self, el):
        """ε² = 3+2√2 reduces to 1, and 2 is already canonical"""
        assert canonical_rep_mod_squared_units(el(3, 2)) == el(1)
        assert canonical_rep_mod_squared_units(el(2)) == el(2)

    def test_canonical_rep_tie_break(self, el):
        """2−√2 and 2+√2 share a class and trace; 2+√2 is chosen"""
        assert canonical_rep_mod_squared_units(el(2, -1)) == el(2, 1)
        assert canonical_rep_mod_squared_units(el(10, 7)) == el(2, 1)

    def test_canonical_rep_requires_positivity(self, el):
        with pytest.raises(PositivityError):
            canonical_rep_mod_squared_units(el(1, 1))

    def test_canonical_rep_is_idempotent(self, el):
        for x in (el(7, 3), el(41, 24), el(11, 4)):
            rep = canonical_rep_mod_squared_units(x)
            assert canonical_rep_mod_squared_units(rep) == rep
            assert (x.to_field() / rep).is_integral()
            assert (rep.to_field() / x).is_integral()

    def test_canonical_ideal_generator(self, el, sqrt2):
        """Associates of a generator map to one canonical generator"""
        assert canonical_ideal_generator(sqrt2) == el(2, 1)
        assert canonical_ideal_generator(el(-3, -4)) == canonical_ideal_generator(el(11, 7))


class TestFactorization(TestFieldArith):
    """Prime factorization into totally positive primes"""

    def test_factor_six(self, el, q):
        """6 = (√2−1)²·(2+√2)²·3"""
        fac = factor(el(6))
        assert fac.unit_part == el(3, -2)
        assert dict(fac.factors) == {q: 2, el(3): 1}
        assert fac.expand() == el(6)

    def test_factor_split_prime(self, el):
        """7 splits into two primes of norm 7"""
        fac = factor(el(7))
        assert len(fac.factors) == 2
        assert all(p.norm() == 7 and e == 1 for p, e in fac.factors)
        assert fac.expand() == el(7)

    def test_primes_over_kinds(self, ctx2):
        """3 and 5 are inert, 7 splits"""
        assert primes_over(ctx2, 3)[0].kind == PrimeKind.INERT
        assert primes_over(ctx2, 5)[0].kind == PrimeKind.INERT
        assert [p.kind for p in primes_over(ctx2, 7)] == [PrimeKind.SPLIT, PrimeKind.SPLIT]

    def test_squarefree_part(self, el, q):
        """4+2√2 → 2+√2 and 9 → 1"""
        assert squarefree_part(el(4, 2)) == q
        assert squarefree_part(el(9)) == el(1)
        assert is_squarefree(el(3))
        assert not is_squarefree(el(9))

    def test_divisors_up_to_units(self, el, q):
        """Divisors of 2 are 1, 2+√2, 2; divisors of 3 are 1, 3"""
        assert divisors_up_to_units(el(2)) == [el(1), q, el(2)]
        assert divisors_up_to_units(el(3)) == [el(1), el(3)]

    def test_ideal_gcd_and_lcm(self, el, q):
        assert ideal_gcd(el(6), el(4)) == el(2)
        assert ideal_lcm(el(6), q) == el(6)

    def test_valuation(self, el, q):
        assert valuation(el(8), q) == 6
        assert valuation(el(3), q) == 0

    def test_is_nonsplit(self, ctx2, el):
        """qⁿ and 3 are non-split, 7 is split, 1 is vacuously non-split"""
        assert is_nonsplit(level_power(ctx2, 5))
        assert is_nonsplit(el(12))
        assert not is_nonsplit(el(7))
        assert is_nonsplit(el(1))

    def test_level_power(self, ctx2, el):
        """q⁴ generates (4)"""
        assert level_power(ctx2, 4) == el(4)
        assert level_power(ctx2, 0) == el(1)

    def test_factor_is_additive(self, ctx2):
        """factor(xy) = factor(x) + factor(y) as exponent vectors, with the unit parts multiplying"""
        rng = random.Random(11)
        for _ in range(200):
            x = ctx2.element(rng.randint(-30, 30), rng.randint(-30, 30))
            y = ctx2.element(rng.randint(-30, 30), rng.randint(-30, 30))
            if x.is_zero() or y.is_zero():
                continue
            fx, fy, fxy = factor(x), factor(y), factor(x * y)
            assert Counter(dict(fxy.factors)) == Counter(dict(fx.factors)) + Counter(dict(fy.factors))
            assert fxy.unit_part == fx.unit_part * fy.unit_part
            assert fxy.expand() == x * y


def embedding_at_most(a: int, b: int, X: Fraction) -> bool:
    """a + b√2 ≤ X, decided on integers and squares"""
    r = X - a
    if b > 0:
        return r >= 0 and 2 * b * b <= r * r
    return r >= 0 or 2 * b * b >= r * r


def brute_force_box(ctx, X1: Fraction, X2: Fraction):
    """Totally positive a + b√2 with both embeddings in the box"""
    found = set()
    for a in range(0, 51):
        for b in range(-40, 41):
            if (a, b) == (0, 0):
                continue
            # a ± b√2 > 0 on both sides
            if embedding_at_most(a, b, Fraction(0)) or embedding_at_most(a, -b, Fraction(0)):
                continue
            if embedding_at_most(a, b, X1) and embedding_at_most(a, -b, X2):
                found.add(ctx.element(a, b))
    return found


class TestEnumeration(TestFieldArith):
    """Box enumeration, ideals and primes by norm, lattice points"""

    def test_enumerate_small_box(self, el):
        """Box (3, 3) holds 1, 2, 3 only"""
        assert set(enumerate_box(el(1).ctx, 3, 3)) == {el(1), el(2), el(3)}

    def test_enumerate_box_with_conjugates(self, ctx2, el):
        """Box (3.5, 3.5) also holds 2±√2, ordered by trace"""
        found = enumerate_box(ctx2, Fraction(7, 2), Fraction(7, 2))
        assert found == [el(1), el(2, -1), el(2), el(2, 1), el(3)]

    def test_in_box_is_exact(self, el):
        """2+√2 has first embedding 3.414…"""
        assert in_box(el(2, 1), (Fraction(35, 10), Fraction(1)))
        assert not in_box(el(2, 1), (Fraction(34, 10), Fraction(1)))

    def test_enumerate_box_include_zero(self, ctx2):
        found = enumerate_box(ctx2, 3, 3, include_zero=True)
        assert found[0].is_zero()

    def test_enumerate_box_rejects_empty(self, ctx2):
        with pytest.raises(ValueError):
            enumerate_box(ctx2, 0, 3)

    def test_ideals_up_to_norm(self, ctx2, el, q):
        """Ideals of norm ≤ 9: one each of norms 1, 2, 4, 8, 9, two of norm 7"""
        ideals = ideals_up_to_norm(ctx2, 9)
        norms = [x.norm() for x in ideals]
        assert norms == [1, 2, 4, 7, 7, 8, 9]
        assert ideals[:3] == [el(1), q, el(2)]

    def test_primes_up_to_norm(self, ctx2):
        primes = primes_up_to_norm(ctx2, 25)
        assert [p.norm() for p in primes] == [2, 7, 7, 9, 17, 17, 23, 23, 25]

    def test_lattice_points_count(self, ctx2):
        """Points with |x⁽ʲ⁾| ≤ 1.5 include 0, ±1 and ±√2 but not 1+√2"""
        points = set(lattice_points(ctx2, (1.5, 1.5)))
        assert ctx2.zero in points
        assert ctx2.one in points and -ctx2.one in points
        assert all(abs(e) <= 1.5 + 1e-9 for x in points for e in x.embeddings())
        assert ctx2.sqrt_d in points
        assert ctx2.element(1, 1) not in points

    @pytest.mark.parametrize("X1, X2", [
        (Fraction(50), Fraction(50)),
        (Fraction(50), Fraction(7, 2)),
        (Fraction(13, 3), Fraction(40)),
        (Fraction(1), Fraction(1)),
        (Fraction(99, 7), Fraction(22, 3)),
    ])
    def test_enumerate_box_matches_brute_force(self, ctx2, X1, X2):
        found = enumerate_box(ctx2, X1, X2)
        assert len(found) == len(set(found))
        assert set(found) == brute_force_box(ctx2, X1, X2)
