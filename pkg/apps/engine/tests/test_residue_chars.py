"""
Tests for residue rings, unit groups and characters trivial on units
"""

import random

import pytest

from exceptions import EvenPrimeError, NotSquarefreeError, PositivityError
from services.field_arith import level_power, prime_ideal_of, primes_up_to_norm
from services.residue_chars import (
    DirichletCharacter,
    char_conjugate,
    char_equal,
    char_eval,
    char_mul,
    characters_trivial_on_units,
    epsilon_of,
    epsilon_t,
    ideal_char_value,
    induce,
    quadratic_symbol,
    residue_ring,
    unit_count,
    unit_group,
)


class TestResidueChars:
    """Levels qⁿ over Q(√2)"""

    @pytest.fixture
    def level(self, ctx2):
        def make(n):
            return level_power(ctx2, n)
        return make


class TestUnitGroups(TestResidueChars):
    """(R/m)ˣ decomposition"""

    def test_order_at_q5(self, level):
        assert unit_group(level(5)).order == 16

    def test_unit_count_formula(self, ctx2):
        """|(R/9)ˣ| = 9·8 and |(R/3)ˣ| = 8"""
        assert unit_count(ctx2.element(9)) == 72
        assert unit_group(ctx2.element(3)).order == 8

    def test_residue_ring_size(self, level):
        ring = residue_ring(level(6))
        assert ring.size == 64
        assert len(ring.units()) == 32

    def test_generator_orders_at_q5(self, ctx2, level):
        """1+√2 has order 4 and 3+4√2 order 2 modulo q⁵"""
        group = unit_group(level(5))
        r = ctx2.sqrt_d
        assert group.element_order(r + 1) == 4
        assert group.element_order(r * 4 + 3) == 2
        assert group.cyclic_orders() == [4, 2, 2]

    def test_small_levels_generated_by_units(self, level):
        for n in range(1, 5):
            assert unit_group(level(n)).is_generated_by_units()

    def test_q5_not_generated_by_units(self, level):
        assert not unit_group(level(5)).is_generated_by_units()

    def test_element_order_of_non_unit(self, ctx2, level):
        with pytest.raises(ValueError):
            unit_group(level(5)).element_order(ctx2.sqrt_d)

    def test_unit_group_uses_cache(self, isolated_cache, level):
        """A second lookup after clearing the lru layer is served from the file cache"""
        unit_group(level(7))
        unit_group.cache_clear()
        hits = isolated_cache.get_stats().hit_count
        assert unit_group(level(7)).order == 64
        assert isolated_cache.get_stats().hit_count == hits + 1

    @pytest.mark.slow
    def test_orders_and_invariants_up_to_q16(self, ctx2, level):
        """|(R/qⁿ)ˣ| = 2ⁿ⁻¹ with cyclic orders 2^⌊n/2⌋, 2^⌊(n−3)/2⌋, 2"""
        r = ctx2.sqrt_d
        for n in range(5, 17):
            group = unit_group(level(n))
            assert group.order == 2 ** (n - 1)
            assert len(group.ring.units()) == group.order
            assert group.element_order(r + 1) == 2 ** (n // 2)
            assert group.element_order(r * 4 + 3) == 2 ** ((n - 3) // 2)
            expected = sorted([2 ** (n // 2), 2 ** ((n - 3) // 2), 2], reverse=True)
            assert [m for m in group.cyclic_orders() if m > 1] == [m for m in expected if m > 1]


class TestCharacters(TestResidueChars):
    """Characters trivial on units and the character φ = ε_q"""

    def test_only_trivial_at_q4(self, level):
        characters = characters_trivial_on_units(level(4), order_divides=2)
        assert len(characters) == 1
        assert characters[0].is_trivial()

    def test_quadratic_characters_from_q5(self, ctx2, level, phi):
        """For n ≥ 5 the even quadratic characters are exactly 1 and φ"""
        for n in (5, 6, 8):
            characters = characters_trivial_on_units(level(n), order_divides=2)
            nontrivial = [chi for chi in characters if not chi.is_trivial()]
            assert len(characters) == 2
            assert len(nontrivial) == 1
            assert char_equal(nontrivial[0], phi)
            assert nontrivial[0](ctx2.element(3, 4)) == -1

    def test_phi_values(self, ctx2, phi):
        """φ(3+4√2) = −1, φ(3+√2) = −1 and φ vanishes at √2"""
        assert phi(ctx2.element(3, 4)) == -1
        assert phi(ctx2.element(3, 1)) == -1
        assert phi(ctx2.sqrt_d).is_zero()
        assert phi(ctx2.fundamental_unit) == 1
        assert phi(ctx2.element(-1)) == 1
        assert char_eval(phi, ctx2.element(3)) == -1

    def test_phi_conductor(self, level, phi):
        assert phi.conductor == level(5)
        assert phi.order == 2
        assert phi.is_trivial_on_units()

    def test_induced_character_keeps_conductor(self, level, phi):
        lifted = induce(phi, level(8))
        assert lifted.modulus == level(8)
        assert lifted.conductor == level(5)
        assert char_equal(lifted, phi)

    def test_products_and_conjugates(self, trivial, phi):
        assert char_mul(phi, phi).is_trivial()
        assert char_equal(char_mul(phi, trivial), phi)
        assert char_equal(char_conjugate(phi), phi)
        assert not char_equal(phi, trivial)

    def test_only_trivial_mod_three(self, ctx2):
        """ε generates (R/3)ˣ, so nothing but 1 is trivial on units"""
        characters = characters_trivial_on_units(ctx2.element(3))
        assert [chi.is_trivial() for chi in characters] == [True]

    def test_from_exponents_validates_length(self, level):
        group = unit_group(level(5))
        with pytest.raises(ValueError):
            DirichletCharacter.from_exponents(group, [1])

    def test_char_eval_is_multiplicative(self, ctx2, level, phi):
        """χ(xy) = χ(x)χ(y) for random x, y, non-units included"""
        characters = [phi]
        for modulus in (level(8), ctx2.element(15)):
            group = unit_group(modulus)
            characters.append(DirichletCharacter.from_exponents(group, [1] * len(group.orders)))
        rng = random.Random(5)
        for _ in range(1000):
            x = ctx2.element(rng.randint(-50, 50), rng.randint(-50, 50))
            y = ctx2.element(rng.randint(-50, 50), rng.randint(-50, 50))
            for chi in characters:
                assert char_eval(chi, x * y) == char_eval(chi, x) * char_eval(chi, y)

    def test_ideal_char_value(self, ctx2, phi):
        """φ*((3)) = φ*((3+4√2)) = −1, independent of the generator"""
        assert ideal_char_value(phi, ctx2.element(3)) == -1
        assert ideal_char_value(phi, ctx2.element(3, 4)) == -1
        assert ideal_char_value(phi, ctx2.element(11, 7)) == -1
        assert ideal_char_value(phi, ctx2.two_prime()).is_zero()


class TestQuadraticSymbols(TestResidueChars):
    """Euler criterion and ε_t"""

    def test_quadratic_symbol(self, ctx2):
        """(1+√2 / 3+√2) = −1 and (3+√2 / 3+√2) = 0"""
        p = ctx2.element(3, 1)
        assert quadratic_symbol(ctx2.element(1, 1), p) == -1
        assert quadratic_symbol(p, p) == 0
        assert quadratic_symbol(ctx2.element(2), p) == 1

    def test_quadratic_symbol_matches_squares(self, ctx2):
        """Euler criterion against the squares of (R/p)ˣ for every odd p with N(p) ≤ 200"""
        primes = [p for p in primes_up_to_norm(ctx2, 200) if not prime_ideal_of(p).is_even]
        assert len(primes) > 30
        for p in primes:
            ring = residue_ring(p)
            zero = ring.reduce(0, 0)
            squares = {ring.mul(u, u) for u in ring.units()}
            for i in range(ring.size):
                expected = 0 if i == zero else (1 if i in squares else -1)
                assert quadratic_symbol(ring.element(i), p) == expected, f"{ring.element(i)} mod {p}"

    def test_quadratic_symbol_rejects_even_prime(self, ctx2, q):
        with pytest.raises(EvenPrimeError):
            quadratic_symbol(ctx2.element(3), q)

    def test_epsilon_t_of_q_is_phi(self, ctx2, q, phi):
        assert char_equal(epsilon_t(q), phi)
        assert epsilon_t(q)(ctx2.element(3, 1)) == -1

    def test_epsilon_t_matches_symbol_at_odd_primes(self, ctx2):
        """ε_t*(p) = (t/p) for primes p prime to 2t"""
        t = ctx2.element(3)
        chi = epsilon_t(t)
        for p in (ctx2.element(3, 1), ctx2.element(3, -1), ctx2.element(5, 2)):
            assert ideal_char_value(chi, p) == quadratic_symbol(t, p)

    def test_epsilon_of_reduces_to_squarefree_part(self, ctx2, trivial, phi):
        assert char_equal(epsilon_of(ctx2.element(8)), trivial)
        assert char_equal(epsilon_of(ctx2.element(4, 2)), phi)
        assert epsilon_t(ctx2.one).is_trivial()

    def test_epsilon_t_hypotheses(self, ctx2):
        with pytest.raises(NotSquarefreeError):
            epsilon_t(ctx2.element(4))
        with pytest.raises(PositivityError):
            epsilon_t(ctx2.element(1, 1))
