"""
Residue rings R/m, unit-group structure, and Dirichlet characters trivial on units

Residues are handled as integer indices into a Hermite-normal-form box of
the lattice mR, which keeps the hot loops (powering, table building,
discrete logs) on plain tuples and dict lookups.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Dict, Iterator, List, Optional, Tuple

from sympy import factorint
from sympy.core.numbers import igcdex

from exceptions import EvenPrimeError, NotSquarefreeError, PositivityError
from services.cache_service import get_cache_service
from services.cyclotomic import CyclotomicNumber
from services.field_arith import (
    FieldContext,
    PrimeIdeal,
    RingElement,
    canonical_ideal_generator,
    canonical_rep_mod_squared_units,
    divisors_up_to_units,
    factor,
    ideal_lcm,
    is_squarefree,
    prime_ideal_of,
    primes_over,
    squarefree_part,
    valuation,
)

logger = logging.getLogger(__name__)


class ResidueRing:
    """R/m with residues indexed by a + h11·b in HNF coordinates"""

    def __init__(self, modulus: RingElement):
        if modulus.is_zero():
            raise ValueError("modulus must be nonzero")
        self.ctx: FieldContext = modulus.ctx
        self.modulus = modulus
        self.size = abs(modulus.norm())

        v1 = modulus.coords()
        v2 = (modulus * self.ctx.omega).coords()
        x, y, g = igcdex(v1[1], v2[1])
        row_b = (x * v1[0] + y * v2[0], g)
        row_a0 = (v1[1] // g) * v2[0] - (v2[1] // g) * v1[0]
        self.h11 = abs(row_a0)
        self.h22 = abs(g)
        if row_b[1] < 0:
            row_b = (-row_b[0], -row_b[1])
        self.h21 = row_b[0] % self.h11
        assert self.h11 * self.h22 == self.size, "HNF does not match the norm"

        self._s = self.ctx.omega_trace
        self._k = self.ctx.omega_const
        self._primes = [(p.coords(), p.norm()) for p in factor(modulus).primes()]
        self.one = self.reduce(1, 0)
        self.minus_one = self.reduce(-1, 0)

    def reduce(self, a: int, b: int) -> int:
        k = b // self.h22
        a -= k * self.h21
        b -= k * self.h22
        return a % self.h11 + self.h11 * b

    def index(self, x) -> int:
        if isinstance(x, int):
            return self.reduce(x, 0)
        return self.reduce(x.a, x.b)

    def coords(self, index: int) -> Tuple[int, int]:
        return index % self.h11, index // self.h11

    def element(self, index: int) -> RingElement:
        return self.ctx.element(*self.coords(index))

    def mul(self, i: int, j: int) -> int:
        a, b = i % self.h11, i // self.h11
        c, e = j % self.h11, j // self.h11
        return self.reduce(a * c + self._k * b * e, a * e + b * c + self._s * b * e)

    def pow(self, i: int, exponent: int) -> int:
        result, base = self.one, i
        while exponent:
            if exponent & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            exponent >>= 1
        return result

    def is_unit(self, i: int) -> bool:
        a, b = self.coords(i)
        s, k = self._s, self._k
        for (pa, pb), n in self._primes:
            # x·conj(p) divisible by N(p) means p | x
            ca, cb = pa + s * pb, -pb
            na, nb = a * ca + k * b * cb, a * cb + b * ca + s * b * cb
            if na % n == 0 and nb % n == 0:
                return False
        return True

    def units(self) -> List[int]:
        return [i for i in range(self.size) if self.is_unit(i)]


@lru_cache(maxsize=256)
def residue_ring(modulus: RingElement) -> ResidueRing:
    return ResidueRing(modulus)


class UnitGroupStructure:
    """(R/m)ˣ as a direct sum of cyclic groups with a discrete-log table"""

    def __init__(self, ring: ResidueRing, generators: Tuple[int, ...], orders: Tuple[int, ...],
                 log_table: Dict[int, Tuple[int, ...]]):
        self.ring = ring
        self.modulus = ring.modulus
        self.ctx = ring.ctx
        self.generators = generators
        self.orders = orders
        self._log_table = log_table
        self.order = math.prod(orders)
        eps = self.ctx.fundamental_unit
        self.unit_images = (self.log(self.ctx.element(-1)), self.log(eps))

    def log(self, x) -> Optional[Tuple[int, ...]]:
        """Exponent vector of x on the generators, None if x is not a unit mod m"""
        return self._log_table.get(self.ring.index(x))

    def generator_elements(self) -> List[RingElement]:
        return [self.ring.element(g) for g in self.generators]

    def element_order(self, x) -> int:
        vector = self.log(x)
        if vector is None:
            raise ValueError(f"{x} is not a unit modulo {self.modulus}")
        result = 1
        for e, n in zip(vector, self.orders):
            k = n // math.gcd(e, n)
            result = result * k // math.gcd(result, k)
        return result

    def cyclic_orders(self) -> List[int]:
        return sorted(self.orders, reverse=True)

    def unit_image_subgroup(self) -> set:
        """Exponent vectors of the subgroup generated by images of −1 and ε"""
        seen = {tuple(0 for _ in self.orders)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for vec in frontier:
                for gen in self.unit_images:
                    new = tuple((a + b) % n for a, b, n in zip(vec, gen, self.orders))
                    if new not in seen:
                        seen.add(new)
                        nxt.append(new)
            frontier = nxt
        return seen

    def is_generated_by_units(self) -> bool:
        return len(self.unit_image_subgroup()) == self.order


def _build_table(ring: ResidueRing, basis: List[Tuple[int, int]]) -> Dict[int, Tuple[int, ...]]:
    table = {ring.one: ()}
    for g, n in basis:
        extended = {}
        power = ring.one
        for j in range(n):
            for h, vec in table.items():
                extended[ring.mul(h, power)] = vec + (j,)
            power = ring.mul(power, g)
        if len(extended) != len(table) * n:
            raise ArithmeticError("generators are not independent")
        table = extended
    return table


def _sylow_basis(ring: ResidueRing, sylow: List[int], p: int, size: int) -> List[Tuple[int, int]]:
    """Greedy maximal-order peeling inside an abelian p-group"""
    pth_power: Dict[int, int] = {}

    def power_p(y: int) -> int:
        if y not in pth_power:
            pth_power[y] = ring.pow(y, p)
        return pth_power[y]

    H: Dict[int, Tuple[int, ...]] = {ring.one: ()}
    basis: List[Tuple[int, int]] = []
    while len(H) < size:
        depth: Dict[int, int] = {}

        def order_exponent(y: int) -> int:
            chain = []
            while y not in H and y not in depth:
                chain.append(y)
                y = power_p(y)
            base = 0 if y in H else depth[y]
            for offset, z in enumerate(reversed(chain), start=1):
                depth[z] = base + offset
            return depth.get(chain[0], base) if chain else base

        best, best_e = None, 0
        for y in sylow:
            e = order_exponent(y)
            if e > best_e:
                best, best_e = y, e
        order = p ** best_e

        # make the new generator independent of the previous ones
        s = H[ring.pow(best, order)]
        adjusted = best
        for (g, n), si in zip(basis, s):
            if si % order:
                raise ArithmeticError("greedy basis lost purity")
            adjusted = ring.mul(adjusted, ring.pow(g, (-(si // order)) % n))
        basis.append((adjusted, order))

        extended = {}
        power = ring.one
        for j in range(order):
            for h, vec in H.items():
                extended[ring.mul(h, power)] = vec + (j,)
            power = ring.mul(power, adjusted)
        if len(extended) != len(H) * order:
            raise ArithmeticError("greedy basis produced a dependent generator")
        H = extended
    return basis


def _decompose(ring: ResidueRing) -> List[Tuple[int, int]]:
    units = ring.units()
    M = len(units)
    basis: List[Tuple[int, int]] = []
    for p, a in sorted(factorint(M).items()):
        cofactor = M // p ** a
        if cofactor == 1:
            sylow = units
        else:
            sylow = sorted({ring.pow(u, cofactor) for u in units})
        basis.extend(_sylow_basis(ring, sylow, p, p ** a))
    return basis


def unit_count(modulus: RingElement) -> int:
    """|(R/m)ˣ| = ∏ N(p)^(e−1)·(N(p) − 1)"""
    count = 1
    for prime, e in factor(modulus).factors:
        n = abs(prime.norm())
        count *= n ** (e - 1) * (n - 1)
    return count


@lru_cache(maxsize=128)
def unit_group(modulus: RingElement) -> UnitGroupStructure:
    """Decompose (R/m)ˣ into independent cyclic factors"""
    modulus = canonical_ideal_generator(modulus)
    ring = residue_ring(modulus)
    cache = get_cache_service()
    key = cache.generate_cache_key("unit-group", modulus.ctx.d, list(modulus.coords()))

    cached = cache.get(key)
    basis = None
    if cached is not None:
        basis = [(ring.reduce(*coords), n) for coords, n in zip(cached["generators"], cached["orders"])]
    if basis is None:
        basis = _decompose(ring)
        cache.set(key, {
            "generators": [list(ring.coords(g)) for g, _ in basis],
            "orders": [n for _, n in basis],
        }, namespace="unit-group")

    try:
        table = _build_table(ring, basis)
    except ArithmeticError:
        logger.warning(f"Cached unit-group basis for {modulus} is inconsistent; recomputing")
        basis = _decompose(ring)
        table = _build_table(ring, basis)
    if len(table) != unit_count(modulus):
        raise ArithmeticError(f"unit group of {modulus} has the wrong order")

    logger.info(f"Unit group mod {modulus}: order {len(table)}, cyclic orders {[n for _, n in basis]}")
    return UnitGroupStructure(ring, tuple(g for g, _ in basis), tuple(n for _, n in basis), table)


# ---------------------------------------------------------------------------
# Characters


@dataclass(frozen=True)
class DirichletCharacter:
    """Character of (R/m)ˣ given by exponents e with χ(gᵢ) = exp(2πi·eᵢ/nᵢ)"""

    modulus: RingElement
    exponents: Tuple[int, ...]
    group: UnitGroupStructure = field(compare=False, repr=False)

    @classmethod
    def from_exponents(cls, group: UnitGroupStructure, exponents) -> DirichletCharacter:
        exponents = list(exponents)
        if len(exponents) != len(group.orders):
            raise ValueError("exponent vector length does not match the unit group")
        return cls(group.modulus, tuple(int(e) % n for e, n in zip(exponents, group.orders)), group)

    @classmethod
    def trivial(cls, ctx: FieldContext) -> DirichletCharacter:
        group = unit_group(ctx.one)
        return cls(group.modulus, (), group)

    def phase(self, x) -> Optional[Fraction]:
        """χ(x) = exp(2πi·phase), None when x is not coprime to m"""
        vector = self.group.log(x)
        if vector is None:
            return None
        return sum((Fraction(e * l, n) for e, l, n in zip(self.exponents, vector, self.group.orders)),
                   Fraction(0)) % 1

    def __call__(self, x) -> CyclotomicNumber:
        phase = self.phase(x)
        if phase is None:
            return CyclotomicNumber.zero()
        return CyclotomicNumber.root_of_unity(phase)

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def order(self) -> int:
        result = 1
        for e, n in zip(self.exponents, self.group.orders):
            k = n // math.gcd(e, n)
            result = result * k // math.gcd(result, k)
        return result

    def is_trivial_on_units(self) -> bool:
        return all(_kills(self.exponents, image, self.group.orders) for image in self.group.unit_images)

    @cached_property
    def conductor(self) -> RingElement:
        return conductor(self)

    def primitive(self) -> DirichletCharacter:
        return restrict(self, self.conductor)

    def __str__(self) -> str:
        return f"chi(mod {self.modulus}; {list(self.exponents)})"


def _kills(exponents, vector, orders) -> bool:
    return sum(Fraction(e * l, n) for e, l, n in zip(exponents, vector, orders)).denominator == 1


def _residues(modulus: RingElement) -> Iterator[RingElement]:
    ring = residue_ring(modulus)
    for i in range(ring.size):
        yield ring.element(i)


def _factors_through(chi: DirichletCharacter, divisor: RingElement) -> bool:
    """χ is trivial on the kernel of (R/m)ˣ → (R/divisor)ˣ"""
    quotient = chi.modulus.exact_div(divisor)
    if quotient is None:
        raise ValueError(f"{divisor} does not divide {chi.modulus}")
    for y in _residues(canonical_ideal_generator(quotient)):
        phase = chi.phase(divisor * y + 1)
        if phase is not None and phase != 0:
            return False
    return True


def conductor(chi: DirichletCharacter) -> RingElement:
    """Smallest divisor of the modulus through which χ factors"""
    if chi.is_trivial():
        return chi.modulus.ctx.one
    for divisor in divisors_up_to_units(chi.modulus):
        if _factors_through(chi, divisor):
            return divisor
    return chi.modulus


def _lift_unit(g: RingElement, small: RingElement, big: RingElement) -> RingElement:
    """A representative of g mod small that is a unit mod big"""
    ring = residue_ring(canonical_ideal_generator(big))
    quotient = canonical_ideal_generator(big.exact_div(small))
    for y in _residues(quotient):
        candidate = g + small * y
        if ring.is_unit(ring.index(candidate)):
            return candidate
    raise ArithmeticError(f"no lift of {g} mod {small} is a unit mod {big}")


def induce(chi: DirichletCharacter, modulus: RingElement) -> DirichletCharacter:
    """χ viewed modulo a multiple of its modulus"""
    modulus = canonical_ideal_generator(modulus)
    if modulus == chi.modulus:
        return chi
    if not chi.modulus.divides(modulus):
        raise ValueError(f"{chi.modulus} does not divide {modulus}")
    group = unit_group(modulus)
    exponents = []
    for g, n in zip(group.generator_elements(), group.orders):
        exponents.append(int(chi.phase(g) * n))
    return DirichletCharacter.from_exponents(group, exponents)


def restrict(chi: DirichletCharacter, divisor: RingElement) -> DirichletCharacter:
    """χ as a character modulo a divisor through which it factors"""
    divisor = canonical_ideal_generator(divisor)
    if divisor == chi.modulus:
        return chi
    group = unit_group(divisor)
    exponents = []
    for g, n in zip(group.generator_elements(), group.orders):
        lifted = _lift_unit(g, divisor, chi.modulus)
        exponents.append(int(chi.phase(lifted) * n))
    return DirichletCharacter.from_exponents(group, exponents)


def characters_trivial_on_units(modulus: RingElement,
                                order_divides: Optional[int] = None) -> List[DirichletCharacter]:
    """All characters of (R/m)ˣ killing the unit images, optionally of order dividing a bound"""
    group = unit_group(modulus)
    ranges = []
    for n in group.orders:
        step = n // math.gcd(n, order_divides) if order_divides else 1
        ranges.append(range(0, n, step))
    characters = []
    for exponents in product(*ranges):
        if all(_kills(exponents, image, group.orders) for image in group.unit_images):
            characters.append(DirichletCharacter(group.modulus, tuple(exponents), group))
    logger.debug(f"{len(characters)} characters trivial on units mod {group.modulus}")
    return characters


def char_eval(chi: DirichletCharacter, x) -> CyclotomicNumber:
    """χ(x mod m), zero off the unit group"""
    return chi(x)


def char_mul(chi1: DirichletCharacter, chi2: DirichletCharacter) -> DirichletCharacter:
    modulus = ideal_lcm(chi1.conductor, chi2.conductor)
    a = induce(chi1.primitive(), modulus)
    b = induce(chi2.primitive(), modulus)
    return DirichletCharacter.from_exponents(a.group, [x + y for x, y in zip(a.exponents, b.exponents)])


def char_conjugate(chi: DirichletCharacter) -> DirichletCharacter:
    return DirichletCharacter.from_exponents(chi.group, [-e for e in chi.exponents])


def char_equal(chi1: DirichletCharacter, chi2: DirichletCharacter) -> bool:
    """Equality of the underlying primitive characters, compared on all generators mod the lcm"""
    modulus = ideal_lcm(chi1.conductor, chi2.conductor)
    return induce(chi1.primitive(), modulus).exponents == induce(chi2.primitive(), modulus).exponents


def ideal_char_value(psi: DirichletCharacter, x: RingElement) -> CyclotomicNumber:
    """ψ*((x)) = conj ψ(s) for the totally positive generator s of (x)"""
    primitive = psi.primitive()
    s = canonical_ideal_generator(x)
    return primitive(s).conj()


# ---------------------------------------------------------------------------
# Quadratic symbols and ε_t


def quadratic_symbol(xi: RingElement, prime: RingElement) -> int:
    """Euler criterion in the residue field of an odd prime"""
    ideal = prime_ideal_of(prime)
    if ideal.is_even:
        raise EvenPrimeError(f"{prime} lies over 2")
    ring = residue_ring(ideal.generator)
    x = ring.index(xi)
    if x == ring.reduce(0, 0):
        return 0
    value = ring.pow(x, (ideal.norm - 1) // 2)
    if value == ring.one:
        return 1
    if value == ring.minus_one:
        return -1
    raise ArithmeticError(f"Euler criterion failed for {xi} mod {prime}")


@lru_cache(maxsize=64)
def _unit_squares(modulus: RingElement) -> frozenset:
    ring = residue_ring(modulus)
    return frozenset(ring.mul(u, u) for u in ring.units())


def splitting_symbol(t: RingElement, ideal: PrimeIdeal) -> int:
    """+1 split, −1 inert, 0 ramified for the prime in F(√t)/F"""
    if not ideal.is_even:
        return quadratic_symbol(t, ideal.generator)
    pi = ideal.generator
    v = valuation(t, pi)
    if v % 2:
        return 0
    unit_part = t.exact_div(pi ** v)
    e = valuation(t.ctx.element(2), pi)
    fine = canonical_ideal_generator(pi ** (2 * e + 1))
    coarse = canonical_ideal_generator(pi ** (2 * e))
    if residue_ring(fine).index(unit_part) in _unit_squares(fine):
        return 1
    if residue_ring(coarse).index(unit_part) in _unit_squares(coarse):
        return -1
    return 0


@lru_cache(maxsize=128)
def epsilon_t(t: RingElement) -> DirichletCharacter:
    """The quadratic character of F(√t)/F, reduced to its conductor"""
    if not t.is_totally_positive():
        raise PositivityError(f"{t} is not totally positive")
    if not is_squarefree(t):
        raise NotSquarefreeError(f"{t} is not squarefree")
    ctx = t.ctx
    t = canonical_rep_mod_squared_units(t)
    if t == ctx.one:
        return DirichletCharacter.trivial(ctx)

    group = unit_group(t * 4)
    exponents = []
    for g, n in zip(group.generator_elements(), group.orders):
        value = 1
        for prime, e in factor(g).factors:
            value *= quadratic_symbol(t, prime) ** e
        if value == -1 and n % 2:
            raise ArithmeticError(f"odd-order generator {g} maps to -1")
        exponents.append(0 if value == 1 else n // 2)
    chi = DirichletCharacter.from_exponents(group, exponents).primitive()

    for ideal in primes_over(ctx, 2):
        if not ideal.generator.divides(chi.modulus):
            if chi(ideal.generator) != splitting_symbol(t, ideal):
                raise ArithmeticError(f"ε_{t} disagrees with the local symbol at {ideal.generator}")
    logger.debug(f"epsilon_{t}: conductor {chi.modulus}")
    return chi


def epsilon_of(m: RingElement) -> DirichletCharacter:
    """ε_m for any totally positive m, through its squarefree part"""
    return epsilon_t(squarefree_part(m))


def epsilon_two_prime(ctx: FieldContext) -> DirichletCharacter:
    """ε_q for the totally positive generator q of the prime above 2"""
    return epsilon_t(ctx.two_prime())
