"""
Exact arithmetic in the ring of integers of a real quadratic field

Elements are stored by integer coordinates (a, b) in the integral basis
{1, ω} where ω = √d (d ≡ 2, 3 mod 4) or ω = (1 + √d)/2 (d ≡ 1 mod 4).
Every predicate that depends on the real embeddings (positivity, box
membership) is decided with integer comparisons; floating point is only
used to center search windows.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, List, Optional, Tuple, Union

import mpmath
from sympy import factorint, primerange
from sympy.ntheory import legendre_symbol, sqrt_mod

from exceptions import CatalogError, PositivityError, UnitSignError

logger = logging.getLogger(__name__)

# Fields whose narrow class number is known to be 1
FIELD_CATALOG = (2, 5, 13)

Number = Union[int, Fraction]


class OmegaKind(str, Enum):
    SQRT = "sqrt"
    HALF = "half"


class PrimeKind(str, Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def _sqrt_d_le(k: Number, r: Number, d: int) -> bool:
    """Decide k·√d ≤ r exactly"""
    if k <= 0 and r >= 0:
        return True
    if k >= 0 and r < 0:
        return False
    if k > 0:
        return k * k * d <= r * r
    return k * k * d >= r * r


def _as_fraction(value: Union[int, float, Fraction]) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


class _Arithmetic:
    """Shared formulas for elements a + bω, with ω² = sω + k"""

    __slots__ = ()

    a: Number
    b: Number
    ctx: "FieldContext"

    def _mul_coords(self, other) -> Tuple[Number, Number]:
        s, k = self.ctx.omega_trace, self.ctx.omega_const
        a, b, c, e = self.a, self.b, other.a, other.b
        return a * c + k * b * e, a * e + b * c + s * b * e

    def norm(self) -> Number:
        s, k = self.ctx.omega_trace, self.ctx.omega_const
        return self.a * self.a + s * self.a * self.b - k * self.b * self.b

    def trace(self) -> Number:
        return 2 * self.a + self.ctx.omega_trace * self.b

    def half_coords(self) -> Tuple[Number, Number]:
        """(A, B) with x = (A + B√d)/2"""
        return 2 * self.a + self.ctx.omega_trace * self.b, self.ctx.omega_width * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_totally_positive(self) -> bool:
        A, B = self.half_coords()
        return A > 0 and A * A > self.ctx.d * B * B

    def embedding_sign(self, j: int) -> int:
        A, B = self.half_coords()
        s = 1 if j == 0 else -1
        if self.is_zero():
            return 0
        return -1 if _sqrt_d_le(s * B, -A, self.ctx.d) else 1

    def embedding_le(self, j: int, bound: Union[int, float, Fraction]) -> bool:
        """Exact test x⁽ʲ⁾ ≤ bound"""
        A, B = self.half_coords()
        s = 1 if j == 0 else -1
        return _sqrt_d_le(s * B, 2 * _as_fraction(bound) - A, self.ctx.d)

    def embeddings(self, precision: Optional[int] = None):
        """Real embeddings (first uses +√d); floats unless a precision is requested"""
        A, B = self.half_coords()
        if precision is None:
            root = self.ctx.sqrt_d_float
            A, B = float(A), float(B)
            return (A + B * root) / 2, (A - B * root) / 2
        with mpmath.workdps(precision + 10):
            root = mpmath.sqrt(self.ctx.d)
            A = mpmath.mpf(A.numerator) / A.denominator if isinstance(A, Fraction) else mpmath.mpf(A)
            B = mpmath.mpf(B.numerator) / B.denominator if isinstance(B, Fraction) else mpmath.mpf(B)
            return (A + B * root) / 2, (A - B * root) / 2


@dataclass(frozen=True)
class RingElement(_Arithmetic):
    """Exact element a + bω of the ring of integers"""

    a: int
    b: int
    ctx: "FieldContext" = field(repr=False)

    def __add__(self, other):
        other = self.ctx.coerce(other)
        if isinstance(other, FieldElement):
            return self.to_field() + other
        return RingElement(self.a + other.a, self.b + other.b, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(-self.a, -self.b, self.ctx)

    def __sub__(self, other):
        return self + (-self.ctx.coerce(other))

    def __rsub__(self, other):
        return self.ctx.coerce(other) + (-self)

    def __mul__(self, other):
        other = self.ctx.coerce(other)
        if isinstance(other, FieldElement):
            return self.to_field() * other
        return RingElement(*self._mul_coords(other), self.ctx)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            inverse = self.unit_inverse()
            return inverse ** (-exponent)
        result, base = self.ctx.one, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __truediv__(self, other):
        return self.to_field() / other

    def conj(self) -> RingElement:
        return RingElement(self.a + self.ctx.omega_trace * self.b, -self.b, self.ctx)

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def unit_inverse(self) -> RingElement:
        n = self.norm()
        if abs(n) != 1:
            raise ValueError(f"{self} is not a unit")
        return self.conj() * n

    def exact_div(self, other: RingElement) -> Optional[RingElement]:
        """self / other if the quotient lies in R, else None"""
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero ring element")
        num = self * other.conj()
        if num.a % n or num.b % n:
            return None
        return RingElement(num.a // n, num.b // n, self.ctx)

    def divides(self, other: RingElement) -> bool:
        if self.is_zero():
            return other.is_zero()
        return other.exact_div(self) is not None

    def to_field(self) -> FieldElement:
        return FieldElement(Fraction(self.a), Fraction(self.b), self.ctx)

    def coords(self) -> Tuple[int, int]:
        return self.a, self.b

    def sort_key(self) -> Tuple[int, int, int]:
        """Deterministic order: trace, then coordinates"""
        return self.trace(), self.a, self.b

    def __str__(self) -> str:
        return self.ctx.format_coords(self.a, self.b)


@dataclass(frozen=True)
class FieldElement(_Arithmetic):
    """Element of F with rational coordinates in the integral basis"""

    a: Fraction
    b: Fraction
    ctx: "FieldContext" = field(repr=False)

    def __add__(self, other):
        other = self.ctx.coerce(other, as_field=True)
        return FieldElement(self.a + other.a, self.b + other.b, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.ctx)

    def __sub__(self, other):
        return self + (-self.ctx.coerce(other, as_field=True))

    def __rsub__(self, other):
        return self.ctx.coerce(other, as_field=True) + (-self)

    def __mul__(self, other):
        other = self.ctx.coerce(other, as_field=True)
        return FieldElement(*self._mul_coords(other), self.ctx)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self.ctx.coerce(other, as_field=True)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.ctx.coerce(other, as_field=True) * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.ctx.one.to_field()
        for _ in range(exponent):
            result = result * self
        return result

    def conj(self) -> FieldElement:
        return FieldElement(self.a + self.ctx.omega_trace * self.b, -self.b, self.ctx)

    def inverse(self) -> FieldElement:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return FieldElement(c.a / n, c.b / n, self.ctx)

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def to_ring(self) -> RingElement:
        if not self.is_integral():
            raise ValueError(f"{self} is not integral")
        return RingElement(int(self.a), int(self.b), self.ctx)

    def __str__(self) -> str:
        return self.ctx.format_coords(self.a, self.b)


@dataclass(frozen=True)
class PrimeIdeal:
    """A prime of R with its totally positive canonical generator"""

    generator: RingElement
    rational_prime: int
    kind: PrimeKind

    @property
    def norm(self) -> int:
        return self.generator.norm()

    @property
    def is_even(self) -> bool:
        return self.rational_prime == 2


@dataclass(frozen=True)
class PrimeFactorization:
    """x = unit_part · ∏ primeᵉ with totally positive primes"""

    unit_part: RingElement
    factors: Tuple[Tuple[RingElement, int], ...]

    def expand(self) -> RingElement:
        result = self.unit_part
        for prime, exponent in self.factors:
            result = result * prime ** exponent
        return result

    def exponent_of(self, prime: RingElement) -> int:
        for p, e in self.factors:
            if p == prime:
                return e
        return 0

    def primes(self) -> List[RingElement]:
        return [p for p, _ in self.factors]


class FieldContext:
    """A real quadratic field F = ℚ(√d) of narrow class number 1"""

    degree = 2

    def __init__(self, d: int):
        self.d = d
        if d % 4 == 1:
            self.omega_kind = OmegaKind.HALF
            self.omega_trace, self.omega_const, self.omega_width = 1, (d - 1) // 4, 1
            self.discriminant = d
        else:
            self.omega_kind = OmegaKind.SQRT
            self.omega_trace, self.omega_const, self.omega_width = 0, d, 2
            self.discriminant = 4 * d
        self.sqrt_d_float = math.sqrt(d)

        unit = self._continued_fraction_unit()
        if unit.norm() != -1:
            raise UnitSignError(
                f"fundamental unit {unit} of Q(sqrt({d})) has norm +1; "
                f"the narrow class number is not 1"
            )
        if d not in FIELD_CATALOG:
            raise CatalogError(f"Q(sqrt({d})) is not in the vetted catalog {FIELD_CATALOG}")
        self.fundamental_unit = unit

        root = self.sqrt_d if self.omega_kind == OmegaKind.HALF else self.sqrt_d * 2
        self.different_gen = totally_positive_associate(root)
        assert self.different_gen.norm() == self.discriminant
        logger.debug(f"Constructed field d={d}: unit={unit}, delta={self.different_gen}")

    # construction helpers

    def element(self, a: int, b: int = 0) -> RingElement:
        return RingElement(int(a), int(b), self)

    def field_element(self, a: Number, b: Number = 0) -> FieldElement:
        return FieldElement(Fraction(a), Fraction(b), self)

    def from_half(self, A: int, B: int) -> RingElement:
        """Element (A + B√d)/2; raises ValueError if not integral"""
        if B % self.omega_width:
            raise ValueError("not an algebraic integer")
        b = B // self.omega_width
        twice_a = A - self.omega_trace * b
        if twice_a % 2:
            raise ValueError("not an algebraic integer")
        return RingElement(twice_a // 2, b, self)

    @property
    def one(self) -> RingElement:
        return RingElement(1, 0, self)

    @property
    def zero(self) -> RingElement:
        return RingElement(0, 0, self)

    @property
    def omega(self) -> RingElement:
        return RingElement(0, 1, self)

    @property
    def sqrt_d(self) -> RingElement:
        return self.from_half(0, 2)

    def coerce(self, value, as_field: bool = False):
        if isinstance(value, (RingElement, FieldElement)):
            if value.ctx.d != self.d:
                raise ValueError("elements belong to different fields")
            if as_field and isinstance(value, RingElement):
                return value.to_field()
            return value
        if isinstance(value, int):
            return self.field_element(value) if as_field else self.element(value)
        if isinstance(value, Fraction):
            return self.field_element(value)
        raise TypeError(f"cannot coerce {value!r} into Q(sqrt({self.d}))")

    def format_coords(self, a: Number, b: Number) -> str:
        name = "√%d" % self.d if self.omega_kind == OmegaKind.SQRT else "ω"
        if b == 0:
            return str(a)
        if a == 0:
            return f"{b}{name}" if b not in (1, -1) else ("" if b == 1 else "-") + name
        sign = "+" if b > 0 else "-"
        mag = abs(b)
        return f"{a}{sign}{'' if mag == 1 else mag}{name}"

    def _continued_fraction_unit(self) -> RingElement:
        """First unit among the convergents h - kω of the expansion of ω"""
        d = self.d
        root = math.isqrt(d)
        P, Q = (1, 2) if self.omega_kind == OmegaKind.HALF else (0, 1)
        h_prev, h = 0, 1
        k_prev, k = 1, 0
        for _ in range(10000):
            a = (P + root) // Q
            h_prev, h = h, a * h + h_prev
            k_prev, k = k, a * k + k_prev
            candidate = RingElement(h, -k, self)
            if abs(candidate.norm()) == 1:
                return self._orient_unit(candidate)
            P = a * Q - P
            Q = (d - P * P) // Q
        raise CatalogError(f"continued fraction for d={d} did not produce a unit")

    def _orient_unit(self, eta: RingElement) -> RingElement:
        for candidate in (eta, -eta, eta.unit_inverse(), -eta.unit_inverse()):
            if candidate.embeddings()[0] > 1:
                return candidate
        raise CatalogError("unit orientation failed")

    def two_prime(self) -> RingElement:
        """Generator q of the unique prime above 2 (level sugar q^n)"""
        primes = primes_over(self, 2)
        if len(primes) != 1:
            raise CatalogError(f"2 splits in Q(sqrt({self.d})); q^n levels are undefined")
        return primes[0].generator

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldContext) and other.d == self.d

    def __hash__(self) -> int:
        return hash(("FieldContext", self.d))

    def __repr__(self) -> str:
        return f"FieldContext(d={self.d})"


@lru_cache(maxsize=None)
def make_field(d: int) -> FieldContext:
    """Construct the context of Q(√d), validating the catalog conditions"""
    if d <= 1 or any(e > 1 for e in factorint(d).values()):
        raise CatalogError(f"d={d} is not a squarefree integer > 1")
    return FieldContext(d)


# ---------------------------------------------------------------------------
# Units, associates and canonical forms


def totally_positive_associate(x: RingElement) -> RingElement:
    """u·x totally positive for the unit ±εᵏ with the smallest |k|, k ≥ 0 first, + first"""
    if x.is_zero():
        raise PositivityError("zero has no totally positive associate")
    eps = x.ctx.fundamental_unit
    for k in (0, 1, -1, 2, -2):
        shifted = x * eps ** k
        for sign in (1, -1):
            candidate = shifted if sign == 1 else -shifted
            if candidate.is_totally_positive():
                return candidate
    raise PositivityError(f"no totally positive associate of {x}; narrow class number > 1")


def _canonical_key(x: RingElement) -> Tuple[int, int, int]:
    return x.trace(), -x.b, x.a


def canonical_rep_mod_squared_units(x: RingElement) -> RingElement:
    """Minimal-trace representative of x·U²"""
    if not x.is_totally_positive():
        raise PositivityError(f"{x} is not totally positive")
    ctx = x.ctx
    eps_sq = ctx.fundamental_unit * ctx.fundamental_unit
    ratio = eps_sq.embeddings()[0]
    x1, x2 = x.embeddings()
    try:
        center = math.log(x2 / x1) / (2 * math.log(ratio))
    except (ValueError, ZeroDivisionError, OverflowError):
        center = 0.0
    lo, hi = math.floor(center) - 2, math.ceil(center) + 2
    best = None
    for k in range(lo, hi + 1):
        candidate = x * eps_sq ** k
        if best is None or _canonical_key(candidate) < _canonical_key(best):
            best = candidate
    return best


def canonical_ideal_generator(x: RingElement) -> RingElement:
    """Canonical totally positive generator of the ideal (x)"""
    return canonical_rep_mod_squared_units(totally_positive_associate(x))


# ---------------------------------------------------------------------------
# Primes and factorization


def _lattice_inner(ctx: FieldContext, u: Tuple[int, int], v: Tuple[int, int]) -> int:
    """Doubled Minkowski inner product of two coordinate vectors"""
    s, w = ctx.omega_trace, ctx.omega_width
    Au, Bu = 2 * u[0] + s * u[1], w * u[1]
    Av, Bv = 2 * v[0] + s * v[1], w * v[1]
    return Au * Av + ctx.d * Bu * Bv


def _gauss_reduce(ctx: FieldContext, u, v):
    """Lagrange reduction of a rank-2 lattice basis"""
    if _lattice_inner(ctx, u, u) > _lattice_inner(ctx, v, v):
        u, v = v, u
    while True:
        m = round(Fraction(_lattice_inner(ctx, u, v), _lattice_inner(ctx, u, u)))
        v = (v[0] - m * u[0], v[1] - m * u[1])
        if _lattice_inner(ctx, v, v) >= _lattice_inner(ctx, u, u):
            return u, v
        u, v = v, u


def _generator_of_norm(ctx: FieldContext, basis, target: int) -> RingElement:
    u, v = _gauss_reduce(ctx, *basis)
    for bound in (8, 64):
        hits = []
        for i, j in product(range(-bound, bound + 1), repeat=2):
            x = RingElement(i * u[0] + j * v[0], i * u[1] + j * v[1], ctx)
            if not x.is_zero() and abs(x.norm()) == target:
                hits.append((_lattice_inner(ctx, x.coords(), x.coords()), x.sort_key(), x))
        if hits:
            return min(hits, key=lambda h: (h[0], h[1]))[2]
    raise ArithmeticError(f"no element of norm ±{target} found; class number > 1?")


def _roots_of_min_poly(ctx: FieldContext, p: int) -> List[int]:
    s, k = ctx.omega_trace, ctx.omega_const
    if p == 2:
        return [x for x in range(2) if (x * x - s * x - k) % 2 == 0]
    disc = (s * s + 4 * k) % p
    roots = sqrt_mod(disc, p, all_roots=True) or []
    inv2 = pow(2, -1, p)
    return sorted({((s + r) * inv2) % p for r in roots})


@lru_cache(maxsize=None)
def primes_over(ctx: FieldContext, p: int) -> Tuple[PrimeIdeal, ...]:
    """Primes of R above the rational prime p, ordered by generator"""
    D = ctx.discriminant
    if D % p == 0:
        kind = PrimeKind.RAMIFIED
    elif p == 2:
        kind = PrimeKind.SPLIT if ctx.d % 8 == 1 else PrimeKind.INERT
    else:
        kind = PrimeKind.SPLIT if legendre_symbol(ctx.d % p, p) == 1 else PrimeKind.INERT

    if kind == PrimeKind.INERT:
        return (PrimeIdeal(ctx.element(p), p, kind),)

    r = _roots_of_min_poly(ctx, p)[0]
    pi = _generator_of_norm(ctx, ((p, 0), (-r, 1)), p)
    gens = {canonical_ideal_generator(pi)}
    if kind == PrimeKind.SPLIT:
        gens.add(canonical_ideal_generator(pi.conj()))
    ordered = sorted(gens, key=_canonical_key)
    return tuple(PrimeIdeal(g, p, kind) for g in ordered)


def prime_ideal_of(prime: RingElement) -> PrimeIdeal:
    """PrimeIdeal record for a prime element (any associate)"""
    n = abs(prime.norm())
    factors = factorint(n)
    if len(factors) != 1:
        raise ValueError(f"{prime} is not prime")
    p = next(iter(factors))
    for ideal in primes_over(prime.ctx, p):
        if ideal.generator.divides(prime) and prime.divides(ideal.generator):
            return ideal
    raise ValueError(f"{prime} is not prime")


def factor(x: RingElement) -> PrimeFactorization:
    """Factor the ideal (x) into totally positive primes times a unit"""
    if x.is_zero():
        raise ValueError("cannot factor zero")
    remainder = x
    factors: List[Tuple[RingElement, int]] = []
    for p in sorted(factorint(abs(x.norm()))):
        for ideal in primes_over(x.ctx, p):
            exponent = 0
            while True:
                quotient = remainder.exact_div(ideal.generator)
                if quotient is None:
                    break
                remainder = quotient
                exponent += 1
            if exponent:
                factors.append((ideal.generator, exponent))
    if not remainder.is_unit():
        raise ArithmeticError(f"factorization of {x} left non-unit {remainder}")
    return PrimeFactorization(remainder, tuple(factors))


def prime_ideals_of(x: RingElement) -> List[PrimeIdeal]:
    return [prime_ideal_of(p) for p in factor(x).primes()]


def squarefree_part(x: RingElement) -> RingElement:
    """Canonical representative of the product of primes with odd exponent"""
    if not x.is_totally_positive():
        raise PositivityError(f"{x} is not totally positive")
    result = x.ctx.one
    for prime, exponent in factor(x).factors:
        if exponent % 2:
            result = result * prime
    return canonical_rep_mod_squared_units(result)


def is_squarefree(x: RingElement) -> bool:
    return all(e == 1 for _, e in factor(x).factors)


def divisors_up_to_units(x: RingElement) -> List[RingElement]:
    """One canonical totally positive generator per divisor ideal of (x)"""
    fac = factor(x)
    ranges = [range(e + 1) for _, e in fac.factors]
    divisors = []
    for exponents in product(*ranges):
        g = x.ctx.one
        for (prime, _), e in zip(fac.factors, exponents):
            g = g * prime ** e
        divisors.append(canonical_rep_mod_squared_units(g))
    return sorted(divisors, key=lambda g: (g.norm(), _canonical_key(g)))


def ideal_lcm(x: RingElement, y: RingElement) -> RingElement:
    """Canonical generator of lcm((x), (y))"""
    exponents = {}
    for prime, e in factor(x).factors + factor(y).factors:
        exponents[prime] = max(exponents.get(prime, 0), e)
    g = x.ctx.one
    for prime, e in exponents.items():
        g = g * prime ** e
    return canonical_rep_mod_squared_units(g)


def ideal_gcd(x: RingElement, y: RingElement) -> RingElement:
    fy = factor(y)
    g = x.ctx.one
    for prime, e in factor(x).factors:
        g = g * prime ** min(e, fy.exponent_of(prime))
    return canonical_rep_mod_squared_units(g)


def is_nonsplit(x: RingElement) -> bool:
    """True iff every prime dividing x lies over an inert or ramified rational prime"""
    return all(ideal.kind != PrimeKind.SPLIT for ideal in prime_ideals_of(x))


def valuation(x: RingElement, prime: RingElement) -> int:
    """Exponent of the prime in x (x ≠ 0)"""
    v = 0
    while True:
        quotient = x.exact_div(prime)
        if quotient is None:
            return v
        x = quotient
        v += 1


# ---------------------------------------------------------------------------
# Enumeration


@lru_cache(maxsize=256)
def _enumerate_box_cached(ctx: FieldContext, X1: Fraction, X2: Fraction, include_zero: bool):
    root = ctx.sqrt_d_float
    w = ctx.omega_width
    found = []
    B_lo = -math.floor(float(X2) / root) - 1
    B_hi = math.floor(float(X1) / root) + 1
    for B in range(B_lo, B_hi + 1):
        if B % w:
            continue
        A_lo = math.floor(abs(B) * root) - 1
        A_hi = math.ceil(min(2 * float(X1) - B * root, 2 * float(X2) + B * root)) + 1
        for A in range(max(A_lo, 1), A_hi + 1):
            try:
                x = ctx.from_half(A, B)
            except ValueError:
                continue
            if x.is_totally_positive() and x.embedding_le(0, X1) and x.embedding_le(1, X2):
                found.append(x)
    found.sort(key=RingElement.sort_key)
    if include_zero:
        found.insert(0, ctx.zero)
    return tuple(found)


def enumerate_box(ctx: FieldContext, X1, X2, include_zero: bool = False) -> List[RingElement]:
    """Totally positive ξ with ξ⁽¹⁾ ≤ X₁, ξ⁽²⁾ ≤ X₂, ordered by trace then coordinates"""
    if X1 <= 0 or X2 <= 0:
        raise ValueError("box bounds must be positive")
    return list(_enumerate_box_cached(ctx, _as_fraction(X1), _as_fraction(X2), include_zero))


def in_box(x: RingElement, box: Tuple[Fraction, Fraction]) -> bool:
    if x.is_zero():
        return True
    return x.embedding_le(0, box[0]) and x.embedding_le(1, box[1])


def canonical_box(ctx: FieldContext, norm_bound: int) -> float:
    """Box half-width containing every canonical representative of norm ≤ bound"""
    return math.sqrt(norm_bound) * ctx.fundamental_unit.embeddings()[0] + 1


def ideals_up_to_norm(ctx: FieldContext, norm_bound: int) -> List[RingElement]:
    """Canonical generators of all nonzero ideals with norm ≤ bound"""
    X = canonical_box(ctx, norm_bound)
    ideals = [
        x for x in enumerate_box(ctx, X, X)
        if x.norm() <= norm_bound and canonical_rep_mod_squared_units(x) == x
    ]
    return sorted(ideals, key=lambda g: (g.norm(), _canonical_key(g)))


def primes_up_to_norm(ctx: FieldContext, norm_bound: int) -> List[RingElement]:
    """Canonical generators of all prime ideals with norm ≤ bound"""
    primes = []
    for p in primerange(2, norm_bound + 1):
        for ideal in primes_over(ctx, p):
            if ideal.norm <= norm_bound:
                primes.append(ideal.generator)
    return sorted(primes, key=lambda g: (g.norm(), _canonical_key(g)))


def lattice_points(ctx: FieldContext, radii: Tuple[float, float]) -> Iterable[RingElement]:
    """All x ∈ R with |x⁽ʲ⁾| ≤ radii[j] (float radii, inclusive up to rounding)"""
    root = ctx.sqrt_d_float
    w = ctx.omega_width
    r1, r2 = radii
    B_max = math.floor((r1 + r2) / root) + 1
    for B in range(-B_max, B_max + 1):
        if B % w:
            continue
        lo = max(-2 * r1 - B * root, -2 * r2 + B * root)
        hi = min(2 * r1 - B * root, 2 * r2 + B * root)
        if lo > hi + 2:
            continue
        for A in range(math.floor(lo) - 1, math.ceil(hi) + 2):
            try:
                x = ctx.from_half(A, B)
            except ValueError:
                continue
            x1 = (A + B * root) / 2
            x2 = (A - B * root) / 2
            if abs(x1) <= r1 * (1 + 1e-12) and abs(x2) <= r2 * (1 + 1e-12):
                yield x


def level_power(ctx: FieldContext, n: int) -> RingElement:
    """Canonical generator of qⁿ for the prime q above 2"""
    return canonical_rep_mod_squared_units(ctx.two_prime() ** n)
