"""
Exact arithmetic in cyclotomic fields Q(ζ_N)

Numbers are stored as rational coefficient vectors in the power basis
1, ζ, …, ζ^{φ(N)-1} modulo the cyclotomic polynomial Φ_N. Mixed-order
operations lift both operands to the lcm order. Rational values are
always normalized to order 1.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple, Union

import mpmath
from sympy import Poly, QQ, Rational, cyclotomic_poly, factorint, invert, symbols, totient

_X = symbols("x")

Scalar = Union[int, Fraction]


@lru_cache(maxsize=None)
def _power_mean_trace(order: int, k: int) -> Fraction:
    """Tr(ζ_N^k) / φ(N) = μ(m)/φ(m) with m = N / gcd(k, N)"""
    m = order // math.gcd(k, order)
    exponents = factorint(m).values()
    if any(e > 1 for e in exponents):
        return Fraction(0)
    return Fraction((-1) ** len(exponents), int(totient(m)))


@lru_cache(maxsize=None)
def _phi(order: int) -> Tuple[int, ...]:
    """Coefficients of Φ_N in ascending degree"""
    coeffs = Poly(cyclotomic_poly(order, _X), _X).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


def _reduce(coeffs: List[Fraction], order: int) -> Tuple[Fraction, ...]:
    phi = _phi(order)
    deg = len(phi) - 1
    coeffs = list(coeffs) + [Fraction(0)] * max(0, deg - len(coeffs))
    for i in range(len(coeffs) - 1, deg - 1, -1):
        c = coeffs[i]
        if c:
            shift = i - deg
            for j, p in enumerate(phi):
                if p:
                    coeffs[shift + j] -= c * p
    return tuple(coeffs[:deg])


class CyclotomicNumber:
    """Exact element of Q(ζ_N)"""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence[Scalar], reduced: bool = False):
        coeffs = [Fraction(c) for c in coeffs]
        if not reduced:
            coeffs = list(_reduce(coeffs, order))
        if order <= 2 or not any(coeffs[1:]):
            order, coeffs = 1, [coeffs[0] if coeffs else Fraction(0)]
        self.order = order
        self.coeffs = tuple(coeffs)

    # constructors

    @classmethod
    def rational(cls, value: Scalar) -> CyclotomicNumber:
        return cls(1, [Fraction(value)], reduced=True)

    @classmethod
    def zero(cls) -> CyclotomicNumber:
        return cls.rational(0)

    @classmethod
    def one(cls) -> CyclotomicNumber:
        return cls.rational(1)

    @classmethod
    def root_of_unity(cls, exponent: Fraction) -> CyclotomicNumber:
        """exp(2πi·exponent) for a rational exponent"""
        exponent = Fraction(exponent) % 1
        order, k = exponent.denominator, exponent.numerator
        coeffs = [Fraction(0)] * (k + 1)
        coeffs[k] = Fraction(1)
        return cls(order, coeffs)

    @classmethod
    def coerce(cls, value) -> CyclotomicNumber:
        if isinstance(value, CyclotomicNumber):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        raise TypeError(f"cannot coerce {value!r} to a cyclotomic number")

    # structure

    def lift(self, order: int) -> Tuple[Fraction, ...]:
        """Coefficient vector in Q(ζ_order); self.order must divide order"""
        if order % self.order:
            raise ValueError(f"order {self.order} does not divide {order}")
        if order == self.order:
            return self.coeffs
        step = order // self.order
        coeffs = [Fraction(0)] * (step * len(self.coeffs))
        for i, c in enumerate(self.coeffs):
            coeffs[i * step] = c
        return _reduce(coeffs, order)

    def _common(self, other: CyclotomicNumber):
        order = self.order * other.order // math.gcd(self.order, other.order)
        return order, self.lift(order), other.lift(order)

    def is_rational(self) -> bool:
        return self.order == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return self.order == 1 and self.coeffs[0] == 0

    # arithmetic

    def __add__(self, other):
        other = CyclotomicNumber.coerce(other)
        if self.order == other.order == 1:
            return CyclotomicNumber.rational(self.coeffs[0] + other.coeffs[0])
        order, u, v = self._common(other)
        return CyclotomicNumber(order, [x + y for x, y in zip(u, v)], reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, [-c for c in self.coeffs], reduced=True)

    def __sub__(self, other):
        return self + (-CyclotomicNumber.coerce(other))

    def __rsub__(self, other):
        return CyclotomicNumber.coerce(other) + (-self)

    def __mul__(self, other):
        other = CyclotomicNumber.coerce(other)
        if other.order == 1:
            return self.scale(other.coeffs[0])
        if self.order == 1:
            return other.scale(self.coeffs[0])
        order, u, v = self._common(other)
        product = [Fraction(0)] * (len(u) + len(v) - 1)
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    if y:
                        product[i + j] += x * y
        return CyclotomicNumber(order, product)

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> CyclotomicNumber:
        factor = Fraction(factor)
        if factor == 0:
            return CyclotomicNumber.zero()
        return CyclotomicNumber(self.order, [c * factor for c in self.coeffs], reduced=True)

    def inverse(self) -> CyclotomicNumber:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        if self.order == 1:
            return CyclotomicNumber.rational(1 / self.coeffs[0])
        f = Poly(list(reversed(self.coeffs)), _X, domain=QQ)
        g = Poly(list(reversed(_phi(self.order))), _X, domain=QQ)
        inv = invert(f, g)
        coeffs = []
        for c in reversed(inv.all_coeffs()):
            r = Rational(c)
            coeffs.append(Fraction(int(r.p), int(r.q)))
        return CyclotomicNumber(self.order, coeffs)

    def __truediv__(self, other):
        other = CyclotomicNumber.coerce(other)
        if other.order == 1:
            return self.scale(1 / other.coeffs[0])
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CyclotomicNumber.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = CyclotomicNumber.one(), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self) -> CyclotomicNumber:
        """Complex conjugation ζ ↦ ζ⁻¹"""
        if self.order == 1:
            return self
        N = self.order
        coeffs = [Fraction(0)] * N
        for i, c in enumerate(self.coeffs):
            coeffs[(-i) % N] += c
        return CyclotomicNumber(N, coeffs)

    # comparison and evaluation

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.order == 1 and self.coeffs[0] == other
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        if self.order == other.order:
            return self.coeffs == other.coeffs
        _, u, v = self._common(other)
        return u == v

    def __hash__(self) -> int:
        if self.order == 1:
            return hash(self.coeffs[0])
        # mean traces do not depend on the order the number is stored at
        return hash((self._mean_trace(), (self * self.conj())._mean_trace(), (self * self)._mean_trace()))

    def _mean_trace(self) -> Fraction:
        return sum((c * _power_mean_trace(self.order, k) for k, c in enumerate(self.coeffs) if c), Fraction(0))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def to_complex(self) -> complex:
        if self.order == 1:
            return complex(self.coeffs[0])
        zeta = cmath.exp(2j * math.pi / self.order)
        return sum(float(c) * zeta ** i for i, c in enumerate(self.coeffs) if c)

    def to_mpc(self, precision: int = 30):
        with mpmath.workdps(precision + 5):
            zeta = mpmath.exp(2j * mpmath.pi / self.order)
            total = mpmath.mpc(0)
            for i, c in enumerate(self.coeffs):
                if c:
                    total += mpmath.mpf(c.numerator) / c.denominator * zeta ** i
            return total

    def __abs__(self) -> float:
        return abs(self.to_complex())

    def to_dict(self) -> Dict[str, object]:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> CyclotomicNumber:
        return cls(int(data["order"]), [Fraction(c) for c in data["coeffs"]])

    def __str__(self) -> str:
        if self.order == 1:
            return str(self.coeffs[0])
        terms = [f"{c}*z{self.order}^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"CyclotomicNumber({self.order}, {[str(c) for c in self.coeffs]})"
