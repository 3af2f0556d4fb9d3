"""
Box-truncated Fourier expansions f(z) = Σ a(ξ) e(ξz/2) with exact cyclotomic coefficients

An expansion stores its nonzero coefficients sparsely together with the box
(X₁, X₂) on which they are known: every totally positive ξ with
ξ⁽ʲ⁾ ≤ Xⱼ missing from the table has coefficient 0, and any lookup outside
the box raises BoxTooSmallError. Operators compute their output box and
never invent coefficients beyond it.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from exceptions import BoxTooSmallError, VerificationError, WellDefinednessError
from services.cyclotomic import CyclotomicNumber
from services.field_arith import (
    FieldContext,
    RingElement,
    canonical_ideal_generator,
    canonical_rep_mod_squared_units,
    in_box,
    lattice_points,
    prime_ideal_of,
    totally_positive_associate,
)
from services.residue_chars import (
    DirichletCharacter,
    char_conjugate,
    char_mul,
    epsilon_of,
    epsilon_t,
    ideal_char_value,
    quadratic_symbol,
)

logger = logging.getLogger(__name__)

Box = Tuple[Fraction, Fraction]

# relative margin applied when a box bound is an irrational multiple
_SHRINK = 1e-12


def make_box(X1, X2) -> Box:
    box = (Fraction(X1), Fraction(X2))
    if box[0] <= 0 or box[1] <= 0:
        raise ValueError("box bounds must be positive")
    return box


def _scaled_bound(value: float) -> Fraction:
    return Fraction(value * (1 - _SHRINK)).limit_denominator(10 ** 9)


def scale_box(box: Box, factor: RingElement, power: int) -> Box:
    """(X₁·(m⁽¹⁾)^k, X₂·(m⁽²⁾)^k) rounded inward"""
    e1, e2 = factor.embeddings()
    return (_scaled_bound(float(box[0]) * e1 ** power), _scaled_bound(float(box[1]) * e2 ** power))


def shared_box(a: Box, b: Box) -> Box:
    return min(a[0], b[0]), min(a[1], b[1])


def box_contains(outer: Box, inner: Box) -> bool:
    return inner[0] <= outer[0] and inner[1] <= outer[1]


@dataclass
class FourierExpansion:
    """Coefficients a(ξ) on {0} ∪ {ξ ≫ 0 : ξ⁽ʲ⁾ ≤ Xⱼ}, with level and character metadata"""

    ctx: FieldContext
    box: Box
    coeffs: Dict[RingElement, CyclotomicNumber] = field(default_factory=dict)
    level: Optional[RingElement] = None
    character: Optional[DirichletCharacter] = None
    label: str = ""

    def __post_init__(self):
        self.coeffs = {xi: c for xi, c in self.coeffs.items() if not c.is_zero()}

    def covers(self, xi: RingElement) -> bool:
        return in_box(xi, self.box)

    def __getitem__(self, xi) -> CyclotomicNumber:
        xi = self.ctx.coerce(xi)
        if xi.is_zero():
            return self.coeffs.get(xi, CyclotomicNumber.zero())
        if not xi.is_totally_positive():
            return CyclotomicNumber.zero()
        if not in_box(xi, self.box):
            raise BoxTooSmallError(f"coefficient at {xi} lies outside the box {self.box_str()}")
        return self.coeffs.get(xi, CyclotomicNumber.zero())

    def get(self, xi: RingElement) -> CyclotomicNumber:
        """Coefficient without the box check; callers guarantee coverage"""
        return self.coeffs.get(xi, CyclotomicNumber.zero())

    def support(self) -> List[RingElement]:
        return sorted(self.coeffs, key=RingElement.sort_key)

    def is_zero(self) -> bool:
        return not self.coeffs

    def restrict(self, box: Box) -> FourierExpansion:
        if not box_contains(self.box, box):
            raise BoxTooSmallError(f"cannot restrict {self.box_str()} to the larger box {box}")
        coeffs = {xi: c for xi, c in self.coeffs.items() if in_box(xi, box)}
        return replace(self, box=box, coeffs=coeffs)

    def scale(self, factor) -> FourierExpansion:
        factor = CyclotomicNumber.coerce(factor)
        return replace(self, coeffs={xi: c * factor for xi, c in self.coeffs.items()})

    def _combine(self, other: FourierExpansion, sign: int) -> FourierExpansion:
        box = shared_box(self.box, other.box)
        coeffs: Dict[RingElement, CyclotomicNumber] = {}
        for xi in set(self.coeffs) | set(other.coeffs):
            if in_box(xi, box):
                value = self.get(xi) + other.get(xi) if sign > 0 else self.get(xi) - other.get(xi)
                coeffs[xi] = value
        return replace(self, box=box, coeffs=coeffs, label="")

    def __add__(self, other: FourierExpansion) -> FourierExpansion:
        return self._combine(other, 1)

    def __sub__(self, other: FourierExpansion) -> FourierExpansion:
        return self._combine(other, -1)

    def equal_on_shared_box(self, other: FourierExpansion) -> bool:
        return (self - other).is_zero()

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def box_str(self) -> str:
        return f"({float(self.box[0]):.6g}, {float(self.box[1]):.6g})"

    def __repr__(self) -> str:
        return (f"FourierExpansion({self.label or 'f'}, d={self.ctx.d}, box={self.box_str()}, "
                f"terms={len(self.coeffs)})")


# ---------------------------------------------------------------------------
# Theta series


def theta_level(chi: DirichletCharacter, t: RingElement) -> RingElement:
    """4·r(χ)²·t"""
    r = chi.conductor
    return canonical_ideal_generator(r * r * t * 4)


def theta_chi_t(chi: DirichletCharacter, t: RingElement, box) -> FourierExpansion:
    """θ_{χ,t}(z) = Σ_x conj χ(x) e(t x² z / 2), with χ evaluated modulo its conductor"""
    ctx = t.ctx
    box = make_box(*box)
    t = canonical_rep_mod_squared_units(t)
    primitive = chi.primitive()
    t1, t2 = t.embeddings()
    radii = (math.sqrt(float(box[0]) / t1), math.sqrt(float(box[1]) / t2))

    coeffs: Dict[RingElement, CyclotomicNumber] = {}
    for x in lattice_points(ctx, radii):
        xi = t * x * x
        if not in_box(xi, box):
            continue
        value = primitive(x)
        if value.is_zero():
            continue
        coeffs[xi] = coeffs.get(xi, CyclotomicNumber.zero()) + value.conj()

    f = FourierExpansion(
        ctx=ctx,
        box=box,
        coeffs=coeffs,
        level=theta_level(primitive, t),
        character=char_mul(primitive, epsilon_t(t)),
        label=f"theta[{primitive}, {t}]",
    )
    logger.debug(f"Built {f!r}")
    return f


# ---------------------------------------------------------------------------
# Operators


def _positive_prime(p) -> RingElement:
    if not p.is_totally_positive():
        p = totally_positive_associate(p)
    return p


def _target_box(default: Box, box: Optional[Box]) -> Box:
    if box is None:
        return default
    box = make_box(*box)
    if not box_contains(default, box):
        raise BoxTooSmallError(
            f"requested box ({float(box[0]):.6g}, {float(box[1]):.6g}) exceeds the determined "
            f"region ({float(default[0]):.6g}, {float(default[1]):.6g})"
        )
    return box


def op_T_p2(f: FourierExpansion, p, psi: DirichletCharacter, c: RingElement,
            box: Optional[Box] = None) -> FourierExpansion:
    """Hecke operator T_{p²} on coefficients

    b(ξ) = a(ξp²) + [p ∤ c]·N(p)⁻¹·(ψ*(p)·(ξ/p)·a(ξ) + ψ*(p)²·a(ξ/p²))
    """
    p = _positive_prime(f.ctx.coerce(p))
    out_box = _target_box(scale_box(f.box, p, -2), box)
    p2 = p * p
    good = not p.divides(c)

    candidates = set()
    for eta in f.coeffs:
        quotient = eta.exact_div(p2) if not eta.is_zero() else eta
        if quotient is not None:
            candidates.add(quotient)
        if good:
            candidates.add(eta)
            candidates.add(eta * p2)
    candidates = [xi for xi in candidates if in_box(xi, out_box)]

    coeffs: Dict[RingElement, CyclotomicNumber] = {}
    if good:
        ideal = prime_ideal_of(p)
        chi_p = ideal_char_value(psi, p)
        inv_norm = Fraction(1, ideal.norm)
        for xi in candidates:
            value = f.get(xi * p2)
            a_xi = f.get(xi)
            if not a_xi.is_zero():
                symbol = quadratic_symbol(xi, p) if not xi.is_zero() else 0
                if symbol:
                    value = value + (chi_p * a_xi).scale(inv_norm * symbol)
            quotient = xi.exact_div(p2) if not xi.is_zero() else xi
            if quotient is not None:
                a_low = f.get(quotient)
                if not a_low.is_zero():
                    value = value + (chi_p * chi_p * a_low).scale(inv_norm)
            coeffs[xi] = value
    else:
        for xi in candidates:
            coeffs[xi] = f.get(xi * p2)

    return FourierExpansion(f.ctx, out_box, coeffs, f.level, f.character, label=f"T({p}^2){f.label}")


def op_V(m, f: FourierExpansion) -> FourierExpansion:
    """(f | V(m))(z) = f(mz): b(ξ) = a(ξ/m)"""
    m = f.ctx.coerce(m)
    if not m.is_totally_positive():
        raise ValueError(f"V(m) needs a totally positive m, got {m}")
    if m == f.ctx.one:
        return f
    out_box = scale_box(f.box, m, 1)
    coeffs = {m * eta: c for eta, c in f.coeffs.items()}
    level = canonical_ideal_generator(f.level * m) if f.level is not None else None
    character = char_mul(f.character, epsilon_of(m)) if f.character is not None else None
    return FourierExpansion(f.ctx, out_box, coeffs, level, character, label=f"V({m}){f.label}")


def op_U(p, f: FourierExpansion) -> FourierExpansion:
    """b(ξ) = a(pξ)"""
    p = _positive_prime(f.ctx.coerce(p))
    out_box = scale_box(f.box, p, -1)
    coeffs = {}
    for eta, c in f.coeffs.items():
        xi = eta.exact_div(p) if not eta.is_zero() else eta
        if xi is not None and in_box(xi, out_box):
            coeffs[xi] = c
    character = char_mul(f.character, epsilon_of(p)) if f.character is not None else None
    return FourierExpansion(f.ctx, out_box, coeffs, f.level, character, label=f"U({p}){f.label}")


def op_K(p, f: FourierExpansion) -> FourierExpansion:
    """Keep the coefficients prime to p"""
    p = _positive_prime(f.ctx.coerce(p))
    coeffs = {xi: c for xi, c in f.coeffs.items() if not xi.is_zero() and not p.divides(xi)}
    level = canonical_ideal_generator(f.level * p * p) if f.level is not None else None
    return FourierExpansion(f.ctx, f.box, coeffs, level, f.character, label=f"K({p}){f.label}")


def op_H(f: FourierExpansion) -> FourierExpansion:
    """(f | H)(z) = conj f(−conj z): coefficientwise conjugation"""
    coeffs = {xi: c.conj() for xi, c in f.coeffs.items()}
    character = char_conjugate(f.character) if f.character is not None else None
    return FourierExpansion(f.ctx, f.box, coeffs, f.level, character, label=f"H{f.label}")


# ---------------------------------------------------------------------------
# Comparisons and ideal coefficients


def is_proportional(f: FourierExpansion, g: FourierExpansion) -> Optional[CyclotomicNumber]:
    """λ with f = λ·g on the shared box, 1 when both vanish, None otherwise"""
    box = shared_box(f.box, g.box)
    keys = sorted((xi for xi in set(f.coeffs) | set(g.coeffs) if in_box(xi, box)),
                  key=RingElement.sort_key)
    if not keys:
        return CyclotomicNumber.one()
    pivot = next((xi for xi in keys if not g.get(xi).is_zero()), None)
    if pivot is None:
        return None
    ratio = f.get(pivot) / g.get(pivot)
    for xi in keys:
        if f.get(xi) != ratio * g.get(xi):
            return None
    return ratio


def coeff_at_ideal(f: FourierExpansion, x: RingElement) -> CyclotomicNumber:
    """a((x)) through the canonical generator, after checking a(ξε^{±2}) = a(ξ) in the box"""
    xi = canonical_ideal_generator(f.ctx.coerce(x))
    value = f[xi]
    eps_sq = f.ctx.fundamental_unit * f.ctx.fundamental_unit
    for twin in (xi * eps_sq, xi * eps_sq.unit_inverse()):
        if f.covers(twin) and f.get(twin) != value:
            raise WellDefinednessError(
                f"a({xi}) = {value} but a({twin}) = {f.get(twin)}; coefficients are not unit-invariant"
            )
    return value


def hecke_eigenvalue(chi: DirichletCharacter, t: RingElement, p: RingElement) -> CyclotomicNumber:
    """Expected T_{p²} eigenvalue ψ*(p)·(t/p)·(1 + N(p)⁻¹) of θ_{χ,t} at a good odd prime"""
    psi = char_mul(chi, epsilon_t(t))
    norm = prime_ideal_of(p).norm
    return ideal_char_value(psi, p).scale(Fraction(quadratic_symbol(t, p) * (norm + 1), norm))


# ---------------------------------------------------------------------------
# Coefficient laws along prime powers


def prime_power_coefficients(f: FourierExpansion, xi: RingElement, p, k_max: int) -> List[CyclotomicNumber]:
    """[a(ξ p^{2k}) for k = 0 … k_max]"""
    p = _positive_prime(f.ctx.coerce(p))
    p2 = p * p
    values, current = [], xi
    for _ in range(k_max + 1):
        values.append(f[current])
        current = current * p2
    return values


def _chain_bases(f: FourierExpansion, p2: RingElement, k_max: int) -> List[RingElement]:
    """Elements m with p² ∤ m heading a chain m, mp², … that meets the support and fits the box"""
    step = p2 ** k_max
    bases = set()
    for xi in f.coeffs:
        if xi.is_zero():
            continue
        while True:
            quotient = xi.exact_div(p2)
            if quotient is None:
                break
            xi = quotient
        if f.covers(xi * step):
            bases.add(xi)
    return sorted(bases, key=RingElement.sort_key)


def eigen_power_check(f: FourierExpansion, p, psi: DirichletCharacter, c: RingElement,
                      k_max: int = 2) -> Optional[CyclotomicNumber]:
    """At p | c: if f | T_{p²} = c_p f then a(ξp^{2k}) = c_p^k a(ξ) and |c_p| ≤ 1

    Returns c_p, or None when f is not an eigenform at p.
    """
    p = _positive_prime(f.ctx.coerce(p))
    if not p.divides(c):
        raise ValueError(f"{p} does not divide the level {c}")
    eigenvalue = is_proportional(op_T_p2(f, p, psi, c), f)
    if eigenvalue is None:
        return None
    if abs(eigenvalue) > 1 + 1e-12:
        raise VerificationError(f"|c_p| = {abs(eigenvalue):.6g} exceeds 1 at {p}")
    for m in _chain_bases(f, p * p, k_max):
        values = prime_power_coefficients(f, m, p, k_max)
        for k, value in enumerate(values):
            if value != values[0] * eigenvalue ** k:
                raise VerificationError(f"a({m}·{p}^{2 * k}) = {value} breaks the eigen recursion")
    return eigenvalue


def newform_power_law_check(f: FourierExpansion, p, psi: DirichletCharacter, k_max: int = 2) -> int:
    """At a good prime: a(m p^{2n}) = a(m)·conj ψ(p)^n·(m/p)^n for p² ∤ m

    Returns the number of chains checked.
    """
    p = _positive_prime(f.ctx.coerce(p))
    chi_p = ideal_char_value(psi, p)
    bases = _chain_bases(f, p * p, k_max)
    for m in bases:
        step = chi_p * quadratic_symbol(m, p)
        values = prime_power_coefficients(f, m, p, k_max)
        for n, value in enumerate(values):
            expected = values[0] * step ** n
            if value != expected:
                raise VerificationError(f"a({m}·{p}^{2 * n}) = {value}, expected {expected}")
    logger.debug(f"Power law at {p} verified on {len(bases)} chains")
    return len(bases)
