"""
Numerical evaluation on ℍ²: theta series, expansions, automorphy factors,
modularity sampling, the W(c) operator and partial L-series

Every lattice or Fourier sum is truncated by an explicit tail bound. Two
lattice points in the same unit square of embedding space would differ by
an element of norm < 1, so each unit square holds at most one point; the
Gaussian (theta) or exponential (expansion) weight over the omitted squares
then sums to a product of geometric series.
"""
import cmath
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from config import get_settings
from exceptions import (
    BoxTooSmallError,
    ConvergenceError,
    DegenerateError,
    MembershipError,
    SymbolError,
    VerificationError,
)
from services.field_arith import (
    FieldContext,
    FieldElement,
    RingElement,
    canonical_ideal_generator,
    factor,
    ideals_up_to_norm,
    lattice_points,
    primes_up_to_norm,
)
from services.qexp import FourierExpansion, coeff_at_ideal
from services.residue_chars import (
    DirichletCharacter,
    ideal_char_value,
    quadratic_symbol,
    residue_ring,
    unit_count,
)

logger = logging.getLogger(__name__)

# numpy double precision is used up to this many digits; mpmath beyond
_FLOAT_DIGITS = 12
_MAX_ATTEMPTS = 400


# ---------------------------------------------------------------------------
# Points and matrices


@dataclass(frozen=True)
class UpperHalfPoint:
    """z = (z₁, z₂) ∈ ℍ²"""

    z: Tuple[complex, complex]

    @property
    def y_min(self) -> float:
        return min(float(w.imag) for w in self.z)

    def check(self, floor: float) -> None:
        if any(float(w.imag) <= 0 for w in self.z):
            raise ConvergenceError(f"{self} is not in the upper half plane")
        if self.y_min < floor:
            raise ConvergenceError(f"Im z = {self.y_min:.4g} is below the evaluation floor {floor}")

    def translate(self, shift: Tuple[float, float]) -> "UpperHalfPoint":
        return UpperHalfPoint((self.z[0] + shift[0], self.z[1] + shift[1]))

    def __str__(self) -> str:
        return f"({complex(self.z[0]):.6g}, {complex(self.z[1]):.6g})"


@dataclass(frozen=True)
class MatrixOverF:
    """2×2 matrix with entries in F"""

    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: FieldElement

    @classmethod
    def of(cls, ctx: FieldContext, a, b, c, d) -> "MatrixOverF":
        return cls(*(ctx.coerce(x, as_field=True) for x in (a, b, c, d)))

    @classmethod
    def identity(cls, ctx: FieldContext) -> "MatrixOverF":
        return cls.of(ctx, 1, 0, 0, 1)

    @property
    def ctx(self) -> FieldContext:
        return self.a.ctx

    def det(self) -> FieldElement:
        return self.a * self.d - self.b * self.c

    def __mul__(self, other: "MatrixOverF") -> "MatrixOverF":
        return MatrixOverF(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MatrixOverF":
        det = self.det()
        return MatrixOverF(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def embedding(self, j: int) -> Tuple[float, float, float, float]:
        return tuple(x.embeddings()[j] for x in (self.a, self.b, self.c, self.d))

    def act(self, z: UpperHalfPoint) -> UpperHalfPoint:
        images = []
        for j, w in enumerate(z.z):
            a, b, c, d = self.embedding(j)
            images.append((a * w + b) / (c * w + d))
        return UpperHalfPoint(tuple(images))

    def max_lower_entry(self) -> float:
        return max(abs(x) for x in self.c.embeddings())

    def in_group(self, f_gen: FieldElement, g_gen: FieldElement) -> bool:
        """γ ∈ Γ[𝔣, 𝔤]: a, d ∈ R, b ∈ 𝔣, c ∈ 𝔤, det γ = 1"""
        if self.det() != self.ctx.one.to_field():
            return False
        return (self.a.is_integral() and self.d.is_integral()
                and (self.b / f_gen).is_integral() and (self.c / g_gen).is_integral())

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def upper_ideal_generator(ctx: FieldContext) -> FieldElement:
    """2δ⁻¹"""
    return ctx.field_element(2) / ctx.different_gen


def lower_ideal_generator(level: RingElement) -> RingElement:
    """Balanced generator of 2⁻¹δ𝔠"""
    ctx = level.ctx
    g = (ctx.different_gen * level).exact_div(ctx.element(2))
    if g is None:
        raise MembershipError(f"2 does not divide δ·{level}")
    return canonical_ideal_generator(g)


def in_gamma(gamma: MatrixOverF, level: RingElement) -> bool:
    """Membership in Γ_𝔠 = Γ[2δ⁻¹, 2⁻¹δ𝔠]"""
    ctx = level.ctx
    return gamma.in_group(upper_ideal_generator(ctx), lower_ideal_generator(level).to_field())


def w0_matrix(ctx: FieldContext) -> MatrixOverF:
    """W₀ = (0, −δ⁻¹; δ, 0)"""
    delta = ctx.different_gen.to_field()
    return MatrixOverF(ctx.field_element(0), -delta.inverse(), delta, ctx.field_element(0))


# ---------------------------------------------------------------------------
# Tail bounds


def _geometric(rate: float) -> float:
    """Σ_{m≥0} e^{−rate·m}"""
    return 1.0 / (-math.expm1(-rate))


def theta_radius(a: float, other: float, tol: float, coeff_bound: float = 1.0) -> int:
    """Integer M with the Gaussian weight outside |x| ≤ M below tol/2 on this embedding"""
    spread = 2 * _geometric(math.pi * other) * 2 * coeff_bound
    M = math.sqrt(max(math.log(2 * spread * _geometric(math.pi * a) / tol), 0.0) / (math.pi * a))
    return int(math.ceil(M)) + 1


def theta_tail(a1: float, a2: float, M1: int, M2: int, coeff_bound: float = 1.0) -> float:
    """Bound on Σ e^{−π(a₁x₁² + a₂x₂²)} over lattice points with |x₁| > M₁ or |x₂| > M₂"""
    def tail(a, M):
        return 2 * math.exp(-math.pi * a * M * M) * _geometric(math.pi * a * (2 * M + 1))

    def full(a):
        return 2 * _geometric(math.pi * a)

    return coeff_bound * (tail(a1, M1) * full(a2) + full(a1) * tail(a2, M2))


def expansion_tail(box: Tuple[Fraction, Fraction], y: Tuple[float, float], coeff_bound: float) -> float:
    """Bound on Σ |a(ξ)| e^{−π tr(ξy)} over totally positive ξ outside the box"""
    K1, K2 = math.floor(box[0]), math.floor(box[1])
    g1, g2 = _geometric(math.pi * y[0]), _geometric(math.pi * y[1])
    return coeff_bound * g1 * g2 * (math.exp(-math.pi * y[0] * K1) + math.exp(-math.pi * y[1] * K2))


def required_box(points: Sequence[UpperHalfPoint], tol: float, coeff_bound: float = 2.0) -> Tuple[Fraction, Fraction]:
    """Smallest integral box whose expansion tail at every point is below tol"""
    X1, X2 = 1, 1
    for point in points:
        y1, y2 = (float(w.imag) for w in point.z)
        scale = math.log(4 * coeff_bound * _geometric(math.pi * y1) * _geometric(math.pi * y2) / tol)
        X1 = max(X1, math.ceil(scale / (math.pi * y1)) + 1)
        X2 = max(X2, math.ceil(scale / (math.pi * y2)) + 1)
    return Fraction(X1), Fraction(X2)


# ---------------------------------------------------------------------------
# Theta series and expansions


def _lattice_arrays(ctx: FieldContext, radii: Tuple[float, float]) -> Tuple[np.ndarray, np.ndarray]:
    """Embeddings (x⁽¹⁾, x⁽²⁾) of every x ∈ R with |x⁽ʲ⁾| ≤ radii[j]"""
    root = ctx.sqrt_d_float
    w, s = ctx.omega_width, ctx.omega_trace
    r1, r2 = radii
    B_max = math.floor((r1 + r2) / root) + 1
    chunks_1, chunks_2 = [], []
    for B in range(-B_max, B_max + 1):
        if B % w:
            continue
        lo = max(-2 * r1 - B * root, -2 * r2 + B * root)
        hi = min(2 * r1 - B * root, 2 * r2 + B * root)
        if lo > hi:
            continue
        parity = (s * (B // w)) % 2
        start = math.floor(lo)
        start += (parity - start) % 2
        A = np.arange(start, math.ceil(hi) + 1, 2, dtype=np.float64)
        x1 = (A + B * root) / 2
        x2 = (A - B * root) / 2
        keep = (np.abs(x1) <= r1) & (np.abs(x2) <= r2)
        chunks_1.append(x1[keep])
        chunks_2.append(x2[keep])
    if not chunks_1:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(chunks_1), np.concatenate(chunks_2)


def _resolve(precision: Optional[int], floor: Optional[float]) -> Tuple[int, float]:
    settings = get_settings()
    return (precision if precision is not None else settings.PRECISION,
            floor if floor is not None else settings.EVAL_FLOOR)


def theta_eval(ctx: FieldContext, z: UpperHalfPoint, precision: Optional[int] = None,
               floor: Optional[float] = None, t: Optional[RingElement] = None,
               chi: Optional[DirichletCharacter] = None) -> complex:
    """θ_{χ,t}(z) = Σ_{x∈R} conj χ(x) e(t x² z/2); plain θ when χ and t are omitted"""
    precision, floor = _resolve(precision, floor)
    z.check(floor)
    tol = 10.0 ** (-precision)
    t1, t2 = t.embeddings() if t is not None else (1.0, 1.0)
    a1, a2 = t1 * float(z.z[0].imag), t2 * float(z.z[1].imag)
    M1, M2 = theta_radius(a1, a2, tol), theta_radius(a2, a1, tol)
    if theta_tail(a1, a2, M1, M2) > tol:
        raise ConvergenceError(f"theta tail bound above {tol:g} at {z}")

    if chi is not None and not chi.is_trivial():
        primitive = chi.primitive()
        total = 0j
        for x in lattice_points(ctx, (M1, M2)):
            value = primitive(x)
            if value.is_zero():
                continue
            x1, x2 = x.embeddings()
            phase = cmath.exp(1j * math.pi * (t1 * x1 * x1 * z.z[0] + t2 * x2 * x2 * z.z[1]))
            total += value.conj().to_complex() * phase
        return total

    x1, x2 = _lattice_arrays(ctx, (M1, M2))
    if precision <= _FLOAT_DIGITS:
        exponent = 1j * np.pi * (t1 * x1 * x1 * complex(z.z[0]) + t2 * x2 * x2 * complex(z.z[1]))
        return complex(np.exp(exponent).sum())
    with mpmath.workdps(precision + 10):
        z1, z2 = mpmath.mpc(z.z[0]), mpmath.mpc(z.z[1])
        root = mpmath.sqrt(ctx.d)
        total = mpmath.mpc(0)
        for u, v in zip(x1, x2):
            A = int(round(u + v))
            B = int(round((u - v) / ctx.sqrt_d_float))
            e1, e2 = (A + B * root) / 2, (A - B * root) / 2
            total += mpmath.exp(1j * mpmath.pi * (t1 * e1 * e1 * z1 + t2 * e2 * e2 * z2))
        return complex(total)


class ExpansionEvaluator:
    """Vectorized evaluation of a FourierExpansion"""

    def __init__(self, f: FourierExpansion, coeff_bound: Optional[float] = None):
        self.f = f
        keys = f.support()
        self.xi = np.array([xi.embeddings() for xi in keys], dtype=np.float64).reshape(-1, 2)
        self.values = np.array([f.coeffs[xi].to_complex() for xi in keys], dtype=np.complex128)
        self.coeff_bound = coeff_bound if coeff_bound is not None else max(2.0, f.max_abs())

    def tail(self, z: UpperHalfPoint) -> float:
        return expansion_tail(self.f.box, (float(z.z[0].imag), float(z.z[1].imag)), self.coeff_bound)

    def __call__(self, z: UpperHalfPoint, tol: Optional[float] = None, floor: float = 0.0) -> complex:
        z.check(floor)
        if tol is not None and self.tail(z) > tol:
            raise BoxTooSmallError(
                f"box {self.f.box_str()} leaves a tail of {self.tail(z):.3g} > {tol:g} at {z}"
            )
        exponent = 1j * np.pi * (self.xi[:, 0] * complex(z.z[0]) + self.xi[:, 1] * complex(z.z[1]))
        return complex((self.values * np.exp(exponent)).sum())


def expansion_eval(f: FourierExpansion, z: UpperHalfPoint, precision: Optional[int] = None,
                   floor: Optional[float] = None) -> complex:
    """Σ a(ξ) e(ξz/2) with the box tail certified below 10^−precision"""
    precision, floor = _resolve(precision, floor)
    return ExpansionEvaluator(f)(z, tol=10.0 ** (-precision), floor=floor)


# ---------------------------------------------------------------------------
# Automorphy factor


@dataclass(frozen=True)
class AutomorphyValue:
    value: complex
    method: str

    def __complex__(self) -> complex:
        return complex(self.value)


def theta_level(ctx: FieldContext) -> RingElement:
    return ctx.element(4)


def h_ratio(gamma: MatrixOverF, z: UpperHalfPoint, precision: Optional[int] = None,
            floor: Optional[float] = None) -> AutomorphyValue:
    """θ(γz)/θ(z) for γ in the theta group Γ_(4)"""
    ctx = gamma.ctx
    if not in_gamma(gamma, theta_level(ctx)):
        raise MembershipError(f"{gamma} is not in the theta group")
    image = gamma.act(z)
    floor = floor if floor is not None else get_settings().EVAL_FLOOR
    numerator = theta_eval(ctx, image, precision, floor)
    denominator = theta_eval(ctx, z, precision, floor)
    return AutomorphyValue(numerator / denominator, "ratio")


def gauss_sum_epsilon(ctx: FieldContext, d: RingElement) -> complex:
    """ε(d) = ∏ⱼ(i·sgn dⱼ)^½ · 2^{−n/2} · D^{−½} · Σ_{ρ ∈ R/2δR} e(−tr(ρ²d/(4δ²)))"""
    delta = ctx.different_gen
    modulus = delta * 2
    ring = residue_ring(canonical_ideal_generator(modulus))
    denominator = (delta * delta * 4).to_field()
    total = 0j
    for index in range(ring.size):
        rho = ring.element(index)
        phase = ((rho * rho * d).to_field() / denominator).trace() % 1
        total += cmath.exp(-2j * math.pi * float(phase))
    sign_root = 1
    for s in (d.embedding_sign(0), d.embedding_sign(1)):
        sign_root *= cmath.sqrt(1j * s)
    return sign_root * total / (2 * math.sqrt(ctx.discriminant))


def epsilon_tilde(d: RingElement) -> complex:
    """i^s with s the number of negative embeddings of d"""
    negatives = sum(1 for j in (0, 1) if d.embedding_sign(j) < 0)
    return 1j ** negatives


def quadratic_ideal_symbol(c: RingElement, a: RingElement) -> int:
    """(ε_c)*((a)) = ∏ over primes π^e ∥ a of (c/π)^e"""
    value = 1
    for prime, e in factor(a).factors:
        symbol = quadratic_symbol(c, prime)
        if symbol == 0:
            raise SymbolError(f"({c}/{prime}) = 0; the quadratic character is undefined at {a}")
        value *= symbol ** e
    return value


def _closed_form_raw(gamma: MatrixOverF, z: UpperHalfPoint) -> complex:
    ctx = gamma.ctx
    if gamma.c.is_zero():
        raise DegenerateError("c_γ = 0")
    a, c, d = gamma.a.to_ring(), gamma.c.to_ring(), gamma.d.to_ring()
    value = gauss_sum_epsilon(ctx, d) * epsilon_tilde(d) * quadratic_ideal_symbol(c, a)
    for j, w in enumerate(z.z):
        _, _, cj, dj = gamma.embedding(j)
        value *= cmath.sqrt(cj * w + dj)
    return value


def sign_pattern(gamma: MatrixOverF) -> Tuple[int, ...]:
    return tuple(s for j in (0, 1) for s in (gamma.c.embedding_sign(j), gamma.d.embedding_sign(j)))


_calibration: Dict[Tuple[int, Tuple[int, ...]], complex] = {}


def _snap_to_eighth_root(value: complex) -> complex:
    k = round(cmath.phase(value) / (math.pi / 4)) % 8
    return cmath.exp(1j * math.pi * k / 4)


def calibration_phase(ctx: FieldContext, pattern: Tuple[int, ...]) -> complex:
    """Eighth root of unity fixing the square-root branches for one sign pattern of (c, d)"""
    key = (ctx.d, pattern)
    if key in _calibration:
        return _calibration[key]
    rng = random.Random(f"calibration-{ctx.d}-{pattern}")
    level = theta_level(ctx)
    for _ in range(_MAX_ATTEMPTS * 5):
        gamma = random_gamma(level, rng.randint(1, 3), rng)
        if gamma.c.is_zero() or sign_pattern(gamma) != pattern:
            continue
        z = sample_point(gamma, rng)
        ratio = h_ratio(gamma, z, floor=0.0).value / _closed_form_raw(gamma, z)
        root = _snap_to_eighth_root(ratio)
        if abs(ratio - root) > 1e-6:
            raise ConvergenceError(f"closed-form factor is off by {ratio} (not a root of unity) for {pattern}")
        _calibration[key] = root
        logger.info(f"Calibrated closed-form branch for d={ctx.d}, pattern {pattern}: {root:.6g}")
        return root
    raise ConvergenceError(f"no calibration sample with sign pattern {pattern}")


def h_garrett(gamma: MatrixOverF, z: UpperHalfPoint) -> AutomorphyValue:
    """ε(d)·ε̃(d)·(ε_c)*(a)·(cz + d)^½ with calibrated branch"""
    try:
        raw = _closed_form_raw(gamma, z)
    except DegenerateError:
        # c = 0: γ is a translation composed with a unit diagonal, both fix θ
        return AutomorphyValue(1 + 0j, "closed-form")
    return AutomorphyValue(raw * calibration_phase(gamma.ctx, sign_pattern(gamma)), "closed-form")


# ---------------------------------------------------------------------------
# Sampling Γ_𝔠


def _inverse_mod(a: RingElement, level: RingElement) -> RingElement:
    """A balanced representative of a⁻¹ mod level"""
    level = canonical_ideal_generator(level)
    ring = residue_ring(level)
    index = ring.pow(ring.index(a), unit_count(level) - 1)
    d = ring.element(index)
    q = d.to_field() / level
    shift = level * level.ctx.element(round(q.a), round(q.b))
    return d - shift


def twist_matrix(level: RingElement, a: RingElement, unit: Optional[RingElement] = None) -> MatrixOverF:
    """(a, b; u·c₀, d) ∈ Γ_𝔠 with c₀ the balanced generator of 2⁻¹δ𝔠 and d ≡ a⁻¹ mod 𝔠"""
    c0 = lower_ideal_generator(level)
    if unit is not None:
        c0 = c0 * unit
    d = _inverse_mod(a, level)
    b = (a * d - 1) / c0
    gamma = MatrixOverF(a.to_field(), b, c0.to_field(), d.to_field())
    if not in_gamma(gamma, level):
        raise MembershipError(f"twist for a = {a} left Γ_𝔠")
    return gamma


def _random_unit(level: RingElement, rng: random.Random) -> RingElement:
    ctx = level.ctx
    ring = residue_ring(canonical_ideal_generator(level))
    while True:
        a = ctx.element(rng.randint(-6, 6), rng.randint(-6, 6))
        if not a.is_zero() and ring.is_unit(ring.index(a)):
            return a


def random_gamma(level: RingElement, word_length: int, seed: Union[int, random.Random] = 0,
                 max_entry: Optional[float] = None) -> MatrixOverF:
    """Random word in Γ_𝔠: a twist followed by elementary upper and lower factors"""
    ctx = level.ctx
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    cap = max_entry if max_entry is not None else get_settings().MAX_LOWER_ENTRY
    if word_length <= 0:
        return MatrixOverF.identity(ctx)

    upper_gen = upper_ideal_generator(ctx)
    lower_gen = lower_ideal_generator(level).to_field()
    eps = ctx.fundamental_unit
    upper_choices = [ctx.element(1), ctx.element(-1), ctx.omega, -ctx.omega]
    lower_choices = [sign * eps ** k for k in range(-2, 3) for sign in (1, -1)]
    zero, one = ctx.field_element(0), ctx.field_element(1)

    length = word_length
    while length > 0:
        for _ in range(_MAX_ATTEMPTS):
            gamma = twist_matrix(level, _random_unit(level, rng), rng.choice(lower_choices))
            for _ in range(length - 1):
                if rng.random() < 0.5:
                    beta = upper_gen * rng.choice(upper_choices)
                    factor_matrix = MatrixOverF(one, beta, zero, one)
                else:
                    lam = lower_gen * rng.choice(lower_choices)
                    factor_matrix = MatrixOverF(one, zero, lam, one)
                gamma = gamma * factor_matrix
            if gamma.max_lower_entry() <= cap:
                if not in_gamma(gamma, level):
                    raise MembershipError(f"sampled word {gamma} is not in Γ_𝔠")
                return gamma
        logger.debug(f"No word of length {length} below the lower-entry cap {cap}; shortening")
        length -= 1
    raise VerificationError(f"no word in Γ_{level} of length ≤ {word_length} has lower entries below {cap}")


def sample_point(gamma: MatrixOverF, rng: random.Random) -> UpperHalfPoint:
    """z with Im zⱼ ≈ 1/|cⱼ| near −dⱼ/cⱼ, so Im z and Im γz are comparable"""
    points = []
    for j in (0, 1):
        _, _, c, d = gamma.embedding(j)
        if abs(c) < 1e-12:
            points.append(complex(rng.uniform(-1, 1), rng.uniform(0.5, 1.5)))
            continue
        s = rng.uniform(0.8, 1.25)
        x = -d / c + rng.uniform(-0.25, 0.25) * s / abs(c)
        points.append(complex(x, s / abs(c)))
    return UpperHalfPoint(tuple(points))


def modularity_samples(level: RingElement, samples: int, seed: int = 0,
                       word_length: int = 6) -> List[Tuple[MatrixOverF, UpperHalfPoint]]:
    rng = random.Random(seed)
    result = []
    for _ in range(samples):
        gamma = random_gamma(level, rng.randint(1, word_length), rng)
        result.append((gamma, sample_point(gamma, rng)))
    return result


def modularity_box(sample_list: Sequence[Tuple[MatrixOverF, UpperHalfPoint]], tol: float,
                   coeff_bound: float = 2.0) -> Tuple[Fraction, Fraction]:
    """Box making every evaluation tail at z and γz at most tol/10"""
    points = [p for gamma, z in sample_list for p in (z, gamma.act(z))]
    return required_box(points, tol / 10, coeff_bound)


@dataclass
class ModularityResult:
    max_deviation: float
    samples: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tol


def verify_modularity(f: FourierExpansion, psi: DirichletCharacter, level: RingElement,
                      samples: Union[int, Sequence[Tuple[MatrixOverF, UpperHalfPoint]]] = 20,
                      tol: float = 1e-6, seed: int = 0, word_length: int = 6,
                      threads: Optional[int] = None) -> ModularityResult:
    """max over sampled (γ, z) of |h(γ,z)⁻¹ f(γz) − ψ(a_γ) f(z)|"""
    sample_list = (modularity_samples(level, samples, seed, word_length)
                   if isinstance(samples, int) else list(samples))
    evaluator = ExpansionEvaluator(f)
    ctx = level.ctx

    def deviation(sample) -> float:
        gamma, z = sample
        image = gamma.act(z)
        h = h_ratio(gamma, z, floor=0.0).value
        character = psi(gamma.a.to_ring()).to_complex()
        lhs = evaluator(image, tol=tol / 10) / h
        rhs = character * evaluator(z, tol=tol / 10)
        return abs(lhs - rhs)

    threads = threads or get_settings().THREADS
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            deviations = list(executor.map(deviation, sample_list))
    else:
        deviations = [deviation(sample) for sample in sample_list]
    worst = max(deviations, default=0.0)
    logger.info(f"Modularity of {f.label or 'f'} at level {level} over d={ctx.d}: max deviation {worst:.3g}")
    return ModularityResult(worst, len(sample_list), tol)


# ---------------------------------------------------------------------------
# W(c) and the W₀ anchor


Evaluable = Union[FourierExpansion, Callable[[UpperHalfPoint], complex]]


def w_image(ctx: FieldContext, level: RingElement, z: UpperHalfPoint) -> UpperHalfPoint:
    """−4/(cδ²z) componentwise"""
    scale = (level * ctx.different_gen * ctx.different_gen).embeddings()
    return UpperHalfPoint(tuple(-4 / (s * w) for s, w in zip(scale, z.z)))


def w_fixed_point(ctx: FieldContext, level: RingElement) -> UpperHalfPoint:
    scale = (level * ctx.different_gen * ctx.different_gen).embeddings()
    return UpperHalfPoint(tuple(2j / math.sqrt(s) for s in scale))


def w_operator_eval(f: Evaluable, level: RingElement, z: UpperHalfPoint,
                    floor: Optional[float] = None, tol: float = 1e-12) -> complex:
    """(f | W(c))(z) = (−iz)^{−½} N(δ²c/4)^{−¼} f(−4/(cδ²z))"""
    ctx = level.ctx
    floor = floor if floor is not None else get_settings().EVAL_FLOOR
    z.check(floor)
    image = w_image(ctx, level, z)
    image.check(floor)
    if isinstance(f, FourierExpansion):
        value = ExpansionEvaluator(f)(image, tol=tol, floor=floor)
    else:
        value = f(image)
    norm = float((ctx.different_gen * ctx.different_gen * level).norm()) / 16
    scale = norm ** -0.25
    for w in z.z:
        scale /= cmath.sqrt(-1j * w)
    return scale * value


def w0_anchor(ctx: FieldContext, z: UpperHalfPoint, floor: Optional[float] = None) -> Tuple[complex, complex]:
    """(θ(W₀z)/θ(z), (−iz)^½·N(δ)^½)"""
    image = w0_matrix(ctx).act(z)
    lowest = min(z.y_min, image.y_min)
    floor = floor if floor is not None else min(get_settings().EVAL_FLOOR, lowest)
    ratio = theta_eval(ctx, image, floor=floor) / theta_eval(ctx, z, floor=floor)
    expected = math.sqrt(ctx.different_gen.norm())
    for w in z.z:
        expected *= cmath.sqrt(-1j * w)
    return ratio, expected


# ---------------------------------------------------------------------------
# L-series


def partial_L(f: FourierExpansion, s: complex, norm_bound: int) -> complex:
    """Σ_{N(I) ≤ B} a(I)·N(I)^{−s}"""
    total = 0j
    for x in ideals_up_to_norm(f.ctx, norm_bound):
        coefficient = coeff_at_ideal(f, x)
        if not coefficient.is_zero():
            total += coefficient.to_complex() * complex(x.norm()) ** (-s)
    return total


def euler_partial(psi: DirichletCharacter, s: complex, norm_bound: int) -> complex:
    """∏_{N(𝔭) ≤ B} (1 − ψ*(𝔭)·N(𝔭)^{−2s})^{−1}"""
    ctx = psi.modulus.ctx
    product = 1 + 0j
    for p in primes_up_to_norm(ctx, norm_bound):
        value = ideal_char_value(psi, p)
        if value.is_zero():
            continue
        product /= 1 - value.to_complex() * complex(p.norm()) ** (-2 * s)
    return product
