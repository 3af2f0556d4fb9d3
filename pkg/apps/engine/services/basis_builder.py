"""
Theta-series bases of M(c, ψ) for non-split levels

For a level c with 4 | c and a character ψ trivial on units, the pairs
(χ, t) with 4·r(χ)²·t | c and ψ = χ·ε_t index a basis {θ_{χ,t}}.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from config import get_settings
from exceptions import BoxTooSmallError, HypothesisError, LevelError, VerificationError
from services.field_arith import (
    FieldContext,
    RingElement,
    canonical_ideal_generator,
    canonical_rep_mod_squared_units,
    divisors_up_to_units,
    factor,
    in_box,
    is_nonsplit,
    level_power,
    make_field,
)
from services.linear_algebra import fraction_free_rank
from services.qexp import FourierExpansion, make_box, theta_chi_t
from services.residue_chars import (
    DirichletCharacter,
    char_equal,
    char_mul,
    characters_trivial_on_units,
    epsilon_of,
    epsilon_two_prime,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OmegaPair:
    """(χ, t): χ primitive and trivial on units, t a canonical representative of R⁺/U²"""

    chi: DirichletCharacter
    t: RingElement

    @property
    def prime_count(self) -> int:
        return sum(e for _, e in factor(self.t).factors)

    def describe(self) -> str:
        name = "1" if self.chi.is_trivial() else f"chi mod {self.chi.modulus}"
        return f"({name}, {self.t})"


@dataclass
class BasisReport:
    level: RingElement
    character: DirichletCharacter
    pairs: List[OmegaPair]
    expansions: List[FourierExpansion] = field(default_factory=list)
    pivots: List[RingElement] = field(default_factory=list)
    certificate: str = "pivot"

    @property
    def dimension(self) -> int:
        return len(self.pairs)


def _require_level(c: RingElement) -> RingElement:
    c = canonical_ideal_generator(c)
    if not c.ctx.element(4).divides(c):
        raise LevelError(f"level {c} is not divisible by 4")
    return c


def _divides(x: RingElement, y: RingElement) -> bool:
    return x.divides(y)


def omega_set(c: RingElement, psi: DirichletCharacter) -> List[OmegaPair]:
    """Ω(c, ψ) in deterministic order (Ω(t), norm of t, then characters)"""
    c = _require_level(c)
    if not psi.is_trivial_on_units():
        raise HypothesisError(f"{psi} is not trivial on the units of R")
    ctx = c.ctx
    four = ctx.element(4)

    pairs: List[OmegaPair] = []
    for r in divisors_up_to_units(c):
        bound = four * r * r
        if not _divides(bound, c):
            continue
        cofactor = c.exact_div(bound)
        characters = [chi for chi in characters_trivial_on_units(r) if chi.conductor == r]
        if not characters:
            continue
        for t in divisors_up_to_units(cofactor):
            eps = epsilon_of(t)
            for chi in characters:
                if char_equal(psi, char_mul(chi, eps)):
                    pairs.append(OmegaPair(chi, t))

    for pair in pairs:
        _verify_pair(pair, c, psi)
    pairs.sort(key=lambda p: (p.prime_count, p.t.norm(), p.t.sort_key(), p.chi.modulus.norm(), p.chi.exponents))
    logger.info(f"Omega({c}, {psi}) has {len(pairs)} pairs")
    return pairs


def _verify_pair(pair: OmegaPair, c: RingElement, psi: DirichletCharacter) -> None:
    chi, t = pair.chi, pair.t
    if not chi.is_trivial_on_units():
        raise VerificationError(f"{chi} is not trivial on units")
    if canonical_rep_mod_squared_units(t) != t:
        raise VerificationError(f"{t} is not a canonical representative")
    r = chi.conductor
    if not _divides(t.ctx.element(4) * r * r * t, c):
        raise VerificationError(f"4·r(χ)²·t does not divide {c} for {pair.describe()}")
    if not char_equal(psi, char_mul(chi, epsilon_of(t))):
        raise VerificationError(f"χ·ε_t differs from ψ for {pair.describe()}")


def _default_box(pairs: Sequence[OmegaPair]) -> Tuple[Fraction, Fraction]:
    X1, X2 = 4.0, 4.0
    for pair in pairs:
        t1, t2 = pair.t.embeddings()
        X1, X2 = max(X1, t1), max(X2, t2)
    return Fraction(math.ceil(X1) + 1), Fraction(math.ceil(X2) + 1)


def _build_expansions(pairs: Sequence[OmegaPair], box, threads: int) -> List[FourierExpansion]:
    def build(pair: OmegaPair) -> FourierExpansion:
        return theta_chi_t(pair.chi, pair.t, box)

    if threads <= 1 or len(pairs) <= 1:
        return [build(pair) for pair in pairs]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(build, pairs))


def _pivot_certificate(pairs: Sequence[OmegaPair], expansions: Sequence[FourierExpansion]) -> bool:
    """Coefficient 2 at ξ = tᵢ on the diagonal and zeros above it"""
    for i, pair in enumerate(pairs):
        if expansions[i][pair.t] != 2:
            return False
        for j in range(i + 1, len(pairs)):
            if not expansions[j][pair.t].is_zero():
                return False
    return True


def _rank_certificate(expansions: Sequence[FourierExpansion]) -> int:
    keys = sorted({xi for f in expansions for xi in f.coeffs}, key=RingElement.sort_key)
    rows = [[f.get(xi) for xi in keys] for f in expansions]
    return fraction_free_rank(rows)


def basis(c: RingElement, psi: DirichletCharacter, box=None, threads: Optional[int] = None) -> BasisReport:
    """Theta basis of M(c, ψ) with an exact independence certificate"""
    c = canonical_ideal_generator(c)
    if not is_nonsplit(c):
        raise HypothesisError(
            f"level {c} is divisible by a split prime; the theta basis is only established "
            f"when every prime dividing the level is the unique prime above its rational prime"
        )
    c = _require_level(c)
    pairs = omega_set(c, psi)
    report = BasisReport(level=c, character=psi, pairs=pairs)
    if not pairs:
        return report

    box = make_box(*box) if box is not None else _default_box(pairs)
    for pair in pairs:
        if not in_box(pair.t, box):
            raise BoxTooSmallError(f"pivot {pair.t} of {pair.describe()} lies outside the box")

    threads = threads or get_settings().THREADS
    report.expansions = _build_expansions(pairs, box, threads)

    if _pivot_certificate(pairs, report.expansions):
        report.pivots = [pair.t for pair in pairs]
        report.certificate = "pivot"
    else:
        logger.warning(f"Pivot certificate stalled at level {c}; falling back to exact rank")
        rank = _rank_certificate(report.expansions)
        if rank != len(pairs):
            raise VerificationError(f"theta series at level {c} have rank {rank} < {len(pairs)}")
        report.certificate = "rank"
    logger.info(f"Basis of M({c}, {psi}): dimension {report.dimension}, certificate {report.certificate}")
    return report


def newform_candidate(psi: DirichletCharacter, box=(30, 30)) -> FourierExpansion:
    """½·θ_{ψ,1} at level 4·r(ψ)²"""
    primitive = psi.primitive()
    ctx = primitive.modulus.ctx
    f = theta_chi_t(primitive, ctx.one, box).scale(Fraction(1, 2))
    f.label = f"newform[{primitive}]"
    if f[ctx.one] != 1:
        raise VerificationError(f"normalized theta series has a(1) = {f[ctx.one]}")
    return f


# ---------------------------------------------------------------------------
# Q(√2) dimension table


def dimension_trivial(n: int) -> int:
    return (n - 2) // 2 + max((n - 13) // 2, 0)


def dimension_phi(n: int) -> int:
    return (n - 3) // 2 + max((n - 12) // 2, 0)


@dataclass
class DimensionRow:
    n: int
    trivial_formula: int
    trivial_pairs: List[OmegaPair]
    phi_formula: int
    phi_pairs: List[OmegaPair]

    @property
    def trivial_count(self) -> int:
        return len(self.trivial_pairs)

    @property
    def phi_count(self) -> int:
        return len(self.phi_pairs)


def _family(ctx: FieldContext, n: int, offset: int, times_u: bool, chi: DirichletCharacter):
    """{(χ, 2ᵏ·u^[times_u]) : 0 ≤ k ≤ ⌊(n − offset)/2⌋} as (is_trivial, t) keys"""
    q = ctx.two_prime()
    top = (n - offset) // 2
    base = 1 if times_u else 0
    return {(chi.is_trivial(), canonical_rep_mod_squared_units(q ** (2 * k + base))) for k in range(top + 1)}


def expected_pairs(ctx: FieldContext, n: int, phi: DirichletCharacter, psi_is_trivial: bool):
    trivial = DirichletCharacter.trivial(ctx)
    if psi_is_trivial:
        return _family(ctx, n, 4, False, trivial) | _family(ctx, n, 15, True, phi)
    return _family(ctx, n, 5, True, trivial) | _family(ctx, n, 14, False, phi)


def sqrt2_dimension_table(n_max: int, n_min: int = 4, threads: Optional[int] = None) -> List[DimensionRow]:
    """Closed-form dimensions over Q(√2) against |Ω(qⁿ, ψ)| for ψ ∈ {1, φ}"""
    ctx = make_field(2)
    trivial = DirichletCharacter.trivial(ctx)
    phi = epsilon_two_prime(ctx)

    def row(n: int) -> DimensionRow:
        c = level_power(ctx, n)
        return DimensionRow(
            n=n,
            trivial_formula=dimension_trivial(n),
            trivial_pairs=omega_set(c, trivial),
            phi_formula=dimension_phi(n),
            phi_pairs=omega_set(c, phi),
        )

    levels = list(range(n_min, n_max + 1))
    threads = threads or get_settings().THREADS
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            rows = list(executor.map(row, levels))
    else:
        rows = [row(n) for n in levels]

    for r in rows:
        if r.trivial_count != r.trivial_formula or r.phi_count != r.phi_formula:
            raise VerificationError(
                f"n={r.n}: |Omega| = ({r.trivial_count}, {r.phi_count}) but the formulas give "
                f"({r.trivial_formula}, {r.phi_formula})"
            )
        for pairs, is_trivial in ((r.trivial_pairs, True), (r.phi_pairs, False)):
            found = {(p.chi.is_trivial(), p.t) for p in pairs}
            if found != expected_pairs(ctx, r.n, phi, is_trivial):
                raise VerificationError(f"n={r.n}: pair list does not match the expected families")
    return rows
