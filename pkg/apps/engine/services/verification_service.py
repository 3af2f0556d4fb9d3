"""
Verification Service: named suites behind `verify`

Each suite runs a family of exact or certified-numerical checks and returns
a SuiteResult with the number of checks, the failures in order, and a
details table for reporting.
"""
import logging
import math
import random
import time
from datetime import datetime
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

from config import get_settings
from exceptions import HMFError, VerificationError
from models.schemas import SuiteName, SuiteResult, VerificationReport
from services.analytic import (
    UpperHalfPoint,
    epsilon_tilde,
    euler_partial,
    gauss_sum_epsilon,
    h_garrett,
    h_ratio,
    modularity_box,
    modularity_samples,
    partial_L,
    random_gamma,
    sample_point,
    theta_eval,
    verify_modularity,
    w0_anchor,
    w_fixed_point,
    w_operator_eval,
)
from services.basis_builder import OmegaPair, newform_candidate, omega_set, sqrt2_dimension_table
from services.field_arith import (
    RingElement,
    canonical_box,
    canonical_ideal_generator,
    factor,
    ideals_up_to_norm,
    level_power,
    make_field,
    primes_up_to_norm,
)
from services.qexp import (
    coeff_at_ideal,
    hecke_eigenvalue,
    newform_power_law_check,
    op_T_p2,
    theta_chi_t,
)
from services.residue_chars import (
    DirichletCharacter,
    char_equal,
    characters_trivial_on_units,
    epsilon_t,
    epsilon_two_prime,
    ideal_char_value,
    unit_group,
)
from services.serialization import pair

logger = logging.getLogger(__name__)


class _Recorder:
    """Collects check outcomes for one suite"""

    def __init__(self, suite: SuiteName):
        self.suite = suite
        self.checks = 0
        self.failures: List[str] = []
        self.details: Dict[str, Any] = {}
        self.started_at = datetime.now()
        self._clock = time.perf_counter()

    def check(self, condition: bool, message: str) -> bool:
        self.checks += 1
        if not condition:
            logger.warning(f"[{self.suite.value}] {message}")
            self.failures.append(message)
        return condition

    def fail(self, message: str) -> None:
        self.check(False, message)

    def result(self) -> SuiteResult:
        return SuiteResult(
            suite=self.suite,
            passed=not self.failures,
            checks=self.checks,
            failures=self.failures,
            details=self.details,
            started_at=self.started_at,
            duration_seconds=time.perf_counter() - self._clock,
        )


class VerificationService:
    """Runs verification suites over Q(√d)"""

    def __init__(self, d: int = 2, seed: int = 0, threads: Optional[int] = None):
        self.ctx = make_field(d)
        self.seed = seed
        self.threads = threads or get_settings().THREADS
        self._suites: Dict[SuiteName, Callable[..., SuiteResult]] = {
            SuiteName.UNIT_GROUPS: self.unit_groups,
            SuiteName.DIMENSIONS: self.dimensions,
            SuiteName.HECKE_EIGEN: self.hecke_eigen,
            SuiteName.MODULARITY: self.modularity,
            SuiteName.GAUSS_SUM: self.gauss_sum,
            SuiteName.L_COEFF: self.l_coeff,
        }

    def run(self, suite: SuiteName, **options) -> SuiteResult:
        suite = SuiteName(suite)
        logger.info(f"Running suite {suite.value} over d={self.ctx.d} with {options}")
        return self._suites[suite](**options)

    def run_all(self, **options) -> List[SuiteResult]:
        return [self.run(name, **options) for name in SuiteName]

    # -- unit groups and characters --------------------------------------

    def unit_groups(self, n_max: int = 16, **_) -> SuiteResult:
        """(R/qⁿ)ˣ structure and the even quadratic characters over Q(√2)"""
        rec = _Recorder(SuiteName.UNIT_GROUPS)
        ctx = make_field(2)
        q = ctx.two_prime()
        # the classes 1 + √2 and 3 + 4√2 use the uniformizer √2 of the prime above 2
        uniformizer = ctx.sqrt_d
        phi = epsilon_two_prime(ctx)
        rows = []
        try:
            rec.check(char_equal(phi, epsilon_t(q)), "phi differs from epsilon_t(2+sqrt2)")
            rec.check(phi.conductor == level_power(ctx, 5), f"conductor of phi is {phi.conductor}, not q^5")
            for n in range(1, n_max + 1):
                c = level_power(ctx, n)
                group = unit_group(c)
                invariants = [m for m in group.cyclic_orders() if m > 1]
                rows.append({"n": n, "order": group.order, "invariants": invariants})
                rec.check(group.order == 2 ** (n - 1), f"n={n}: |(R/q^n)^x| = {group.order}")
                if n <= 4:
                    rec.check(group.is_generated_by_units(), f"n={n}: not generated by unit images")
                    continue
                rec.check(group.element_order(uniformizer + 1) == 2 ** (n // 2), f"n={n}: order of 1+q")
                rec.check(group.element_order(uniformizer * 4 + 3) == 2 ** ((n - 3) // 2), f"n={n}: order of 3+4q")
                expected = sorted([2 ** (n // 2), 2 ** ((n - 3) // 2), 2], reverse=True)
                rec.check(invariants == [m for m in expected if m > 1],
                          f"n={n}: invariants {invariants}, expected {expected}")
                quadratic = characters_trivial_on_units(c, order_divides=2)
                nontrivial = [chi for chi in quadratic if not chi.is_trivial()]
                rec.check(len(quadratic) == 2 and len(nontrivial) == 1 and char_equal(nontrivial[0], phi),
                          f"n={n}: even quadratic characters are not exactly {{1, phi}}")
        except HMFError as e:
            rec.fail(f"{type(e).__name__}: {e}")
        rec.details["rows"] = rows
        return rec.result()

    # -- dimensions ------------------------------------------------------

    def dimensions(self, n_max: int = 16, n_min: int = 4, **_) -> SuiteResult:
        rec = _Recorder(SuiteName.DIMENSIONS)
        try:
            rows = sqrt2_dimension_table(n_max, n_min=n_min, threads=self.threads)
        except VerificationError as e:
            rec.fail(str(e))
            return rec.result()
        for row in rows:
            rec.check(row.trivial_count == row.trivial_formula, f"n={row.n}: trivial count")
            rec.check(row.phi_count == row.phi_formula, f"n={row.n}: phi count")
        rec.details["rows"] = [
            {
                "n": row.n,
                "trivial": row.trivial_count,
                "phi": row.phi_count,
                "trivial_pairs": [p.describe() for p in row.trivial_pairs],
                "phi_pairs": [p.describe() for p in row.phi_pairs],
            }
            for row in rows
        ]
        return rec.result()

    # -- Hecke eigenvalues -----------------------------------------------

    @staticmethod
    def _hecke_box(p: RingElement, t: RingElement):
        p1, p2 = p.embeddings()
        t1, t2 = t.embeddings()
        return Fraction(math.ceil(p1 * p1 * (t1 + 4))), Fraction(math.ceil(p2 * p2 * (t2 + 4)))

    def hecke_eigen(self, primes: Optional[Sequence[RingElement]] = None, n_min: int = 5,
                    n_max: int = 16, norm_bound: int = 50, **_) -> SuiteResult:
        """θ_{χ,t} | T_{p²} = ψ*(p)(t/p)(1 + N(p)⁻¹)·θ_{χ,t} on every basis element

        Without explicit primes every prime of norm ≤ norm_bound not dividing the level is used.
        """
        rec = _Recorder(SuiteName.HECKE_EIGEN)
        ctx = self.ctx
        explicit = list(primes) if primes is not None else None
        all_primes = primes_up_to_norm(ctx, norm_bound)
        characters = [DirichletCharacter.trivial(ctx), epsilon_two_prime(ctx)]
        table = []
        try:
            for n in range(n_min, n_max + 1):
                c = level_power(ctx, n)
                primes = explicit if explicit is not None else [p for p in all_primes if not p.divides(c)]
                for psi in characters:
                    for omega in omega_set(c, psi):
                        for p in primes:
                            if p.divides(c):
                                rec.fail(f"{p} divides the level {c}")
                                continue
                            f = theta_chi_t(omega.chi, omega.t, self._hecke_box(p, omega.t))
                            expected = hecke_eigenvalue(omega.chi, omega.t, p)
                            image = op_T_p2(f, p, psi, c)
                            rec.check((image - f.scale(expected)).is_zero(),
                                      f"q^{n}, {omega.describe()}, p={p}: not an eigenform with {expected}")
                            table.append({"level": f"q^{n}", "pair": omega.describe(),
                                          "p": str(p), "eigenvalue": str(expected)})
        except HMFError as e:
            rec.fail(f"{type(e).__name__}: {e}")
        rec.details["eigenvalues"] = table
        return rec.result()

    # -- modularity ------------------------------------------------------

    def _modularity_cases(self, n_min: int = 4, n_max: int = 16):
        """Every distinct basis element of M(qⁿ, ψ), ψ ∈ {1, φ}, at the first level emitting it

        Γ_{qⁿ} contains Γ_{qᵐ} for m > n, so the check at the first level covers the later ones.
        """
        ctx = self.ctx
        trivial = DirichletCharacter.trivial(ctx)
        phi = epsilon_two_prime(ctx)
        # (label, χ, t, level, ψ, should pass)
        cases = []
        seen: List[OmegaPair] = []
        for n in range(n_min, n_max + 1):
            level = level_power(ctx, n)
            for psi in (trivial, phi):
                for omega in omega_set(level, psi):
                    if any(o.t == omega.t and char_equal(o.chi, omega.chi) for o in seen):
                        continue
                    seen.append(omega)
                    cases.append((f"theta{omega.describe()} at q^{n}", omega.chi, omega.t, level, psi, True))
        cases.append(("theta(1, 1) vs phi", trivial, ctx.one, level_power(ctx, 14), phi, False))
        return cases

    def modularity(self, samples: int = 20, tol: float = 1e-6, word_length: int = 6,
                   control_gap: float = 1e-2, n_min: int = 4,
                   n_max: int = 16, **_) -> SuiteResult:
        """|h(γ,z)⁻¹ f(γz) − ψ(a_γ) f(z)| over sampled (γ, z), with a wrong-character control"""
        rec = _Recorder(SuiteName.MODULARITY)
        reports = []
        try:
            for label, chi, t, level, psi, should_pass in self._modularity_cases(n_min, n_max):
                sample_list = modularity_samples(level, samples, self.seed, word_length)
                box = modularity_box(sample_list, tol)
                f = theta_chi_t(chi, t, box)
                outcome = verify_modularity(f, psi, level, sample_list, tol=tol, threads=self.threads)
                reports.append(VerificationReport(
                    form=label, level=pair(level), character=str(psi), samples=outcome.samples,
                    max_deviation=outcome.max_deviation, tol=tol, passed=outcome.passed,
                ).model_dump(by_alias=True))
                if should_pass:
                    rec.check(outcome.passed, f"{label}: deviation {outcome.max_deviation:.3g} >= {tol:g}")
                else:
                    rec.check(outcome.max_deviation >= control_gap,
                              f"{label}: control deviation {outcome.max_deviation:.3g} < {control_gap:g}")
        except HMFError as e:
            rec.fail(f"{type(e).__name__}: {e}")
        rec.details["forms"] = reports
        return rec.result()

    # -- automorphy factor -----------------------------------------------

    def gauss_sum(self, samples: int = 50, word_length: int = 4, **_) -> SuiteResult:
        """Gauss-sum unitarity, closed form against θ(γz)/θ(z), the W₀ anchor and W(4)²"""
        rec = _Recorder(SuiteName.GAUSS_SUM)
        ctx = self.ctx
        rng = random.Random(self.seed)
        level = level_power(ctx, 4)
        worst = {"unitarity": 0.0, "closed_form": 0.0, "anchor": 0.0, "involution": 0.0}
        try:
            for a in range(-5, 6):
                for b in range(-5, 6):
                    d = ctx.element(a, b)
                    if d.is_zero() or math.gcd(d.norm(), 2 * ctx.discriminant) != 1:
                        continue
                    deviation = abs(abs(gauss_sum_epsilon(ctx, d) * epsilon_tilde(d)) - 1)
                    worst["unitarity"] = max(worst["unitarity"], deviation)
                    rec.check(deviation < 1e-10, f"|eps({d})·eps~({d})| - 1 = {deviation:.3g}")

            checked = 0
            while checked < samples:
                gamma = random_gamma(level, rng.randint(1, word_length), rng)
                if gamma.c.is_zero():
                    continue
                z = sample_point(gamma, rng)
                deviation = abs(h_garrett(gamma, z).value - h_ratio(gamma, z, floor=0.0).value)
                worst["closed_form"] = max(worst["closed_form"], deviation)
                rec.check(deviation < 1e-8, f"closed form differs from the theta ratio by {deviation:.3g} at {gamma}")
                checked += 1

            center = w_fixed_point(ctx, level)
            for _ in range(5):
                z = center.translate((rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)))
                z = UpperHalfPoint(tuple(complex(w.real, abs(w.imag) + 0.05) for w in z.z))
                ratio, expected = w0_anchor(ctx, z, floor=0.0)
                worst["anchor"] = max(worst["anchor"], abs(ratio - expected))
                rec.check(abs(ratio - expected) < 1e-8, f"W0 anchor off by {abs(ratio - expected):.3g} at {z}")

                def theta(w: UpperHalfPoint) -> complex:
                    return theta_eval(ctx, w, floor=0.0)

                twice = w_operator_eval(lambda w: w_operator_eval(theta, level, w, floor=0.0), level, z, floor=0.0)
                deviation = abs(twice - theta(z))
                worst["involution"] = max(worst["involution"], deviation)
                rec.check(deviation < 1e-8, f"W(4) is not an involution at {z}: {deviation:.3g}")
        except HMFError as e:
            rec.fail(f"{type(e).__name__}: {e}")
        rec.details["max_deviation"] = worst
        return rec.result()

    # -- newform coefficients and L-series -------------------------------

    def l_coeff(self, norm_bound: int = 100, s: float = 2.0, l_bound: int = 400,
                euler_bound: int = 20, **_) -> SuiteResult:
        """½θ_ψ: a(1) = 1, a(L²) = ψ*(L), zero off squares, T vanishing at the level, L-series"""
        rec = _Recorder(SuiteName.L_COEFF)
        ctx = self.ctx
        bound = max(norm_bound, l_bound)
        X = math.ceil(canonical_box(ctx, bound)) + 1
        q = ctx.two_prime()
        odd_prime = next(p for p in primes_up_to_norm(ctx, 50) if p.norm() % 2)
        values = []
        for psi in (DirichletCharacter.trivial(ctx), epsilon_two_prime(ctx)):
            try:
                f = newform_candidate(psi, box=(X, X))
                rec.check(f[ctx.one] == 1, f"a(1) = {f[ctx.one]} for {psi}")
                for x in ideals_up_to_norm(ctx, norm_bound):
                    exponents = factor(x).factors
                    if all(e % 2 == 0 for _, e in exponents):
                        root = ctx.one
                        for prime, e in exponents:
                            root = root * prime ** (e // 2)
                        expected = ideal_char_value(psi, canonical_ideal_generator(root))
                    else:
                        expected = 0
                    rec.check(coeff_at_ideal(f, x) == expected, f"a({x}) != {expected} for {psi}")
                c = f.level
                if (q ** 5).divides(c):
                    rec.check(op_T_p2(f, q, psi, c).is_zero(), f"T(q^2) does not vanish for {psi}")
                rec.checks += newform_power_law_check(f, odd_prime, psi, k_max=1)
                partial = partial_L(f, s, l_bound)
                euler = euler_partial(psi, s, euler_bound)
                difference = abs(partial - euler)
                rec.check(difference < 1e-3, f"partial L and Euler product differ by {difference:.3g} for {psi}")
                values.append({"character": str(psi), "partial_L": [partial.real, partial.imag],
                               "euler": [euler.real, euler.imag], "difference": difference})
            except HMFError as e:
                rec.fail(f"{psi}: {type(e).__name__}: {e}")
        rec.details["lseries"] = values
        return rec.result()


def get_verification_service(d: int = 2, seed: int = 0, threads: Optional[int] = None) -> VerificationService:
    return VerificationService(d=d, seed=seed, threads=threads)
