"""
Parsing of command-line element, level, character, box and prime specs
"""
import logging
import re
from fractions import Fraction
from typing import List, Tuple

from exceptions import HMFError, SpecParseError
from services.field_arith import (
    FieldContext,
    RingElement,
    canonical_ideal_generator,
    factor,
    level_power,
)
from services.residue_chars import (
    DirichletCharacter,
    epsilon_of,
    epsilon_two_prime,
    unit_group,
)

logger = logging.getLogger(__name__)

_COORDS = re.compile(r"^\s*(-?\d+)\s*,\s*(-?\d+)\s*$")
_Q_POWER = re.compile(r"^q\^(\d+)$")
# one summand: optional integer coefficient, then an optional q, q^k or w
_TERM = re.compile(r"([+-]?)(\d*)\*?(q(?:\^(\d+))?|w)?")


def _parse_expression(ctx: FieldContext, text: str) -> RingElement:
    """Sums like 3+q, 1-2w, 4q^2 with q the prime above 2 and w = ω"""
    compact = text.replace(" ", "")
    if not compact:
        raise SpecParseError("empty element spec")
    total = ctx.zero
    position = 0
    while position < len(compact):
        match = _TERM.match(compact, position)
        if match is None or match.end() == position:
            raise SpecParseError(f"cannot parse {text!r} at position {position}")
        sign, digits, symbol, power = match.groups()
        if not digits and not symbol:
            raise SpecParseError(f"dangling sign in {text!r}")
        coefficient = int(digits) if digits else 1
        if sign == "-":
            coefficient = -coefficient
        if symbol is None:
            term = ctx.element(coefficient)
        elif symbol == "w":
            term = ctx.omega * coefficient
        else:
            term = ctx.two_prime() ** (int(power) if power else 1) * coefficient
        total = total + term
        position = match.end()
    return total


def parse_element(ctx: FieldContext, text: str) -> RingElement:
    """'a,b' coordinates, 'q^n', or a sum of integer multiples of 1, w and powers of q"""
    text = text.strip()
    try:
        coords = _COORDS.match(text)
        if coords:
            return ctx.element(int(coords.group(1)), int(coords.group(2)))
        power = _Q_POWER.match(text)
        if power:
            return level_power(ctx, int(power.group(1)))
        return _parse_expression(ctx, text)
    except HMFError:
        raise
    except (ValueError, TypeError) as e:
        raise SpecParseError(f"invalid element spec {text!r}: {e}")


def parse_level(ctx: FieldContext, text: str) -> RingElement:
    level = parse_element(ctx, text)
    if level.is_zero():
        raise SpecParseError("the level must be nonzero")
    return canonical_ideal_generator(level)


def parse_character(ctx: FieldContext, text: str) -> DirichletCharacter:
    """'trivial', 'phi', 'eps:<element>' or 'exp:<a,b>:<e1,e2,...>'"""
    text = text.strip()
    if text == "trivial":
        return DirichletCharacter.trivial(ctx)
    if text == "phi":
        return epsilon_two_prime(ctx)
    if text.startswith("eps:"):
        return epsilon_of(parse_element(ctx, text[4:]))
    if text.startswith("exp:"):
        parts = text[4:].split(":")
        if len(parts) != 2:
            raise SpecParseError(f"character spec {text!r} must read exp:<a,b>:<e1,...>")
        group = unit_group(parse_element(ctx, parts[0]))
        try:
            exponents = [int(e) for e in parts[1].split(",") if e.strip()]
        except ValueError:
            raise SpecParseError(f"invalid exponents in {text!r}")
        if len(exponents) != len(group.orders):
            raise SpecParseError(
                f"modulus {group.modulus} has {len(group.orders)} generators, got {len(exponents)} exponents"
            )
        return DirichletCharacter.from_exponents(group, exponents)
    raise SpecParseError(f"unknown character spec {text!r}")


def parse_box(text: str) -> Tuple[Fraction, Fraction]:
    """'X' for a square box or 'X1,X2'"""
    try:
        parts = [Fraction(p.strip()) for p in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise SpecParseError(f"invalid box {text!r}")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2 or parts[0] <= 0 or parts[1] <= 0:
        raise SpecParseError(f"box {text!r} needs one or two positive bounds")
    return parts[0], parts[1]


def parse_primes(ctx: FieldContext, text: str) -> List[RingElement]:
    """Comma-separated element expressions, each normalized to a canonical prime generator"""
    primes = []
    for item in text.split(","):
        if not item.strip():
            continue
        x = _parse_expression(ctx, item)
        if x.is_zero() or x.is_unit() or [e for _, e in factor(x).factors] != [1]:
            raise SpecParseError(f"{item!r} is not a prime element")
        primes.append(canonical_ideal_generator(x))
    return primes
