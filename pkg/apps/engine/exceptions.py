"""
Typed errors raised by the engine and their CLI exit codes
"""
from typing import Dict, Type


class HMFError(Exception):
    """Base class for every error raised by the engine"""


class CatalogError(HMFError):
    """Field is not in the vetted narrow-class-number-one catalog"""


class UnitSignError(CatalogError):
    """Fundamental unit has norm +1, so the narrow class number exceeds 1"""


class PositivityError(HMFError):
    """An element required to be totally positive is not"""


class NotSquarefreeError(HMFError):
    """An element required to be squarefree is divisible by a prime square"""


class EvenPrimeError(HMFError):
    """A prime lying over 2 was passed where an odd prime is required"""


class BoxTooSmallError(HMFError):
    """A coefficient outside the truncation box was requested"""


class WellDefinednessError(HMFError):
    """Coefficients are not invariant under squared units"""


class LevelError(HMFError):
    """Level is not divisible by 4 or is otherwise unusable"""


class HypothesisError(HMFError):
    """Level divisible by a split prime; the basis theorem does not apply"""


class MembershipError(HMFError):
    """Matrix does not belong to the required congruence group"""


class ConvergenceError(HMFError):
    """Evaluation point lies below the configured floor"""


class DegenerateError(HMFError):
    """Closed-form automorphy factor is not applicable (c = 0)"""


class SymbolError(HMFError):
    """A quadratic symbol that must be a unit vanished"""


class SpecParseError(HMFError):
    """A command-line level, character or element spec could not be parsed"""


class VerificationError(HMFError):
    """A verification suite reported a failure"""


EXIT_CODES: Dict[Type[HMFError], int] = {
    CatalogError: 2,
    SpecParseError: 2,
    HypothesisError: 3,
    LevelError: 3,
    VerificationError: 1,
}


def exit_code_for(error: HMFError) -> int:
    """Map an error to the CLI exit code (most specific class wins)"""
    for klass in type(error).__mro__:
        if klass in EXIT_CODES:
            return EXIT_CODES[klass]
    return 4
