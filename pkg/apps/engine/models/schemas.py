"""
Pydantic models for every JSON document the engine reads or writes
"""
import re
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")
_INTEGER = re.compile(r"^-?\d+$")


# Enums for tags
class OmegaKindTag(str, Enum):
    SQRT = "sqrt"
    HALF = "half"


class AutomorphyMethod(str, Enum):
    RATIO = "ratio"
    CLOSED_FORM = "closed-form"


class SuiteName(str, Enum):
    UNIT_GROUPS = "unit-groups"
    DIMENSIONS = "dimensions"
    HECKE_EIGEN = "hecke-eigen"
    MODULARITY = "modularity"
    GAUSS_SUM = "gauss-sum"
    L_COEFF = "l-coeff"


class HeckeOperator(str, Enum):
    T = "T"
    U = "U"
    V = "V"
    K = "K"
    H = "H"


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


# Arithmetic values
class RingElementModel(BaseModel):
    """Element a + bω as a pair of decimal strings plus field tag"""
    d: int = Field(..., gt=1)
    coords: Tuple[str, str]

    @field_validator("coords")
    @classmethod
    def validate_coords(cls, v):
        for c in v:
            if not _INTEGER.match(c):
                raise ValueError(f"coordinate {c!r} is not a decimal integer")
        return v


class CyclotomicModel(BaseModel):
    """Power-basis coefficients modulo the cyclotomic polynomial of the given order"""
    order: int = Field(..., ge=1)
    coeffs: List[str] = Field(..., min_length=1)

    @field_validator("coeffs")
    @classmethod
    def validate_coeffs(cls, v):
        for c in v:
            if not _RATIONAL.match(c):
                raise ValueError(f"coefficient {c!r} is not a rational 'p/q'")
        return v


class FieldContextModel(BaseModel):
    d: int = Field(..., gt=1)
    discriminant: int = Field(..., gt=0)
    omega_kind: OmegaKindTag
    fundamental_unit: Tuple[str, str]
    fundamental_unit_display: str
    different: Tuple[str, str]
    different_display: str
    two_prime: Optional[Tuple[str, str]] = None
    in_catalog: bool = True


class UnitGroupModel(BaseModel):
    d: int
    modulus: Tuple[str, str]
    order: int = Field(..., ge=1)
    generators: List[Tuple[str, str]]
    orders: List[int]
    unit_images: List[List[int]]
    generated_by_units: bool


class CharacterModel(BaseModel):
    """Character by exponents on the unit-group generators of its modulus"""
    d: int
    modulus: Tuple[str, str]
    generators: List[Tuple[str, str]]
    exponents: List[int]
    order: int = Field(..., ge=1)
    conductor: Optional[Tuple[str, str]] = None

    @field_validator("exponents")
    @classmethod
    def validate_exponents(cls, v, info):
        generators = info.data.get("generators")
        if generators is not None and len(generators) != len(v):
            raise ValueError("one exponent per generator is required")
        return v


# Expansions and bases
class CoefficientEntry(BaseModel):
    xi: Tuple[str, str]
    value: CyclotomicModel


class ExpansionModel(BaseModel):
    field: int = Field(..., gt=1)
    box: Tuple[str, str]
    level: Optional[Tuple[str, str]] = None
    character: Optional[CharacterModel] = None
    label: str = ""
    coeffs: List[CoefficientEntry] = Field(default_factory=list)

    @field_validator("box")
    @classmethod
    def validate_box(cls, v):
        for c in v:
            if not _RATIONAL.match(c) or c.startswith("-") or c in ("0", "0/1"):
                raise ValueError(f"box bound {c!r} must be a positive rational")
        return v


class OmegaPairModel(BaseModel):
    chi: CharacterModel
    t: Tuple[str, str]
    t_display: str


class BasisReportModel(BaseModel):
    d: int
    level: Tuple[str, str]
    level_display: str
    character: CharacterModel
    dimension: int = Field(..., ge=0)
    pairs: List[OmegaPairModel]
    pivots: List[Tuple[str, str]]
    certificate: str = Field(..., pattern=r"^(pivot|rank)$")
    expansion_refs: List[str] = Field(default_factory=list)


class DimensionRow(BaseModel):
    n: int
    trivial_formula: int
    trivial_count: int
    phi_formula: int
    phi_count: int
    trivial_pairs: List[str] = Field(default_factory=list)
    phi_pairs: List[str] = Field(default_factory=list)


# Reports
class HeckeReport(BaseModel):
    operator: HeckeOperator
    argument: Optional[Tuple[str, str]] = None
    ratio: Optional[CyclotomicModel] = None
    expected: Optional[CyclotomicModel] = None
    expansion: ExpansionModel


class LSeriesReport(BaseModel):
    s: float
    norm_bound: int = Field(..., ge=1)
    partial_value: Tuple[float, float]
    euler_value: Optional[Tuple[float, float]] = None
    difference: Optional[float] = None


class VerificationReport(BaseModel):
    form: str
    level: Tuple[str, str]
    character: str
    samples: int = Field(..., ge=0)
    max_deviation: float
    tol: float = Field(..., gt=0)
    passed: bool = Field(..., alias="pass")

    model_config = ConfigDict(populate_by_name=True)


class SuiteResult(BaseModel):
    suite: SuiteName
    passed: bool
    checks: int = Field(0, ge=0)
    failures: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    started_at: datetime
    duration_seconds: float = Field(0.0, ge=0)


class ErrorResponse(BaseModel):
    error: str
    message: str
    exit_code: int


class CommandConfig(BaseModel):
    """Parsed command-line configuration"""
    d: int = Field(2, gt=1)
    level: Optional[str] = Field(None, pattern=r"^[0-9qw^+\-*, ]+$")
    character: str = Field("trivial", pattern=r"^(trivial|phi|eps:.+|exp:.+)$")
    box: Tuple[float, float] = (30.0, 30.0)
    precision: int = Field(12, ge=4, le=60)
    seed: int = 0
    output: OutputFormat = OutputFormat.TEXT
    threads: int = Field(1, ge=1)

    @field_validator("box")
    @classmethod
    def validate_box(cls, v):
        if v[0] <= 0 or v[1] <= 0:
            raise ValueError("box bounds must be positive")
        return v
