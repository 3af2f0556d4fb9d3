"""
Conversion between engine objects and the pydantic document models
"""
import logging
from fractions import Fraction
from typing import Tuple

from exceptions import CatalogError, SpecParseError
from models.schemas import (
    CharacterModel,
    CoefficientEntry,
    CyclotomicModel,
    ExpansionModel,
    FieldContextModel,
    OmegaKindTag,
    RingElementModel,
    UnitGroupModel,
)
from services.cyclotomic import CyclotomicNumber
from services.field_arith import FieldContext, RingElement
from services.qexp import FourierExpansion
from services.residue_chars import DirichletCharacter, UnitGroupStructure, unit_group

logger = logging.getLogger(__name__)


def pair(x: RingElement) -> Tuple[str, str]:
    return str(x.a), str(x.b)


def element_from_pair(ctx: FieldContext, coords) -> RingElement:
    try:
        return ctx.element(int(coords[0]), int(coords[1]))
    except (TypeError, ValueError, IndexError) as e:
        raise SpecParseError(f"invalid element coordinates {coords!r}: {e}")


def element_to_model(x: RingElement) -> RingElementModel:
    return RingElementModel(d=x.ctx.d, coords=pair(x))


def cyclotomic_to_model(value: CyclotomicNumber) -> CyclotomicModel:
    return CyclotomicModel(**value.to_dict())


def cyclotomic_from_model(model: CyclotomicModel) -> CyclotomicNumber:
    return CyclotomicNumber(model.order, [Fraction(c) for c in model.coeffs])


def field_to_model(ctx: FieldContext) -> FieldContextModel:
    try:
        two_prime = pair(ctx.two_prime())
    except CatalogError:
        two_prime = None
    return FieldContextModel(
        d=ctx.d,
        discriminant=ctx.discriminant,
        omega_kind=OmegaKindTag(ctx.omega_kind.value),
        fundamental_unit=pair(ctx.fundamental_unit),
        fundamental_unit_display=str(ctx.fundamental_unit),
        different=pair(ctx.different_gen),
        different_display=str(ctx.different_gen),
        two_prime=two_prime,
    )


def unit_group_to_model(group: UnitGroupStructure) -> UnitGroupModel:
    return UnitGroupModel(
        d=group.ctx.d,
        modulus=pair(group.modulus),
        order=group.order,
        generators=[pair(g) for g in group.generator_elements()],
        orders=list(group.orders),
        unit_images=[list(v) for v in group.unit_images],
        generated_by_units=group.is_generated_by_units(),
    )


def character_to_model(chi: DirichletCharacter) -> CharacterModel:
    return CharacterModel(
        d=chi.modulus.ctx.d,
        modulus=pair(chi.modulus),
        generators=[pair(g) for g in chi.group.generator_elements()],
        exponents=list(chi.exponents),
        order=chi.order,
        conductor=pair(chi.conductor),
    )


def character_from_model(ctx: FieldContext, model: CharacterModel) -> DirichletCharacter:
    group = unit_group(element_from_pair(ctx, model.modulus))
    current = [pair(g) for g in group.generator_elements()]
    if [tuple(g) for g in model.generators] != current:
        raise SpecParseError(
            f"stored generators {model.generators} do not match the unit-group generators {current}"
        )
    return DirichletCharacter.from_exponents(group, model.exponents)


def expansion_to_model(f: FourierExpansion) -> ExpansionModel:
    return ExpansionModel(
        field=f.ctx.d,
        box=(str(f.box[0]), str(f.box[1])),
        level=pair(f.level) if f.level is not None else None,
        character=character_to_model(f.character) if f.character is not None else None,
        label=f.label,
        coeffs=[CoefficientEntry(xi=pair(xi), value=cyclotomic_to_model(f.coeffs[xi])) for xi in f.support()],
    )


def expansion_from_model(ctx: FieldContext, model: ExpansionModel) -> FourierExpansion:
    if model.field != ctx.d:
        raise SpecParseError(f"expansion is over Q(sqrt({model.field})), not Q(sqrt({ctx.d}))")
    coeffs = {element_from_pair(ctx, entry.xi): cyclotomic_from_model(entry.value) for entry in model.coeffs}
    f = FourierExpansion(
        ctx=ctx,
        box=(Fraction(model.box[0]), Fraction(model.box[1])),
        coeffs=coeffs,
        level=element_from_pair(ctx, model.level) if model.level is not None else None,
        character=character_from_model(ctx, model.character) if model.character is not None else None,
        label=model.label,
    )
    logger.debug(f"Loaded {f!r}")
    return f
