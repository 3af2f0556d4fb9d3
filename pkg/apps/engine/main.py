"""
hmf-theta command-line interface

Subcommands: field, unit-group, characters, basis, theta, hecke, lseries, verify.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from config import get_settings
from exceptions import HMFError, SpecParseError, VerificationError, exit_code_for
from models.schemas import (
    BasisReportModel,
    CommandConfig,
    ErrorResponse,
    ExpansionModel,
    HeckeOperator,
    HeckeReport,
    LSeriesReport,
    OmegaPairModel,
    OutputFormat,
    SuiteName,
)
from services.analytic import euler_partial, partial_L
from services.basis_builder import basis
from services.field_arith import make_field
from services.qexp import is_proportional, op_H, op_K, op_T_p2, op_U, op_V, theta_chi_t
from services.residue_chars import characters_trivial_on_units, unit_group
from services.serialization import (
    character_to_model,
    cyclotomic_to_model,
    expansion_from_model,
    expansion_to_model,
    field_to_model,
    pair,
    unit_group_to_model,
)
from services.spec_parser import (
    parse_box,
    parse_character,
    parse_element,
    parse_level,
    parse_primes,
)
from services.verification_service import VerificationService

logger = logging.getLogger(__name__)

DEFAULT_THETA_BOX = "30"


def _configure_logging() -> None:
    settings = get_settings()
    level = logging.DEBUG if settings.DEBUG else getattr(logging, settings.LOG_LEVEL, logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _emit(args, model, text: str) -> None:
    if args.json:
        print(model.model_dump_json(indent=2, by_alias=True))
    else:
        print(text)


def _command_config(args) -> CommandConfig:
    try:
        return CommandConfig(
            d=args.d,
            level=getattr(args, "level", None),
            character=getattr(args, "char", None) or "trivial",
            precision=args.precision,
            seed=args.seed,
            output=OutputFormat.JSON if args.json else OutputFormat.TEXT,
            threads=args.threads,
        )
    except ValidationError as e:
        raise SpecParseError(f"invalid arguments: {e.errors()[0]['msg']} ({e.errors()[0]['loc']})")


def _load_expansion(ctx, path: str):
    try:
        model = ExpansionModel.model_validate_json(Path(path).read_text())
    except (OSError, ValidationError) as e:
        raise SpecParseError(f"cannot read expansion from {path}: {e}")
    return expansion_from_model(ctx, model)


def _write_expansion(f, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(expansion_to_model(f).model_dump_json(indent=2))
        logger.info(f"Wrote {f!r} to {path}")


# ---------------------------------------------------------------------------
# Commands


def cmd_field(args) -> int:
    ctx = make_field(args.d)
    model = field_to_model(ctx)
    _emit(args, model, "\n".join([
        f"Q(sqrt({ctx.d}))",
        f"  discriminant D = {ctx.discriminant}",
        f"  different delta = {ctx.different_gen}",
        f"  fundamental unit = {ctx.fundamental_unit} (norm {ctx.fundamental_unit.norm()})",
        f"  prime above 2 q = {ctx.two_prime() if model.two_prime else 'none (2 splits)'}",
        "  narrow class number 1: in catalog",
    ]))
    return 0


def cmd_unit_group(args) -> int:
    ctx = make_field(args.d)
    group = unit_group(parse_level(ctx, args.level))
    model = unit_group_to_model(group)
    lines = [f"(R/{group.modulus})^x: order {group.order}"]
    for g, n in zip(group.generator_elements(), group.orders):
        lines.append(f"  generator {g} of order {n}")
    lines.append(f"  generated by unit images: {model.generated_by_units}")
    _emit(args, model, "\n".join(lines))
    return 0


def cmd_characters(args) -> int:
    ctx = make_field(args.d)
    characters = characters_trivial_on_units(parse_level(ctx, args.level), order_divides=args.order)
    models = [character_to_model(chi) for chi in characters]
    if args.json:
        print(json.dumps([m.model_dump() for m in models], indent=2))
    else:
        for chi, m in zip(characters, models):
            print(f"{chi}  order {m.order}  conductor {chi.conductor}")
    return 0


def cmd_basis(args) -> int:
    config = _command_config(args)
    ctx = make_field(config.d)
    level = parse_level(ctx, args.level)
    psi = parse_character(ctx, config.character)
    box = parse_box(args.box) if args.box else None
    report = basis(level, psi, box=box, threads=config.threads)

    refs = []
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, f in enumerate(report.expansions):
            path = out / f"theta_{i}.json"
            _write_expansion(f, str(path))
            refs.append(str(path))

    model = BasisReportModel(
        d=ctx.d,
        level=pair(level),
        level_display=str(level),
        character=character_to_model(psi),
        dimension=report.dimension,
        pairs=[OmegaPairModel(chi=character_to_model(p.chi), t=pair(p.t), t_display=str(p.t)) for p in report.pairs],
        pivots=[pair(x) for x in report.pivots],
        certificate=report.certificate,
        expansion_refs=refs,
    )
    lines = [f"M({level}, {psi}): dimension {report.dimension} ({report.certificate} certificate)"]
    for i, p in enumerate(report.pairs):
        lines.append(f"  {i + 1}. {p.describe()}")
    _emit(args, model, "\n".join(lines))
    return 0


def cmd_theta(args) -> int:
    config = _command_config(args)
    ctx = make_field(config.d)
    chi = parse_character(ctx, args.chi)
    t = parse_element(ctx, args.t)
    f = theta_chi_t(chi, t, parse_box(args.box or DEFAULT_THETA_BOX))
    _write_expansion(f, args.out)
    model = expansion_to_model(f)
    lines = [repr(f)] + [f"  a({xi}) = {f.coeffs[xi]}" for xi in f.support()[: args.show]]
    _emit(args, model, "\n".join(lines))
    return 0


def cmd_hecke(args) -> int:
    ctx = make_field(args.d)
    f = _load_expansion(ctx, args.on)
    op = HeckeOperator(args.op)
    argument = parse_element(ctx, args.p) if args.p else None
    if op != HeckeOperator.H and argument is None:
        raise SpecParseError(f"operator {op.value} needs --p")
    box = parse_box(args.box) if args.box else None

    if op == HeckeOperator.T:
        psi = parse_character(ctx, args.char) if args.char else f.character
        level = parse_level(ctx, args.level) if args.level else f.level
        if psi is None or level is None:
            raise SpecParseError("T needs the character and level (from the file or --char/--level)")
        g = op_T_p2(f, argument, psi, level, box=box)
    elif op == HeckeOperator.U:
        g = op_U(argument, f)
    elif op == HeckeOperator.V:
        g = op_V(argument, f)
    elif op == HeckeOperator.K:
        g = op_K(argument, f)
    else:
        g = op_H(f)
    if box is not None and op != HeckeOperator.T:
        g = g.restrict(box)
    _write_expansion(g, args.out)

    ratio = is_proportional(g, f) if op == HeckeOperator.T else None
    model = HeckeReport(
        operator=op,
        argument=pair(argument) if argument is not None else None,
        ratio=cyclotomic_to_model(ratio) if ratio is not None else None,
        expansion=expansion_to_model(g),
    )
    text = repr(g)
    if op == HeckeOperator.T:
        text += f"\n  ratio to input: {ratio if ratio is not None else 'not proportional'}"
    _emit(args, model, text)
    return 0


def cmd_lseries(args) -> int:
    ctx = make_field(args.d)
    f = _load_expansion(ctx, args.form)
    if args.box:
        f = f.restrict(parse_box(args.box))
    value = partial_L(f, args.s, args.bound)
    euler = None
    if f.character is not None:
        euler = euler_partial(f.character, args.s, args.euler_bound)
    model = LSeriesReport(
        s=args.s,
        norm_bound=args.bound,
        partial_value=(value.real, value.imag),
        euler_value=(euler.real, euler.imag) if euler is not None else None,
        difference=abs(value - euler) if euler is not None else None,
    )
    text = f"partial L(f, {args.s}) up to norm {args.bound}: {value:.12g}"
    if euler is not None:
        text += f"\nEuler product up to norm {args.euler_bound}: {euler:.12g} (difference {abs(value - euler):.3g})"
    _emit(args, model, text)
    return 0


def cmd_verify(args) -> int:
    config = _command_config(args)
    service = VerificationService(d=config.d, seed=config.seed, threads=config.threads)
    options = {"samples": args.samples, "tol": args.tol}
    if args.n_max is not None:
        options["n_max"] = args.n_max
    if args.primes:
        options["primes"] = parse_primes(service.ctx, args.primes)

    suites = [SuiteName(s) for s in args.suite] if args.suite else list(SuiteName)
    results = [service.run(suite, **options) for suite in suites]
    if args.json:
        print(json.dumps([r.model_dump(mode="json") for r in results], indent=2))
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{r.suite.value}: {status} ({r.checks} checks, {r.duration_seconds:.1f}s)")
            if r.suite == SuiteName.HECKE_EIGEN:
                for row in r.details.get("eigenvalues", []):
                    print(f"  {row['level']}  {row['pair']}  p={row['p']}  eigenvalue {row['eigenvalue']}")
            if r.failures:
                print(f"  first failure: {r.failures[0]}")
    failed = [r for r in results if not r.passed]
    if failed:
        logger.error(f"Suite {failed[0].suite.value} failed: {failed[0].failures[0]}")
        return exit_code_for(VerificationError(failed[0].failures[0]))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=settings.DEFAULT_FIELD, help="squarefree d of Q(sqrt d)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--precision", type=int, default=settings.PRECISION, help="decimal digits")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--box", default=None, help="truncation box, X or X1,X2")
    common.add_argument("--threads", type=int, default=settings.THREADS)

    parser = argparse.ArgumentParser(
        prog="hmf-theta",
        description="Theta-series bases of weight-1/2 Hilbert modular forms",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("field", parents=[common], help="field context summary")
    p.set_defaults(handler=cmd_field)

    p = commands.add_parser("unit-group", parents=[common], help="structure of (R/m)^x")
    p.add_argument("--level", required=True)
    p.set_defaults(handler=cmd_unit_group)

    p = commands.add_parser("characters", parents=[common], help="characters trivial on units")
    p.add_argument("--level", required=True)
    p.add_argument("--order", type=int, default=None, help="keep characters of order dividing this")
    p.set_defaults(handler=cmd_characters)

    p = commands.add_parser("basis", parents=[common], help="theta basis of M(c, psi)")
    p.add_argument("--level", required=True)
    p.add_argument("--char", default="trivial")
    p.add_argument("--out-dir", default=None, help="write each basis expansion as JSON here")
    p.set_defaults(handler=cmd_basis)

    p = commands.add_parser("theta", parents=[common], help="expansion of theta_{chi,t}")
    p.add_argument("--chi", default="trivial")
    p.add_argument("--t", default="1")
    p.add_argument("--out", default=None)
    p.add_argument("--show", type=int, default=12, help="coefficients printed in text mode")
    p.set_defaults(handler=cmd_theta)

    p = commands.add_parser("hecke", parents=[common], help="apply T, U, V, K or H to an expansion")
    p.add_argument("--on", required=True, help="expansion JSON file")
    p.add_argument("--op", default="T", choices=[o.value for o in HeckeOperator])
    p.add_argument("--p", default=None, help="prime (or m for V)")
    p.add_argument("--char", default=None)
    p.add_argument("--level", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_hecke)

    p = commands.add_parser("lseries", parents=[common], help="partial L-series of an expansion")
    p.add_argument("--form", required=True, help="expansion JSON file")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--bound", type=int, default=400)
    p.add_argument("--euler-bound", type=int, default=20)
    p.set_defaults(handler=cmd_lseries)

    p = commands.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", action="append", choices=[s.value for s in SuiteName])
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--primes", default=None, help="comma-separated primes, e.g. 3,5,3+q")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    _configure_logging()
    invalid = get_settings().validate_settings()
    if invalid:
        logger.error(f"Invalid settings: {invalid}")
        print(f"invalid environment settings: {', '.join(invalid)}", file=sys.stderr)
        return 2

    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except HMFError as e:
        code = exit_code_for(e)
        logger.error(f"{type(e).__name__}: {e}")
        if args.json:
            print(ErrorResponse(error=type(e).__name__, message=str(e), exit_code=code).model_dump_json(indent=2))
        else:
            print(f"error: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
