"""
``mfas`` command line.

Reports are ``key=value`` lines on stdout with keys in a fixed order.
Exit codes: 0 success, 1 infeasible input or failed validation, 2 format
error, 3 guard or cap exceeded, 4 internal assertion (its dump goes to
stderr).
"""

import argparse
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

from mfas_cover import observers  # noqa: F401  registers the built-in hooks
from mfas_cover.constants import ENGINE_VERSION
from mfas_cover.context import SolveContext
from mfas_cover.covering import constraint_dump, enumerate_constraints, mwu_fractional_cover
from mfas_cover.enums import Formulation, GenMode
from mfas_cover.exceptions import FormatError, MfasError
from mfas_cover.gen import BUNDLED_INSTANCES, BUNDLED_SOLUTIONS, GenSpec, bundled_instance, bundled_solution, generate
from mfas_cover.instance import Instance, format_amount, format_ratio, parse_instance, serialize_instance, to_nanos
from mfas_cover.instance import validate_hemimetric, validate_kgonal
from mfas_cover.oracle import exact_min_cover, exact_min_extension
from mfas_cover.pipeline import solve_pipeline
from mfas_cover.repair import repair
from mfas_cover.solution import (
    check_alternating_cycles,
    check_cover_feasible,
    check_fas_feasible,
    check_triangle_feasible,
    cost,
    parse_solution,
    permutation_from_delta,
    serialize_solution,
)

logger = logging.getLogger(__name__)


def _read(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {what} {path}: {exc.strerror}") from None


def _load_instance(path: str) -> Instance:
    """A file path, or the name of a bundled instance when no such file exists."""
    stem = Path(path).name.removesuffix(".mfas")
    if not Path(path).exists() and stem in BUNDLED_INSTANCES:
        return bundled_instance(stem)
    return parse_instance(_read(path, "instance"))


def _load_solution(path: str, inst: Instance):
    stem = Path(path).name.removesuffix(".sol")
    if not Path(path).exists() and stem in BUNDLED_SOLUTIONS:
        delta = bundled_solution(stem)
        return parse_solution(serialize_solution(delta), inst)
    return parse_solution(_read(path, "solution"), inst)


def _emit(out, lines):
    for line in lines:
        out.write(line + "\n")


def _flag(value: bool) -> str:
    return "true" if value else "false"


# --- subcommands -----------------------------------------------------------------


def cmd_validate(args, out) -> int:
    inst = _load_instance(args.instance)
    report = validate_hemimetric(inst)
    lines = [
        "format=ok",
        f"n={inst.n}",
        f"instance_digest={inst.digest}",
        f"hemimetric={_flag(report.holds)}",
        f"hemimetric_violations={len(report.violations)}",
    ]
    ok = report.holds
    if report.violations:
        lines.append("first_violation=" + " ".join(map(str, report.violations[0])))
    if args.k is not None:
        kgonal = validate_kgonal(inst, args.k, seed=args.seed)
        lines.extend(
            [
                f"kgonal_k={args.k}",
                f"kgonal={_flag(kgonal.holds)}",
                f"kgonal_violations={len(kgonal.violations)}",
                f"kgonal_sampled={_flag(kgonal.sampled)}",
            ]
        )
        if kgonal.sampled:
            lines.append(f"kgonal_seed={kgonal.seed}")
        ok = ok and kgonal.holds
    _emit(out, lines)
    return 0 if ok else 1


def cmd_solve(args, out) -> int:
    inst = _load_instance(args.instance)
    trace_stream = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        ctx = SolveContext(trace_stream=trace_stream)
        _, report = solve_pipeline(inst, bound=args.bound, eps=args.eps, ctx=ctx)
    finally:
        if trace_stream is not None:
            trace_stream.close()
    _emit(out, report.lines())
    return 0


def cmd_exact(args, out) -> int:
    inst = _load_instance(args.instance)
    result = exact_min_extension(inst)
    lines = [
        f"engine={ENGINE_VERSION}",
        f"instance_digest={inst.digest}",
        f"order={result.best_perm}",
        f"total_cost={format_amount(result.best_total_cost)}",
        f"variable_cost={format_amount(result.best_total_cost - inst.fixed_cost)}",
        f"fixed_cost={format_amount(inst.fixed_cost)}",
        f"explored={result.explored}",
    ]
    if args.cover:
        _, value = exact_min_cover(inst)
        lines.append(f"cover_variable_cost={format_amount(value)}")
    _emit(out, lines)
    return 0


def cmd_bound(args, out) -> int:
    inst = _load_instance(args.instance)
    bound = mwu_fractional_cover(inst, args.eps)
    _emit(
        out,
        [
            f"engine={ENGINE_VERSION}",
            f"instance_digest={inst.digest}",
            f"lower_bound={format_amount(math.floor(bound.lower_bound))}",
            f"primal_value={format_amount(math.ceil(bound.primal_value))}",
            f"fixed_cost={format_amount(inst.fixed_cost)}",
            f"eps={format_ratio(bound.eps)}",
            f"iterations={bound.iterations}",
        ],
    )
    return 0


def cmd_repair(args, out) -> int:
    inst = _load_instance(args.instance)
    delta = _load_solution(args.solution, inst)
    before = cost(delta, inst)
    trace_stream = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        repaired, trace = repair(delta, inst, ctx=SolveContext(trace_stream=trace_stream))
    finally:
        if trace_stream is not None:
            trace_stream.close()
    after = cost(repaired, inst)
    lines = [f"engine={ENGINE_VERSION}", f"instance_digest={inst.digest}"]
    lines.append(f"order={permutation_from_delta(repaired, inst)}")
    lines.extend(after.lines())
    lines.append(f"input_total_cost={format_amount(before.total_cost)}")
    lines.append(f"iterations={len(trace)}")
    _emit(out, lines)
    if args.out:
        Path(args.out).write_text(serialize_solution(repaired), encoding="utf-8")
    return 0


def cmd_check(args, out) -> int:
    inst = _load_instance(args.instance)
    delta = _load_solution(args.solution, inst)
    formulation = Formulation(args.formulation)
    if formulation is Formulation.FAS:
        violations = check_fas_feasible(delta, inst)
    elif formulation is Formulation.COVER:
        violations = check_cover_feasible(delta, inst)
    elif formulation is Formulation.CYCLES:
        violations = check_alternating_cycles(delta, inst, args.max_cycle)
    else:
        violations = check_triangle_feasible(delta, inst)
    lines = [
        f"formulation={formulation.value}",
        f"feasible={_flag(not violations)}",
        f"violations={len(violations)}",
    ]
    lines.extend(cost(delta, inst).lines())
    lines.extend(f"violation={v.describe()}" for v in violations)
    _emit(out, lines)
    if args.dump_constraints:
        _emit(out, constraint_dump(enumerate_constraints(inst)))
    return 0 if not violations else 1


def cmd_gen(args, out) -> int:
    if args.name:
        inst = bundled_instance(args.name)
    else:
        spec = GenSpec(
            n=args.n,
            seed=args.seed,
            poset_density=args.density,
            weight_range=(to_nanos(args.lo), to_nanos(args.hi)),
            mode=GenMode(args.mode),
        )
        inst = generate(spec, args.k)
    text = serialize_instance(inst)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0


# --- parser ----------------------------------------------------------------------


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfas",
        description="Precedence-constrained minimum feedback arc set on hemimetric weights.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the format and weight classes of an instance")
    p.add_argument("instance")
    p.add_argument("--k", type=int, help="also check the k-gonal inequality")
    p.add_argument("--seed", type=int, help="seed for the sampled k-gonal check")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("solve", help="primal-dual cover, repair and order")
    p.add_argument("instance")
    p.add_argument("--bound", action="store_true", help="add the certified fractional lower bound")
    p.add_argument("--eps", type=_fraction, help="accuracy of the fractional bound (default 0.05)")
    p.add_argument("--trace", help="write one line per repair round to this file")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("exact", help="optimal linear extension by subset dynamic programming")
    p.add_argument("instance")
    p.add_argument("--cover", action="store_true", help="also report the optimal cover value")
    p.set_defaults(handler=cmd_exact)

    p = sub.add_parser("bound", help="certified fractional lower bound only")
    p.add_argument("instance")
    p.add_argument("--eps", type=_fraction)
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("repair", help="repair a user cover into a linear extension")
    p.add_argument("instance")
    p.add_argument("--solution", required=True)
    p.add_argument("--trace")
    p.add_argument("--out", help="write the repaired solution file here")
    p.set_defaults(handler=cmd_repair)

    p = sub.add_parser("check", help="check a solution against one formulation")
    p.add_argument("instance")
    p.add_argument("--solution", required=True)
    p.add_argument("--formulation", choices=[f.value for f in Formulation], default=Formulation.FAS.value)
    p.add_argument("--max-cycle", type=int, default=3)
    p.add_argument("--dump-constraints", action="store_true")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("gen", help="write a generated or bundled instance")
    p.add_argument("--name", choices=BUNDLED_INSTANCES)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=_fraction, default=Fraction(0))
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="10")
    p.add_argument("--mode", choices=[m.value for m in GenMode], default=GenMode.HEMIMETRIC_CLOSURE.value)
    p.add_argument("--k", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args, sys.stdout)
    except MfasError as exc:
        sys.stderr.write(f"error={type(exc).__name__}: {exc.message}\n")
        if exc.dump:
            sys.stderr.write(exc.dump.rstrip("\n") + "\n")
        if exc.exit_code == 4:
            logger.error("internal assertion failed; please report the dump above")
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
