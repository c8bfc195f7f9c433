"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 failed precondition,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


from . import iod, lazy, suites
from .matrix import matrix_from_json, matrix_to_json
from .models import build_cx_mn, verify_type_In
from .projections import ProjectionFamily, family_from_partition

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_USAGE) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed JSON: {exc}", EXIT_USAGE) from exc


def _parse(loader, obj, path: str):
    try:
        return loader(obj)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_USAGE) from exc


def _load_family(args) -> ProjectionFamily:
    if args.partition:
        sizes = [int(s) for s in args.partition.split(",")]
        try:
            return family_from_partition(sum(sizes), sizes)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_PRECONDITION) from exc
    if not args.family:
        raise CliError("one of --family or --partition is required", EXIT_USAGE)
    return _parse(ProjectionFamily.from_json, _load_json(args.family), args.family)


def _load_element(path: str, family: ProjectionFamily | None = None) -> iod.IodElement:
    return _parse(lambda o: iod.IodElement.from_json(o, family), _load_json(path), path)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# subcommands


def cmd_decompose(args) -> int:
    family = _load_family(args)
    a = _parse(matrix_from_json, _load_json(args.input), args.input)
    if a.shape != (family.dim, family.dim):
        raise CliError(
            f"dimension mismatch: matrix {a.shape[0]}x{a.shape[1]}, family {family.dim}",
            EXIT_PRECONDITION,
        )
    _emit(_dump(iod.decompose(a, family).to_json()), args.out)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    x = _load_element(args.input)
    _emit(_dump(matrix_to_json(iod.reconstruct(x))), args.out)
    return EXIT_OK


def cmd_norm(args) -> int:
    x = _load_element(args.input)
    try:
        value = iod.iod_norm(x, sweep=args.sweep, tol=args.tol)
    except RuntimeError as exc:
        raise CliError(str(exc), EXIT_VERIFY) from exc
    _emit(_dump({"norm": value, "bound": x.bound}), args.out)
    return EXIT_OK


def _pair(args) -> tuple[iod.IodElement, iod.IodElement]:
    x = _load_element(args.left)
    y = _load_element(args.right)
    if x.family != y.family:
        raise CliError("elements are defined over different families", EXIT_PRECONDITION)
    return x, y


def cmd_order(args) -> int:
    x, y = _pair(args)
    _emit(_dump({"leq": iod.leq(x, y, args.tol)}), args.out)
    return EXIT_OK


def cmd_star(args) -> int:
    x, y = _pair(args)
    _emit(_dump(iod.star_product(x, y).to_json()), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in suites.SUITES:
        raise CliError(
            f"unknown suite {args.suite!r}; valid suites: {', '.join(suites.SUITES)}",
            EXIT_USAGE,
        )
    seed = 0 if args.seed is None else args.seed
    result = suites.run_suite(args.suite, args.trials, seed, args.dim, args.tol)
    _emit(_dump(result.to_json()), args.out)
    return EXIT_OK if result.failures == 0 else EXIT_VERIFY


def _sequence_expr(text: str):
    """Turn an expression in ``xi`` (e.g. ``1/(xi+1)``) into a function."""
    import sympy

    xi = sympy.Symbol("xi")
    try:
        expr = sympy.sympify(text, locals={"xi": xi})
    except (sympy.SympifyError, TypeError) as exc:
        raise CliError(f"cannot parse sequence {text!r}: {exc}", EXIT_USAGE) from exc
    if expr.free_symbols - {xi}:
        raise CliError(f"sequence {text!r} may only use the variable xi", EXIT_USAGE)
    fn = sympy.lambdify(xi, expr, "math")
    return lambda k: complex(fn(k))


def _lazy_family(args) -> lazy.LazyBlockFamily:
    name = args.family
    try:
        if name == "unit":
            return lazy.builtin_family("unit", i=args.i, j=args.j, bound=args.bound)
        if name == "band":
            return lazy.builtin_family("band", width=args.width, value=args.value, bound=args.bound)
        if name in ("diagonal", "shift"):
            if args.bound is None:
                raise CliError(f"{name} requires --bound", EXIT_USAGE)
            seq = _sequence_expr(args.seq)
            key = "lam" if name == "diagonal" else "weights"
            return lazy.builtin_family(name, bound=args.bound, **{key: seq})
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    raise CliError(
        f"unknown family {name!r}; expected unit, diagonal, band or shift", EXIT_USAGE
    )


def cmd_converge(args) -> int:
    f = _lazy_family(args)
    if args.schedule:
        sched = [int(s) for s in args.schedule.split(",")]
        try:
            report = lazy.truncated_norm_curve(f, sched)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_USAGE) from exc
    else:
        if args.max_n < 1:
            raise CliError("--max-n must be at least 1", EXIT_PRECONDITION)
        report = lazy.certify_bound(f, args.max_n)
    _emit(report.to_csv(), args.out)
    print(report.summary, file=sys.stderr)
    return EXIT_OK if report.certified else EXIT_VERIFY


def cmd_center(args) -> int:
    if args.m < 1 or args.n < 1:
        raise CliError("m and n must be positive", EXIT_PRECONDITION)
    if args.m * args.n > args.cap:
        raise CliError(
            f"m*n = {args.m * args.n} exceeds the cap {args.cap}", EXIT_PRECONDITION
        )
    rep = verify_type_In(build_cx_mn(args.m, args.n), tol=args.tol)
    _emit(_dump(rep.to_json()), args.out)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    def add_global(p, default):
        p.add_argument("--tol", type=float, default=default(1e-9), help="relative tolerance")
        p.add_argument("--seed", type=int, default=default(None))
        p.add_argument("--out", default=default(None), help="output file (default stdout)")

    parser = argparse.ArgumentParser(
        prog="iodalg", description="Block decompositions over projection families."
    )
    add_global(parser, lambda v: v)
    # repeated after the subcommand; only overrides when actually given
    common = argparse.ArgumentParser(add_help=False)
    add_global(common, lambda v: argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="split a matrix into blocks")
    p.add_argument("--input", required=True, help="matrix JSON")
    p.add_argument("--family", help="projection family JSON")
    p.add_argument("--partition", help="comma-separated block sizes, e.g. 2,1")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reconstruct", parents=[common], help="sum the blocks of an element")
    p.add_argument("--input", required=True, help="element JSON")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("norm", parents=[common], help="corner-supremum norm")
    p.add_argument("--input", required=True, help="element JSON")
    p.add_argument("--sweep", type=int, default=None, help="also sweep corners up to this size")
    p.set_defaults(func=cmd_norm)

    for name, func, text in (
        ("order", cmd_order, "test left <= right"),
        ("star", cmd_star, "blockwise product left * right"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--left", required=True)
        p.add_argument("--right", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[common], help="run a randomized property suite")
    p.add_argument("--suite", required=True, help=", ".join(suites.SUITES))
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--dim", type=int, default=None, help="fixed dimension (default: random 4..16)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("converge", parents=[common], help="truncated corner norms of a lazy family")
    p.add_argument("--family", required=True, help="unit, diagonal, band or shift")
    p.add_argument("--max-n", type=int, default=64)
    p.add_argument("--schedule", help="explicit comma-separated sizes instead of doubling")
    p.add_argument("--bound", type=float, default=None, help="claimed bound K")
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--width", type=int, default=1)
    p.add_argument("--value", type=complex, default=1.0)
    p.add_argument("--seq", default="1", help="sequence in xi for diagonal/shift, e.g. 'xi+1'")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("center", parents=[common], help="check the C(X) (x) M_n model")
    p.add_argument("--m", type=int, required=True, help="number of points of X")
    p.add_argument("--n", type=int, required=True, help="matrix size")
    p.add_argument("--cap", type=int, default=64, help="maximum m*n")
    p.set_defaults(func=cmd_center)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"iodalg {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
