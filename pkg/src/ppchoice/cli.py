"""Command-line interface: plan, construct, verify, extend, tables, export.

Exit codes: 0 success/pass, 1 usage or input error, 2 not available
(unplannable, catalog gap, no usable generators), 3 certificate failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import _kernels
from .construct import (
    GeneratorError,
    GeneratorSet,
    NotAvailable,
    auto_generators,
    construct_broader,
    extend_to_m,
    plan_minimum_N,
    weight_range,
)
from .design import DesignError, validate_structure
from .designfile import DesignFileError, load_design, to_csv, write_design
from .tables import table1, table2
from .verify import MAX_BRUTE_FORCE_N, brute_force_c_matrix, broader_c_matrix, certify

EXIT_OK, EXIT_USAGE, EXIT_UNAVAILABLE, EXIT_CERT = 0, 1, 2, 3
ORACLE_MAX_N = 10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _parse_generators(text: str, rho: int) -> GeneratorSet:
    return GeneratorSet(tuple(t for t in text.split(",") if t.strip()), rho)


def _extend(d, m, generators, auto):
    if m <= 2:
        return d
    if not weight_range(d.n, d.rho):
        lo, hi = sorted((d.rho, d.n - d.rho))
        raise CommandError(
            f"empty generator weight range for n={d.n}, rho={d.rho}: need {lo} < w < {hi}", EXIT_UNAVAILABLE)
    if generators is None and not auto:
        raise CommandError("m > 2 needs --generators or --auto-generators", EXIT_USAGE)
    if generators is not None:
        G = _parse_generators(generators, d.rho)
    else:
        G = auto_generators(d, (m - 1) // 2, m)
    return extend_to_m(d, G, m)


def _certified_output(d, model, fixed_level, out):
    cert = certify(d, model)
    if not cert.passed:
        for line in cert.lines():
            print(line, file=sys.stderr)
        raise CommandError("constructed design failed its certificate; nothing written", EXIT_CERT)
    _emit(write_design(d, model=model, fixed_level=fixed_level, certificate=cert.lines()), out)
    if out not in (None, "-"):
        print(f"wrote {out}: N={d.N} n={d.n} m={d.m} rho={d.rho} model={model} certificate PASS")


# -- commands -------------------------------------------------------------------


def cmd_plan(args) -> int:
    plan = plan_minimum_N(args.n, args.rho)
    if args.json:
        print(json.dumps({
            "n": plan.n, "rho": plan.rho, "method": plan.method, "N": plan.N, "nu": plan.nu,
            "h": plan.h, "N1": plan.N1, "N2": plan.N2, "tag": plan.tag(), "improved": plan.improved,
            "candidates": [list(c) for c in plan.candidates],
        }))
    else:
        print(plan.describe())
        if plan.method != "saturated":
            cands = ", ".join(f"nu={nu}: K={k}" for nu, k in plan.candidates) or "none"
            print(f"weighing expansions (N1={plan.N1}): {cands}")
            print(f"Hadamard expansion (N2={plan.N2}): h(rho)={plan.h}")
    return EXIT_OK if plan.plannable else EXIT_UNAVAILABLE


def cmd_construct(args) -> int:
    plan = plan_minimum_N(args.n, args.rho)
    if not plan.plannable:
        raise CommandError(f"no construction available for n={args.n}, rho={args.rho}", EXIT_UNAVAILABLE)
    d = plan.build(args.fixed_level)
    d = _extend(d, args.m, args.generators, args.auto_generators)
    if args.model == "broader":
        d = construct_broader(d)
    _certified_output(d, args.model, args.fixed_level, args.out)
    return EXIT_OK


def cmd_extend(args) -> int:
    f = load_design(args.path)
    d = f.design
    if d.m != 2:
        raise CommandError(f"extend needs a paired design (m=2), file has m={d.m}", EXIT_USAGE)
    d = _extend(d, args.m, args.generators, args.auto_generators)
    model = args.model or "main"
    if model == "broader":
        d = construct_broader(d)
    _certified_output(d, model, f.fixed_level, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    f = load_design(args.path)
    d = f.design
    model = args.model or f.model
    report = validate_structure(d)
    if not report.ok:
        print("structure: INVALID")
        for issue in report.issues:
            print(f"  {issue}")
        print("result: FAIL")
        return EXIT_CERT
    cert = certify(d, model)
    for line in cert.lines(limit=args.limit):
        print(line)
    if args.oracle:
        if d.n > ORACLE_MAX_N:
            print(f"oracle: skipped (n={d.n} > {ORACLE_MAX_N})")
        else:
            brute = brute_force_c_matrix(d)
            diff = np.abs(brute.to_float() - cert.c_matrix.to_float()).max(initial=0.0)
            exact = brute == cert.c_matrix
            print(f"oracle: max |C_count - C_brute| = {diff:.3e} ({'exact match' if exact else 'MISMATCH'})")
            if model == "broader" and d.n <= MAX_BRUTE_FORCE_N:
                info = broader_c_matrix(d)
                print(f"oracle: trace(C broader) = {info.trace():.12g}, trace(C main) = {np.trace(info.main_c):.12g}")
            if not exact:
                return EXIT_CERT
    return EXIT_OK if cert.passed else EXIT_CERT


def cmd_tables(args) -> int:
    if args.table in ("1", "both"):
        sys.stdout.write(table1())
    if args.table == "both":
        sys.stdout.write("\n")
    if args.table in ("2", "both"):
        sys.stdout.write(table2())
    return EXIT_OK


def cmd_export(args) -> int:
    f = load_design(args.path)
    _emit(to_csv(f.design), args.out)
    return EXIT_OK


# -- wiring -------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ppchoice", description="Optimal two-level partial-profile choice designs.")
    p.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 (kernel: {_kernels.BACKEND})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("plan", help="minimum-N construction plan for (n, rho)")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--rho", type=_positive, required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_plan)

    def generator_flags(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--generators", help="comma-separated 0/1 generator strings")
        g.add_argument("--auto-generators", action="store_true", help="search for generators")

    sp = sub.add_parser("construct", help="build, certify and write an optimal design")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--rho", type=_positive, required=True)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--model", choices=("main", "broader"), default="main")
    sp.add_argument("--fixed-level", type=int, choices=(0, 1), default=0)
    sp.add_argument("--out", "-o", default="-")
    generator_flags(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("extend", help="apply generators to a paired design file")
    sp.add_argument("path")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--model", choices=("main", "broader"))
    sp.add_argument("--out", "-o", default="-")
    generator_flags(sp)
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("verify", help="certify a design file")
    sp.add_argument("path")
    sp.add_argument("--model", choices=("main", "broader"), help="default: the file's model")
    sp.add_argument("--oracle", action="store_true", help=f"cross-check with the brute-force engine (n <= {ORACLE_MAX_N})")
    sp.add_argument("--limit", type=int, default=20, help="max failing tuples listed per check")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("tables", help="regenerate the minimum-N tables")
    sp.add_argument("--table", choices=("1", "2", "both"), default="both")
    sp.set_defaults(func=cmd_tables)

    sp = sub.add_parser("export", help="export a design file as CSV")
    sp.add_argument("path")
    sp.add_argument("--format", choices=("csv",), default="csv")
    sp.add_argument("--out", "-o", default="-")
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "m", 2) < 2:
            parser.error("--m must be at least 2")
        if hasattr(args, "rho") and args.rho > args.n:
            parser.error(f"--rho must not exceed --n ({args.rho} > {args.n})")
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except CommandError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except NotAvailable as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNAVAILABLE
    except DesignFileError as e:
        print(f"error: {args.path}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GeneratorError, DesignError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
