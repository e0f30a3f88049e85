"""Command-line front end.

Subcommands: sym (exact operator algebra), resolvent (contraction bound
sweep), logrep (logarithmic representation checks), rotate (rotation
semantics), suite (full configured run).  Exit codes are a stable contract:
0 success, 1 verification failure, 2 usage/config error, 3 mathematical
precondition violation (e.g. kappa on the branch cut).
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys

import numpy as np

from . import __version__
from .funcalc import BranchCutError
from .gridops import make_grid, upwind_derivative, spectral_derivative
from .logrep import EvolutionFamily, log_representation, reconstruct_generator, \
    semigroup_violation_of_exp_a, series_reconstruction
from .reporting import CheckRecord, record_dict, sort_records, timed, write_report
from .symparse import ExpressionError, parse_operator
from .verify import (
    ConfigError,
    FieldDecayError,
    GaussianField,
    SuiteConfig,
    rotation_compare,
    resolvent_sweep,
    run_suite,
    standard_generator,
    suite_config_from_dict,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3


def _manifest(subcommand: str, config: dict, config_path: str | None = None) -> dict:
    return {
        "subcommand": subcommand,
        "config": config,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config_path": config_path,
    }


def _parse_complex_arg(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from None


def _parse_lambda_list(text: str) -> list[complex]:
    return [_parse_complex_arg(piece) for piece in text.split(",") if piece.strip()]


def _emit(quiet: bool, *parts):
    if not quiet:
        print(*parts)


# ---------------------------------------------------------------------------
# sym
# ---------------------------------------------------------------------------

def cmd_sym(args) -> int:
    try:
        op = parse_operator(args.expression)
    except ExpressionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(args.quiet, str(op))
    if args.check_zero:
        return EXIT_OK if op.is_zero else EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# resolvent
# ---------------------------------------------------------------------------

def cmd_resolvent(args) -> int:
    lambdas = args.lambdas
    if any(lam.real <= 0 for lam in lambdas):
        print("error: every lambda must have positive real part", file=sys.stderr)
        return EXIT_USAGE
    grid = make_grid(1, args.n, args.half_width)
    if args.scheme == "upwind":
        D = upwind_derivative(grid, "x")
    else:
        D = spectral_derivative(grid, "x")
    with timed() as clock:
        reports = resolvent_sweep(D, lambdas)
    records = []
    _emit(args.quiet, f"{'lambda':>12}  {'measured':>12}  {'bound':>12}  ok")
    for rep in reports:
        _emit(
            args.quiet,
            f"{rep.lam!s:>12}  {rep.measured_norm:12.6e}  {rep.bound:12.6e}  "
            f"{'yes' if rep.satisfied else 'NO'}",
        )
        records.append(
            CheckRecord(
                check="resolvent_bound",
                params={"n": args.n, "L": args.half_width, "scheme": args.scheme,
                        "lambda": rep.lam},
                residual=rep.measured_norm / rep.bound,
                tolerance=1.0 + 1e-9,
                passed=rep.satisfied,
                wall_ms=clock.wall_ms / max(len(reports), 1),
            )
        )
    config = {"n": args.n, "L": args.half_width, "scheme": args.scheme,
              "lambdas": [str(v) for v in lambdas]}
    if args.json:
        write_report(args.json, _manifest("resolvent", config), records)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["lambda_re", "lambda_im", "power", "measured", "bound", "satisfied"])
            for rep in reports:
                for p in rep.power_checks:
                    writer.writerow([rep.lam.real, rep.lam.imag, p.n, p.measured, p.bound,
                                     p.satisfied])
    return EXIT_OK if all(r.satisfied for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------------------
# logrep
# ---------------------------------------------------------------------------

def cmd_logrep(args) -> int:
    gen = standard_generator(args.generator, args.n, args.half_width)
    family = EvolutionFamily(gen, horizon=max(1.0, abs(args.t), abs(args.s)))
    records = []
    try:
        with timed() as clock:
            rec = reconstruct_generator(family, args.t, args.s, args.kappa)
        records.append(CheckRecord("logrep_reconstruction",
                                   {"generator": args.generator, "n": args.n,
                                    "L": args.half_width, "kappa": args.kappa,
                                    "t": args.t, "s": args.s},
                                   rec.residual, rec.tolerance, rec.passed, clock.wall_ms))
        with timed() as clock:
            rep = log_representation(family, args.t, args.s, args.kappa)
            ser = series_reconstruction(rep, n_terms=args.terms)
        records.append(CheckRecord("series_reconstruction",
                                   {"generator": args.generator, "n": args.n,
                                    "L": args.half_width, "kappa": args.kappa,
                                    "t": args.t, "s": args.s},
                                   ser.residual, ser.tolerance, ser.passed, clock.wall_ms))
        with timed() as clock:
            t, s = args.t, args.s
            viol = semigroup_violation_of_exp_a(family, args.kappa, (t, (t + s) / 2.0, s))
        records.append(CheckRecord("exp_a_semigroup_violation(detected)",
                                   {"generator": args.generator, "n": args.n,
                                    "kappa": args.kappa, "t": t, "s": s},
                                   viol.violation.residual, viol.violation.tolerance,
                                   viol.violation_detected, clock.wall_ms))
        records.append(CheckRecord("u_semigroup_control",
                                   {"generator": args.generator, "n": args.n, "t": t, "s": s},
                                   viol.control.residual, viol.control.tolerance,
                                   viol.control.passed, 0.0))
    except BranchCutError as exc:
        print(f"error: branch-cut violation: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(
                f"  closest eigenvalue distance to (-inf, 0]: {exc.report.min_distance:.6e} "
                f"(margin required {exc.report.eps_cut:.6e})",
                file=sys.stderr,
            )
        return EXIT_PRECONDITION
    for rec in records:
        _emit(args.quiet,
              f"{rec.check:45s} residual={rec.residual:.3e} tol={rec.tolerance:.1e} "
              f"{'pass' if rec.passed else 'FAIL'}")
    if args.json:
        config = {"generator": args.generator, "n": args.n, "L": args.half_width,
                  "kappa": str(args.kappa), "t": args.t, "s": args.s}
        write_report(args.json, _manifest("logrep", config), records)
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


# ---------------------------------------------------------------------------
# rotate
# ---------------------------------------------------------------------------

def cmd_rotate(args) -> int:
    grid = make_grid(2, args.n, args.half_width)
    spec = GaussianField(sigma=args.sigma, poly={(1, 0): 1.0, (0, 2): 0.5})
    records = []
    for theta in args.thetas:
        try:
            with timed() as clock:
                result = rotation_compare(grid, theta, spec, tol=args.tolerance)
        except FieldDecayError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
        records.append(CheckRecord("rotation_compare",
                                   {"n": args.n, "L": args.half_width, "theta": theta,
                                    "sigma": args.sigma},
                                   result.residual, result.tolerance, result.passed,
                                   clock.wall_ms))
        _emit(args.quiet,
              f"theta={theta:8.4f} residual={result.residual:.3e} "
              f"{'pass' if result.passed else 'FAIL'}")
    if args.json:
        config = {"n": args.n, "L": args.half_width, "sigma": args.sigma,
                  "thetas": list(args.thetas), "tolerance": args.tolerance}
        write_report(args.json, _manifest("rotate", config), records)
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

def cmd_suite(args) -> int:
    raw = {}
    if args.config is not None:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except json.JSONDecodeError as exc:
            print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
            return EXIT_USAGE
        try:
            config = suite_config_from_dict(raw)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            print(f"offending keys: {', '.join(exc.keys)}", file=sys.stderr)
            return EXIT_USAGE
    else:
        config = SuiteConfig()
    if args.seed is not None:
        from dataclasses import replace
        config = replace(config, seed=args.seed)
    records = sort_records(run_suite(config, jobs=args.jobs))
    for rec in records:
        _emit(args.quiet,
              f"{rec.check:45s} residual={rec.residual:.3e} tol={rec.tolerance:.3e} "
              f"{'pass' if rec.passed else 'FAIL'} ({rec.wall_ms:.0f} ms)")
    n_fail = sum(not r.passed for r in records)
    _emit(args.quiet, f"\n{len(records) - n_fail}/{len(records)} checks passed")
    if args.json:
        manifest = _manifest("suite", raw if raw else {"default": True}, args.config)
        manifest["seed"] = config.seed
        write_report(args.json, manifest, records)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["check", "residual", "tolerance", "pass", "wall_ms"])
            for rec in records:
                writer.writerow([rec.check, rec.residual, rec.tolerance, rec.passed,
                                 rec.wall_ms])
    return EXIT_OK if n_fail == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotlog",
        description="Verification toolkit for rotation semigroups and the "
                    "logarithmic representation of their generators.",
    )
    parser.add_argument("--version", action="version", version=f"rotlog {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sym", help="normal-order and print an operator expression")
    p.add_argument("expression")
    p.add_argument("--check-zero", action="store_true",
                   help="exit 0 iff the expression is exactly the zero operator")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_sym)

    p = sub.add_parser("resolvent", help="resolvent norm sweep against 1/Re(lambda)")
    p.add_argument("-n", type=int, default=64, help="grid points (even, >= 4)")
    p.add_argument("-L", "--half-width", type=float, default=float(np.pi))
    p.add_argument("--scheme", choices=("upwind", "spectral"), default="upwind")
    p.add_argument("--lambda", dest="lambdas", type=_parse_lambda_list,
                   default=[0.5, 1.0, 2.0, 5.0],
                   help="comma-separated complex values, e.g. 1,2,1+10i")
    p.add_argument("--json", help="write a JSON report")
    p.add_argument("--csv", help="write a CSV table")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("logrep", help="logarithmic representation checks")
    p.add_argument("--gen", dest="generator",
                   choices=("upwind", "spectral", "rot2d", "rot3d"), default="rot2d")
    p.add_argument("-n", type=int, default=16)
    p.add_argument("-L", "--half-width", type=float, default=float(np.pi))
    p.add_argument("--kappa", type=_parse_complex_arg, default=2.0)
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--terms", type=int, default=None,
                   help="fixed series truncation order (default: term-norm cutoff)")
    p.add_argument("--json", help="write a JSON report")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_logrep)

    p = sub.add_parser("rotate", help="compare the generated rotation with the analytic one")
    p.add_argument("-n", type=int, default=32)
    p.add_argument("-L", "--half-width", type=float, default=7.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--theta", dest="thetas", type=lambda s: [float(v) for v in s.split(",")],
                   default=[np.pi / 6, np.pi / 4, np.pi / 2])
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--json", help="write a JSON report")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_rotate)

    p = sub.add_parser("suite", help="run the configured verification suite")
    p.add_argument("config", nargs="?", default=None,
                   help="JSON config path (omit to run the built-in default)")
    p.add_argument("--json", help="write the JSON report bundle")
    p.add_argument("--csv", help="write a CSV summary")
    p.add_argument("--jobs", type=int, default=os.cpu_count(),
                   help="concurrent suite cells (default: available parallelism)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for randomized test fields (recorded in the manifest)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which matches our contract
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except BranchCutError as exc:
        print(f"error: branch-cut violation: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run():  # console entry point
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
