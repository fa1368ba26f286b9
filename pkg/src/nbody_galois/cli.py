"""Command-line interface: ``nbody-galois <subcommand> [options]``.

Exit codes: 0 analysis completed, 2 invalid input, 3 numerically
inconclusive.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import __version__, report, variational
from .errors import InconclusiveError, InputError, NBodyGaloisError

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 2, 3

logger = logging.getLogger("nbody_galois")


def parse_number(text: str):
    """Rational for ``p/q`` or plain decimals, float for exponent notation."""
    text = text.strip()
    if text.lower() in ("sqrt2", "sqrt(2)"):
        return "sqrt2"
    try:
        if "e" in text.lower() and "/" not in text:
            return float(text)
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a number: {text!r}") from exc


def _parse_mass_text(text: str) -> list:
    text = text.strip()
    if text.startswith("["):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON mass array: {exc}") from exc
        if not isinstance(values, list):
            raise InputError("mass JSON must be an array")
        return [parse_number(str(v)) if not isinstance(v, (int, float)) or isinstance(v, bool)
                else (Fraction(v) if isinstance(v, int) else v) for v in values]
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise InputError("no masses given")
    return [parse_number(t) for t in tokens]


def parse_masses(arg: str) -> list:
    """Masses from a file path or an inline list (JSON array or whitespace/commas)."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            arg = fh.read()
    masses = _parse_mass_text(arg)
    if any(isinstance(m, str) for m in masses):
        raise InputError("masses must be numbers")
    return masses


def _scalar_arg(text):
    v = parse_number(text)
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbody-galois",
                                     description="Non-integrability checks for n-body problems")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="analyze central configurations for given masses")
    p.add_argument("--masses", required=True, help="file, JSON array or whitespace-separated list")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--k-bound", type=int, default=variational.DEFAULT_K_BOUND)
    p.add_argument("--exact", action="store_true", help="exact spectra when masses are rational")
    p.add_argument("--with-monodromy", action="store_true")

    p = sub.add_parser("equal-masses", parents=[common], help="lambda(n) for equal-mass polygons")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--k-bound", type=int, default=variational.DEFAULT_K_BOUND)

    p = sub.add_parser("search-3body", parents=[common], help="three-body decoupling mass search")
    p.add_argument("--grid", type=float, default=0.05)

    p = sub.add_parser("table", parents=[common], help="allowed eigenvalues per level")
    p.add_argument("--C", dest="C", type=_scalar_arg)
    p.add_argument("--H", dest="H", type=_scalar_arg)
    p.add_argument("--lam", "--lambda", dest="lam", type=_scalar_arg)
    p.add_argument("--k-bound", type=int, default=variational.DEFAULT_K_BOUND)

    p = sub.add_parser("monodromy", parents=[common], help="numerical monodromy of the normal equation")
    p.add_argument("--C", dest="C", type=_scalar_arg, required=True)
    p.add_argument("--lam", "--lambda", dest="lam", type=_scalar_arg, required=True)
    p.add_argument("--tol", type=float, default=1e-12)

    sub.add_parser("examples", parents=[common], help="three-dimensional example potentials")
    return parser


def _run(args):
    if args.command == "analyze":
        return report.cmd_analyze(parse_masses(args.masses), tol=args.tol, k_bound=args.k_bound,
                                  exact_mode=args.exact, with_monodromy=args.with_monodromy)
    if args.command == "equal-masses":
        return report.cmd_equal_masses(args.n_min, args.n_max, k_bound=args.k_bound)
    if args.command == "search-3body":
        return report.cmd_search_decoupling_3body(args.grid)
    if args.command == "table":
        return report.cmd_table(args.C, args.H, args.lam, k_bound=args.k_bound)
    if args.command == "monodromy":
        if not args.tol > 0:
            raise InputError("--tol must be positive")
        return report.cmd_monodromy(args.C, args.lam, args.tol)
    if args.command == "examples":
        return report.cmd_examples()
    raise InputError(f"unknown command {args.command}")


def _write_json(rep, path: str) -> None:
    text = json.dumps(rep.to_json(), default=report.json_default, indent=2)
    if path == "-":
        print(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rep = _run(args)
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (InputError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NBodyGaloisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    if args.json != "-":
        for line in rep.summary():
            print(line)
    if args.json:
        _write_json(rep, args.json)
    if getattr(rep, "inconclusive", False):
        return EXIT_INCONCLUSIVE
    if isinstance(rep, report.MonodromyCommandReport) and rep.data["certificate"] is None:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
