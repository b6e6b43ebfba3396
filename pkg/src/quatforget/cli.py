"""Command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 nothing found within the
search bound, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from .arith import QuadOrder, fmt_rat, is_squarefree, prime_divisors
from .atkin_lehner import default_bound, degree_forgetful_F, degree_forgetful_hilbert, twist_witnesses
from .eichler import contains_twist, embeddable_maximal, find_embedding, pair_from_element
from .errors import DomainError, Indeterminate, InvariantViolation, NotFoundWithinBound, SaturationFailed
from .orders import LeftIdeal, maximal_order
from .polarization import (
    ComplexPoint,
    degree_formula,
    degree_oracle,
    make_principal_datum,
    ns_lattice,
    positivity_check,
)
from .quaternion import QuaternionAlgebra, algebra_for_discriminant, is_division, is_totally_indefinite, twisting_divisors
from .serialize import (
    datum_from_json,
    datum_to_json,
    lattice_from_json,
    lattice_to_json,
    pair_to_json,
    parse_rat,
    quaternion_to_json,
)

EXIT_OK, EXIT_USAGE, EXIT_NOT_FOUND, EXIT_INVARIANT = 0, 1, 2, 3
TABLE_DMAX = 10**4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Config:
    search_bound: int = 50
    tau: complex = 1j
    tolerance: float = 1e-9
    output: str = "json"

    def __post_init__(self):
        if self.search_bound < 1:
            raise UsageError("search bound must be at least 1")
        if self.tau.imag <= 0:
            raise UsageError("tau must have positive imaginary part")
        if self.tolerance <= 0:
            raise UsageError("tolerance must be positive")


def _emit(obj, cfg: Config) -> None:
    if cfg.output == "text":
        for k, v in obj.items():
            print(f"{k}: {json.dumps(v)}")
    else:
        print(json.dumps(obj, indent=2))


def _algebra(args) -> QuaternionAlgebra:
    if args.disc is not None:
        if args.a is not None or args.b is not None:
            raise UsageError("give either -a/-b or --disc, not both")
        return algebra_for_discriminant(args.disc)
    if args.a is None or args.b is None:
        raise UsageError("need -a and -b (or --disc)")
    return QuaternionAlgebra(parse_rat(args.a), parse_rat(args.b))


def _indefinite_division(alg: QuaternionAlgebra) -> None:
    if not is_division(alg) or not is_totally_indefinite(alg):
        raise UsageError(f"{alg} is not a totally indefinite division algebra")


def _datum(args, cfg: Config):
    alg = _algebra(args)
    _indefinite_division(alg)
    order = maximal_order(alg)
    ideal = None
    if getattr(args, "ideal", None):
        ideal = LeftIdeal(lattice_from_json(_load_json(args.ideal)), order)
    return make_principal_datum(order, ideal, cfg.search_bound)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


# -- commands --------------------------------------------------------------


def cmd_alg(args, cfg: Config) -> int:
    alg = _algebra(args)
    r = alg.ramification
    indefinite, division = is_totally_indefinite(alg), is_division(alg)
    _emit(
        {
            "a": fmt_rat(alg.a),
            "b": fmt_rat(alg.b),
            "ramified_primes": list(r.ramified_primes),
            "infinite_ramified": r.infinite_ramified,
            "D": r.discriminant,
            "split": not division,
            "totally_indefinite": indefinite,
            "division": division,
            "twisting_divisors": twisting_divisors(alg) if indefinite and division else [],
        },
        cfg,
    )
    return EXIT_OK


def cmd_degree(args, cfg: Config) -> int:
    report = degree_forgetful_F(_datum(args, cfg), cfg.search_bound)
    _emit(report.to_json(), cfg)
    if not report.complete:
        return EXIT_NOT_FOUND
    return EXIT_OK if report.consistent else EXIT_INVARIANT


def cmd_datum(args, cfg: Config) -> int:
    print(json.dumps(datum_to_json(_datum(args, cfg))))
    return EXIT_OK


def cmd_embed(args, cfg: Config) -> int:
    alg = _algebra(args)
    _indefinite_division(alg)
    embeddable = embeddable_maximal(alg, args.d) if args.f == 1 else None
    pair = find_embedding(maximal_order(alg), QuadOrder(args.d, args.f), cfg.search_bound)
    _emit({"D": alg.discriminant, "d": args.d, "f": args.f, "embeddable": embeddable, "pair": pair and pair_to_json(pair)}, cfg)
    if pair is None and embeddable:
        return EXIT_NOT_FOUND
    return EXIT_OK


def cmd_hilbert_degree(args, cfg: Config) -> int:
    datum = _datum(args, cfg)
    if args.from_twist:
        witnesses = twist_witnesses(datum, cfg.search_bound)
        if not witnesses:
            raise NotFoundWithinBound("no twist of the datum to build a pair from")
        pair = pair_from_element(datum.order, witnesses[0].chi)
    else:
        if args.d is None:
            raise UsageError("need -d (or --from-twist)")
        pair = find_embedding(datum.order, QuadOrder(args.d, args.f), cfg.search_bound)
        if pair is None:
            raise NotFoundWithinBound(f"no optimal embedding of discriminant-{args.d} order within bound")
    degree = degree_forgetful_hilbert(datum, pair.phi_image, cfg.search_bound)
    _emit(
        {
            "D": datum.D,
            "mu": quaternion_to_json(datum.mu),
            "pair": pair_to_json(pair),
            "contains_twist": contains_twist(pair, datum),
            "degree": degree,
        },
        cfg,
    )
    return EXIT_OK


TABLE_COLUMNS = ("D", "twisting", "twisting_divisors", "omega_odd", "degree_piF", "W0_order", "consistent")


def table_row(D: int, bound: int) -> list[str]:
    alg = algebra_for_discriminant(D)
    divisors = twisting_divisors(alg)
    try:
        datum = make_principal_datum(maximal_order(alg), None, bound)
    except NotFoundWithinBound:
        return [str(D), str(bool(divisors)).lower(), ",".join(map(str, divisors)) or "-", "-", "-", "-", "bound"]
    r = degree_forgetful_F(datum, bound)
    flag = str(r.consistent).lower() if r.complete else "bound"
    return [
        str(D),
        str(r.twisting).lower(),
        ",".join(map(str, r.twisting_divisors)) or "-",
        str(r.omega_odd),
        str(r.degree_piF),
        str(r.W0_order),
        flag,
    ]


def cmd_table(args, cfg: Config) -> int:
    if not 1 <= args.dmax <= TABLE_DMAX:
        raise UsageError(f"dmax must lie in [1, {TABLE_DMAX}]")
    if args.primes < 2 or args.primes % 2:
        raise UsageError("prime count must be even and at least 2")
    print("\t".join(TABLE_COLUMNS))
    for D in range(2, args.dmax + 1):
        if is_squarefree(D) and len(prime_divisors(D)) == args.primes:
            print("\t".join(table_row(D, cfg.search_bound)))
    return EXIT_OK


def cmd_ns(args, cfg: Config) -> int:
    datum = datum_from_json(_load_json(args.datum))
    if args.scale < 1:
        raise UsageError("scale must be a positive integer")
    c1 = datum.principal_c1 * args.scale
    formula, oracle = degree_formula(datum, c1), degree_oracle(datum, c1)
    point = ComplexPoint(datum.algebra, cfg.tau)
    verdict = {}
    for sign, c in (("+", c1), ("-", -c1)):
        try:
            verdict[sign] = positivity_check(datum, c, point, cfg.tolerance)
        except Indeterminate:
            verdict[sign] = "indeterminate"
    _emit(
        {
            "D": datum.D,
            "ns_lattice": lattice_to_json(ns_lattice(datum)),
            "c1": quaternion_to_json(c1),
            "degree": fmt_rat(formula),
            "oracle": fmt_rat(oracle),
            "positive": verdict,
        },
        cfg,
    )
    return EXIT_OK if formula == oracle else EXIT_INVARIANT


# -- parser ----------------------------------------------------------------


def _add_algebra_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-a", help="first structure constant (integer or p/q)")
    p.add_argument("-b", help="second structure constant (integer or p/q)")
    p.add_argument("--disc", type=int, help="pick a small presentation of this discriminant")


def _common_options(default) -> argparse.ArgumentParser:
    # shared by the top level and every subcommand, so options go on either side
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--bound", type=int, default=default(None), help="coordinate search bound (default 50 or $QUATFORGET_BOUND)")
    p.add_argument("--tau", type=complex, default=default(1j), help="point of the upper half plane for positivity")
    p.add_argument("--tolerance", type=float, default=default(1e-9))
    p.add_argument("--output", choices=("json", "text"), default=default("json"))
    return p


def build_parser() -> argparse.ArgumentParser:
    top = _common_options(lambda v: v)
    common = _common_options(lambda v: argparse.SUPPRESS)
    parser = _Parser(
        prog="quatforget",
        description="Quaternion orders, Atkin-Lehner groups and forgetful-map degrees.",
        parents=[top],
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("alg", parents=[common], help="ramification, discriminant and twisting divisors")
    _add_algebra_args(p)
    p.set_defaults(func=cmd_alg)

    p = sub.add_parser("degree", parents=[common], help="degree of the forgetful map and the stable group")
    _add_algebra_args(p)
    p.add_argument("--ideal", help="JSON lattice of a left ideal of the computed maximal order")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("datum", parents=[common], help="print a principal datum as JSON")
    _add_algebra_args(p)
    p.add_argument("--ideal")
    p.set_defaults(func=cmd_datum)

    p = sub.add_parser("embed", parents=[common], help="optimal embedding of a real quadratic order")
    _add_algebra_args(p)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-f", type=int, default=1)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("hilbert-degree", parents=[common], help="degree of the map to the Hilbert variety of a pair")
    _add_algebra_args(p)
    p.add_argument("-d", type=int)
    p.add_argument("-f", type=int, default=1)
    p.add_argument("--from-twist", action="store_true", help="use the pair generated by a twist")
    p.set_defaults(func=cmd_hilbert_degree)

    p = sub.add_parser("table", parents=[common], help="TSV table of degrees over discriminants")
    p.add_argument("dmax", type=int)
    p.add_argument("--primes", type=int, default=2, help="number of prime factors of D")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("ns", parents=[common], help="Neron-Severi lattice, degree and positivity of a datum")
    p.add_argument("datum", help="datum JSON file")
    p.add_argument("--scale", type=int, default=1, help="multiply the principal class by this integer")
    p.set_defaults(func=cmd_ns)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        bound = default_bound() if args.bound is None else args.bound
        cfg = Config(bound, args.tau, args.tolerance, args.output)
        return args.func(args, cfg)
    except (UsageError, DomainError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotFoundWithinBound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (InvariantViolation, SaturationFailed, Indeterminate) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
