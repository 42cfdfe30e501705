"""Command-line front door for the dynamics-at-infinity toolkit (exact outputs as JSON, DOT, CSV or text)"""
import argparse
import dataclasses
import logging
import os
import sys
from typing import List, Optional

from infinity_dynamics.boundary import DivisorAtInfinity, load_completion, meet
from infinity_dynamics.config import Config
from infinity_dynamics.degoracle import PolyMap, degree_table, iterate_degrees, lambda1_estimate
from infinity_dynamics.dynamics import MonomialEndo, classify_normal_form, eigenvaluation
from infinity_dynamics.errors import InfinityDynamicsError, ParseError
from infinity_dynamics.exactnum import IntMat2, characteristic_report
from infinity_dynamics.fixtures import verify_all
from infinity_dynamics.perron import QuadraticInteger, is_weak_perron, realize_as_matrix
from infinity_dynamics.thompson import loxodromic_analysis, parse_point, point_str, word_element
from infinity_dynamics.utils import (dump_json, ensure_dir, frame_to_text, parse_int_list, set_package_level,
                                     setup_logger)
from infinity_dynamics.zigzag import Zigzag, standardize


logger = setup_logger("infinity_dynamics.cli")

LOG_LEVELS = {"debug": logging.DEBUG, "info": logging.INFO, "warning": logging.WARNING, "error": logging.ERROR}


class CliParser(argparse.ArgumentParser):
    """ArgumentParser reporting usage errors as one JSON line on stderr."""

    def error(self, message):
        sys.stderr.write(dump_json({"error": "UsageError", "message": message}) + "\n")
        sys.exit(2)


def parse_matrix(text: str) -> IntMat2:
    a, b, c, d = parse_int_list(text, expected=4)
    return IntMat2(a, b, c, d)


def build_parser() -> CliParser:
    p = CliParser(prog="main.py", description="Exact dynamics at infinity of affine surface endomorphisms")
    p.add_argument("--format", choices=["json", "dot", "csv", "text"], default="json", help="Output format")
    p.add_argument("--log-level", choices=sorted(LOG_LEVELS), default="warning", help="Logging level")
    p.add_argument("--word-length", type=int, default=6, help="Free product check length L")
    p.add_argument("--term-cap", type=int, default=10**6, help="Term cap for symbolic iteration")
    p.add_argument("-o", "--output", help="Write the result to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=CliParser)

    s = sub.add_parser("lambda1", help="Spectral radius of a 2x2 exponent matrix")
    s.add_argument("--matrix", required=True, help="Entries a,b,c,d of [[a,b],[c,d]]")

    s = sub.add_parser("eigenval", help="Eigenvaluation of a monomial germ")
    s.add_argument("--matrix", required=True, help="Entries a,b,c,d of [[a,b],[c,d]]")
    s.add_argument("--wild", action="store_true", help="Determinant divisible by the characteristic")
    s.add_argument("--normalization", choices=["t", "min", "weighted"], default="t")

    s = sub.add_parser("perron", help="Weak Perron numbers: largest root of T^2 - aT + b")
    s.add_argument("action", choices=["check", "realize"])
    s.add_argument("a", type=int)
    s.add_argument("b", type=int)

    s = sub.add_parser("zigzag", help="Zigzag rewriting")
    s.add_argument("action", choices=["standardize"])
    s.add_argument("literal", help='Self-intersections such as "0,-2,-2"')

    s = sub.add_parser("boundary", help="Boundary intersection theory")
    s.add_argument("action", choices=["duals"])
    s.add_argument("path", help="Boundary JSON or YAML file")

    s = sub.add_parser("meet", help="Meet of two divisors at infinity")
    s.add_argument("path", help="Boundary JSON or YAML file")
    s.add_argument("first", help='Divisor such as "2*E + F"')
    s.add_argument("second", help='Divisor such as "E + 3*F"')

    s = sub.add_parser("markov", help="Markov surface action on the circle at infinity")
    s.add_argument("action", choices=["act", "fixed"])
    s.add_argument("word", help="Word over x, y, z (last letter acts first)")
    s.add_argument("point", nargs="?", help='Rational point or "inf"')

    s = sub.add_parser("degree-growth", help="Degrees of iterates of a polynomial map")
    s.add_argument("--map", required=True, dest="map_text", help='Map literal such as "x^2, y^3"')
    s.add_argument("-n", type=int, default=6, help="Number of iterates (at most 12)")

    s = sub.add_parser("fixtures", help="Replay the worked examples")
    s.add_argument("action", choices=["verify"])
    return p


def cmd_lambda1(args, config: Config):
    return characteristic_report(parse_matrix(args.matrix)), 0


def cmd_eigenval(args, config: Config):
    config = dataclasses.replace(config, eigen_normalization=args.normalization)
    endo = MonomialEndo(parse_matrix(args.matrix), tame=not args.wild)
    eigen = eigenvaluation(endo, config)
    payload = eigen.to_json()
    payload["normal_form"] = classify_normal_form(eigen, tame=endo.tame)
    return payload, 0


def cmd_perron(args, config: Config):
    q = QuadraticInteger.root(args.a, args.b)
    if args.action == "check":
        return {"value": str(q.value()), "weak_perron": is_weak_perron(q, config)}, 0
    matrix = realize_as_matrix(q, config)
    if config.output_format == "text":
        return str(matrix), 0
    return {"matrix": matrix.rows()}, 0


def cmd_zigzag(args, config: Config):
    z = Zigzag.parse(args.literal)
    standard, moves = standardize(z)
    return {"input": str(z), "standard": str(standard), "moves": [m.to_json() for m in moves]}, 0


def cmd_boundary(args, config: Config):
    X = load_completion(args.path)
    if config.output_format == "dot":
        return X.to_dot(), 0
    if config.output_format in ("csv", "text"):
        return frame_to_text(X.matrix_frame(), config.output_format), 0
    return {"duals": {name: X.dual_divisor(name).to_dict() for name in X.names}}, 0


def cmd_meet(args, config: Config):
    X = load_completion(args.path)
    final, result = meet(X, DivisorAtInfinity.parse(args.first), DivisorAtInfinity.parse(args.second), config)
    if config.output_format == "dot":
        return final.to_dot(), 0
    return {"completion": final.to_json(), "meet": result.to_dict(),
            "blowups": len(final.history) - len(X.history)}, 0


def cmd_markov(args, config: Config):
    g = word_element(args.word)
    if args.action == "act":
        if args.point is None:
            raise ParseError("markov act needs a point")
        t = parse_point(args.point)
        return {"word": args.word, "point": point_str(t), "image": point_str(g(t))}, 0
    report = loxodromic_analysis(g, config)
    return dict(report.to_json(), word=args.word), 0


def cmd_degree_growth(args, config: Config):
    f = PolyMap.parse(args.map_text)
    if config.output_format in ("csv", "text"):
        return frame_to_text(degree_table({args.map_text: f}, args.n, config), config.output_format), 0
    sequence = iterate_degrees(f, args.n, config)
    payload = {"map": str(f), "degrees": sequence.degrees, "capped": sequence.capped}
    if len(sequence.degrees) >= 3:
        payload["estimate"] = lambda1_estimate(sequence.degrees, config.decimal_digits).to_json()
    return payload, 0


def cmd_fixtures(args, config: Config):
    report = verify_all(config)
    code = 0 if bool(report["passed"].all()) else 1
    if config.output_format in ("csv", "text"):
        return frame_to_text(report, config.output_format), code
    checks = [dict(row, passed=bool(row["passed"])) for row in report.to_dict(orient="records")]
    return {"passed": code == 0, "checks": checks}, code


COMMANDS = {
    "lambda1": cmd_lambda1,
    "eigenval": cmd_eigenval,
    "perron": cmd_perron,
    "zigzag": cmd_zigzag,
    "boundary": cmd_boundary,
    "meet": cmd_meet,
    "markov": cmd_markov,
    "degree-growth": cmd_degree_growth,
    "fixtures": cmd_fixtures,
}


def emit_error(error: Exception) -> None:
    sys.stderr.write(dump_json({"error": type(error).__name__, "message": str(error)}) + "\n")


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = Config(word_length=args.word_length, term_cap=args.term_cap,
                        output_format=args.format, log_level=LOG_LEVELS[args.log_level])
    except ValueError as e:
        emit_error(ParseError(str(e)))
        return 2
    set_package_level(config.log_level)

    try:
        output, code = COMMANDS[args.command](args, config)
    except ParseError as e:
        emit_error(e)
        return 2
    except InfinityDynamicsError as e:
        logger.error(f"{args.command} failed: {e}")
        emit_error(e)
        return 1

    text = (output if isinstance(output, str) else dump_json(output)).rstrip("\n") + "\n"
    if args.output:
        ensure_dir(os.path.dirname(os.path.abspath(args.output)))
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"{args.command} result written to {args.output}")
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
