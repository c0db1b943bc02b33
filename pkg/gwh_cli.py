#!/usr/bin/env python3
"""
GW/H calculator command line
- hurwitz: Hurwitz numbers by brute force, class algebra or tropical covers
- descendant: stationary descendant invariants of the line (or the cycle) by tropical covers,
  Fock matrix elements or completed-cycle substitution
- fock: evaluate an operator expression between a bra and a ket
- coeffs: completed cycles
- covers: list tropical covers with multiplicities, optionally as DOT
- verify: run the acceptance suites and print a pass/fail table

Exit codes: 0 success, 1 invalid input or violated constraint, 2 verification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from exact_arith import format_rational
from fock import graded_to_json, matrix_element, parse_expression, trace_element
from gwh import substitute_and_evaluate, substitute_elliptic
from local_gw import completion_coefficients
from partitions import (
    ConstraintViolation, DegreeMismatch, GWHError, Partition, check_same_size, parse_partition,
    parse_powers, parse_profiles, size,
)
from perm_hurwitz import HurwitzProblem, hurwitz_bruteforce, hurwitz_class_algebra
from run_config import RunConfig, load_config
from trop_covers import (
    TargetShape, caterpillar_for, covers_to_json, enumerate_descendant_covers, enumerate_elliptic_covers,
    enumerate_hurwitz_covers,
)
from verify_suite import SUITES, run_verification

logger = logging.getLogger(__name__)

HURWITZ_METHODS = ("bruteforce", "class-algebra", "tropical")
DESCENDANT_METHODS = ("tropical", "fock", "substitution")


class UsageError(GWHError):
    relation = "usage"


class VerificationFailed(Exception):
    def __init__(self, payload: Dict):
        super().__init__("methods disagree")
        self.payload = payload


class JsonArgumentParser(argparse.ArgumentParser):
    """Usage errors become UsageError so they share the JSON error path."""

    def error(self, message: str):
        raise UsageError(message)


# request validation

def _hurwitz_problem(args) -> HurwitzProblem:
    profiles = parse_profiles(args.profiles)
    d = check_same_size(profiles, args.d)
    if d < 1:
        raise DegreeMismatch("Hurwitz numbers need positive degree")
    problem = HurwitzProblem(d, tuple(profiles), target_genus=args.h, connected=not args.disconnected)
    g = problem.riemann_hurwitz_genus()
    if g is None:
        raise ConstraintViolation(
            f"d(2-2h) - sum(d - l(mu)) = {problem.source_euler()} is odd", relation="riemann-hurwitz")
    if problem.connected and g < 0:
        raise ConstraintViolation(f"a connected cover would have genus {g}", relation="riemann-hurwitz")
    return problem


def _descendant_genus(mu: Partition, nu: Partition, insertions: Sequence[int], genus: Optional[int]) -> int:
    twice = sum(insertions) + 2 - len(mu) - len(nu)
    if twice % 2 or (genus is not None and twice != 2 * genus):
        raise ConstraintViolation(
            f"sum k_i = {sum(insertions)} does not equal 2g - 2 + l(mu) + l(nu)", relation="dimension")
    return twice // 2


def _line_request(args):
    mu, nu = parse_partition(args.mu), parse_partition(args.nu)
    if size(mu) != size(nu) or not size(mu):
        raise DegreeMismatch(f"|mu| = {size(mu)} and |nu| = {size(nu)} must be equal and positive")
    insertions = parse_powers(args.k)
    g = _descendant_genus(mu, nu, insertions, args.genus)
    return mu, nu, insertions, g


def _cycle_request(args):
    if args.d is None or args.d < 1:
        raise DegreeMismatch("cycle targets need a positive --d")
    insertions = parse_powers(args.k)
    g = _descendant_genus((), (), insertions, args.genus)
    return args.d, insertions, g


def _agree(values: Dict[str, Fraction], payload: Dict) -> Dict:
    payload["values"] = {m: format_rational(v) for m, v in values.items()}
    if len(set(values.values())) > 1:
        logger.error(f"[VERIFY] methods disagree: {payload['values']}")
        raise VerificationFailed(payload)
    payload["value"] = format_rational(next(iter(values.values())))
    return payload


# subcommands

def cmd_hurwitz(args, config: RunConfig) -> Dict:
    problem = _hurwitz_problem(args)
    methods = HURWITZ_METHODS if args.method == "all" else (args.method,)
    values: Dict[str, Fraction] = {}
    for method in methods:
        if method == "bruteforce":
            values[method] = hurwitz_bruteforce(problem, config["bruteforce_max_degree"])
        elif method == "class-algebra":
            values[method] = hurwitz_class_algebra(problem)
        else:
            if problem.target_genus == 0:
                target = caterpillar_for(problem.profiles, problem.degree)
            elif problem.target_genus == 1:
                target = TargetShape.cycle(vertical=problem.profiles)
            else:
                raise ConstraintViolation("tropical covers handle target genus 0 and 1", relation="target-genus")
            values[method] = sum((m.total for _, m in enumerate_hurwitz_covers(
                target, degree=problem.degree, connected=problem.connected)), Fraction(0))
    return _agree(values, {"method": args.method})


def cmd_descendant(args, config: RunConfig) -> Dict:
    connected = not args.disconnected
    methods = DESCENDANT_METHODS if args.method == "all" else (args.method,)
    if connected and methods != ("tropical",):
        raise UsageError("Fock and substitution evaluate disconnected invariants; pass --disconnected")
    values: Dict[str, Fraction] = {}
    payload: Dict = {"method": args.method}
    if args.target == "cycle":
        d, insertions, g = _cycle_request(args)
        for method in methods:
            if method == "tropical":
                covers = enumerate_elliptic_covers(d, insertions, genus=g, connected=connected)
                payload["covers"] = covers_to_json(covers)
                values[method] = sum((m.total for _, m in covers), Fraction(0))
            elif method == "fock":
                values[method] = trace_element(d, insertions, genus=g)
            else:
                values[method] = substitute_elliptic(d, insertions, genus=g)
    else:
        mu, nu, insertions, g = _line_request(args)
        for method in methods:
            if method == "tropical":
                covers = enumerate_descendant_covers(mu, nu, insertions, genus=g, connected=connected)
                payload["covers"] = covers_to_json(covers)
                values[method] = sum((m.total for _, m in covers), Fraction(0))
            elif method == "fock":
                values[method] = matrix_element(mu, nu, insertions, genus=g)
            else:
                values[method] = substitute_and_evaluate(mu, nu, insertions, genus=g)
    payload["genus"] = g
    return _agree(values, payload)


def cmd_fock(args, config: RunConfig) -> Dict:
    expr = parse_expression(args.expr)
    payload: Dict = {"method": "fock", "value": graded_to_json(expr.evaluate(args.degree_cap))}
    if args.dot:
        graphs = list(expr.fragment().completions())
        payload["dot"] = [g.to_dot(f"feynman{i}") for i, g in enumerate(graphs)]
    return payload


def cmd_coeffs(args, config: RunConfig) -> Dict:
    if args.k < 0:
        raise UsageError("--k must be non-negative")
    return completion_coefficients(args.k).to_json()


def cmd_covers(args, config: RunConfig) -> Dict:
    connected = not args.disconnected
    if args.kind == "line":
        mu, nu, insertions, g = _line_request(args)
        covers = enumerate_descendant_covers(mu, nu, insertions, genus=g, connected=connected)
    elif args.kind == "caterpillar":
        profiles = parse_profiles(args.profiles)
        d = check_same_size(profiles, args.d)
        covers = enumerate_hurwitz_covers(caterpillar_for(profiles, d), degree=d, connected=connected)
    elif args.profiles:
        profiles = parse_profiles(args.profiles)
        d = check_same_size(profiles, args.d)
        covers = enumerate_hurwitz_covers(TargetShape.cycle(vertical=profiles), degree=d, connected=connected)
    else:
        d, insertions, g = _cycle_request(args)
        covers = enumerate_elliptic_covers(d, insertions, genus=g, connected=connected)
    payload: Dict = {"method": "tropical", "covers": covers_to_json(covers),
                     "value": format_rational(sum((m.total for _, m in covers), Fraction(0)))}
    if args.dot:
        payload["dot"] = [cover.to_dot(f"cover{i}") for i, (cover, _) in enumerate(covers)]
    return payload


def cmd_verify(args, config: RunConfig) -> Dict:
    suites = args.suite or None
    report = run_verification(config, budget=args.budget, suites=suites, workers=args.workers)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_json(include_passing=True), indent=2) + "\n")
        logger.info(f"[VERIFY] detailed results saved to {args.report}")
    if not args.json:
        print(report.format_table())
    payload = report.to_json()
    if not report.passed:
        raise VerificationFailed(payload)
    return payload if args.json else {}


# parser

def build_parser() -> argparse.ArgumentParser:
    parser = JsonArgumentParser(prog="gwh_cli.py", description="GW/H correspondence calculator")
    parser.add_argument("--config", type=Path, default=None, help="config.json path")
    parser.add_argument("--overrides", type=Path, default=None, help="TOML override file")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--quiet", action="store_true", help="log warnings and errors only")
    parser.add_argument("--workers", type=int, default=None, help="verify thread pool size")
    parser.add_argument("--pretty", action="store_true", help="indent JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hurwitz", help="Hurwitz numbers")
    p.add_argument("--d", type=int, default=None, help="degree (inferred from the profiles)")
    p.add_argument("--profiles", default="", help='semicolon-separated profiles, e.g. "2;1,1"')
    p.add_argument("--h", type=int, default=0, help="target genus")
    p.add_argument("--disconnected", action="store_true")
    p.add_argument("--method", choices=HURWITZ_METHODS + ("all",), default="class-algebra")
    p.set_defaults(func=cmd_hurwitz)

    p = sub.add_parser("descendant", help="stationary descendant invariants")
    p.add_argument("--target", choices=("line", "cycle"), default="line")
    p.add_argument("--mu", default="")
    p.add_argument("--nu", default="")
    p.add_argument("--d", type=int, default=None, help="degree for cycle targets")
    p.add_argument("--k", default="", help="comma-separated insertion powers")
    p.add_argument("--genus", type=int, default=None)
    p.add_argument("--disconnected", action="store_true")
    p.add_argument("--method", choices=DESCENDANT_METHODS + ("all",), default="tropical")
    p.set_defaults(func=cmd_descendant)

    p = sub.add_parser("fock", help="evaluate an operator expression")
    p.add_argument("--expr", required=True, help='e.g. "bra 2 M(1) ket 1,1"')
    p.add_argument("--degree-cap", type=int, default=None)
    p.add_argument("--dot", action="store_true", help="emit Feynman diagrams (a(n) products only)")
    p.set_defaults(func=cmd_fock)

    p = sub.add_parser("coeffs", help="completed cycle (k+1)bar")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("covers", help="list tropical covers")
    p.add_argument("--kind", choices=("line", "caterpillar", "cycle"), default="line")
    p.add_argument("--mu", default="")
    p.add_argument("--nu", default="")
    p.add_argument("--k", default="")
    p.add_argument("--profiles", default="")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--genus", type=int, default=None)
    p.add_argument("--disconnected", action="store_true")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_covers)

    p = sub.add_parser("verify", help="run the acceptance suites")
    p.add_argument("--budget", default="quick", help="quick or full (or any budget in the config)")
    p.add_argument("--suite", action="append", choices=SUITES, help="repeatable; default all")
    p.add_argument("--report", type=Path, default=None, help="write every check as JSON")
    p.add_argument("--json", action="store_true", help="print the JSON summary instead of the table")
    p.set_defaults(func=cmd_verify)
    return parser


def _emit(payload: Dict, pretty: bool):
    if pretty:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def _error_payload(e: Exception) -> Dict:
    body = {"type": type(e).__name__, "message": str(e)}
    relation = getattr(e, "relation", None)
    if relation:
        body["relation"] = relation
    return {"error": body}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        _emit(_error_payload(e), False)
        return 1
    try:
        config = load_config(args.config, args.overrides)
    except GWHError as e:
        _emit(_error_payload(e), False)
        return 1
    if args.workers is not None:
        config.merge({"workers": args.workers})
    level = "WARNING" if args.quiet else (args.log_level or config["log_level"]).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format='%(asctime)s - %(message)s')
    logger.debug(f"[CONFIG] {config.to_json()}")

    try:
        config.validate()
        payload = args.func(args, config)
    except VerificationFailed as e:
        _emit(e.payload, args.pretty)
        return 2
    except GWHError as e:
        _emit(_error_payload(e), args.pretty)
        return 1
    if payload:
        _emit(payload, args.pretty)
    return 0


if __name__ == "__main__":
    sys.exit(main())
