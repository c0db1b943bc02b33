#!/usr/bin/env python3
"""
GW/H acceptance suites
- hurwitz: brute force = class algebra = tropical covers (caterpillar and cycle targets)
- vertex: series vertex multiplicities against the genus 0 and genus 1 closed forms
- descendant: tropical = Fock matrix element = completed-cycle substitution (line and cycle targets)
- surgery: cover-by-cover surgery totals and the collapse round trip
- operators: vertex-operator M_k against vertex-multiplicity M_k, Wick against direct action
- split: degeneration gluing at every cut point
- cut-join: Fock double Hurwitz numbers against monodromy counts
- completion: one-point completion coefficients against the correspondence linear system
Instances run on a thread pool; the report is deterministic apart from timings.
"""
from __future__ import annotations

import concurrent.futures
import hashlib
import itertools
import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from exact_arith import format_rational
from fock import (
    build_Mk, build_Mk_vertex_form, cut_join, double_hurwitz, matrix_element, random_product,
    trace_element, vacuum_expectation, wick_expectation,
)
from gwh import collapse_surgery, substitute_and_evaluate, substitute_elliptic, tgwh_surgery
from local_gw import (
    completion_coefficients, genus_one_closed_form, solve_completion_by_correspondence, vertex_multiplicity,
)
from partitions import (
    GWHError, Partition, WElement, centralizer_size, enumerate_partitions, format_partition, make_partition, ones, size,
)
from perm_hurwitz import HurwitzProblem, hurwitz_bruteforce, hurwitz_class_algebra
from run_config import RunConfig
from trop_covers import (
    TargetShape, caterpillar_for, descendant_invariant, elliptic_invariant, enumerate_descendant_covers,
    hurwitz_tropical, split_at_point,
)

logger = logging.getLogger(__name__)

SUITES = ("hurwitz", "vertex", "descendant", "surgery", "operators", "split", "cut-join", "completion")

# walk size above which connected monodromy counting is skipped
BRUTEFORCE_WALK_CAP = 200_000

# <(1^4)| tau_3 tau_3 |(1^4)>, disconnected, genus 0
EXAMPLE_MU = (1, 1, 1, 1)
EXAMPLE_INSERTIONS = (3, 3)
EXAMPLE_TOTAL = Fraction(457, 2304)

Values = Dict[str, Fraction]
Instance = Tuple[str, Callable[[], Values]]


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    values: Dict[str, str] = field(default_factory=dict)
    error: Optional[str] = None

    def to_json(self) -> Dict:
        out = {"suite": self.suite, "name": self.name, "passed": self.passed, "values": self.values}
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class VerifyReport:
    budget: str
    checks: List[Check]
    seconds: Dict[str, float]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def table(self) -> List[Dict]:
        rows = []
        for suite in SUITES:
            mine = [c for c in self.checks if c.suite == suite]
            if not mine:
                continue
            ok = sum(1 for c in mine if c.passed)
            rows.append({"suite": suite, "instances": len(mine), "passed": ok, "failed": len(mine) - ok})
        return rows

    def digest(self) -> str:
        body = json.dumps([c.to_json() for c in self.checks], sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(body.encode()).hexdigest()

    def to_json(self, include_passing: bool = False) -> Dict:
        checks = self.checks if include_passing else [c for c in self.checks if not c.passed]
        return {
            "budget": self.budget,
            "passed": self.passed,
            "table": self.table(),
            "checks": [c.to_json() for c in checks],
            "digest": self.digest(),
        }

    def format_table(self) -> str:
        lines = [f"{'suite':<12} {'instances':>9} {'passed':>7} {'failed':>7} {'seconds':>8}", "-" * 47]
        for row in self.table():
            mark = "PASS" if not row["failed"] else "FAIL"
            lines.append(f"{row['suite']:<12} {row['instances']:>9} {row['passed']:>7} {row['failed']:>7} "
                         f"{self.seconds.get(row['suite'], 0.0):>8.2f}  {mark}")
        lines.append("-" * 47)
        lines.append(f"digest {self.digest()}")
        return "\n".join(lines)


# instance generators

def insertion_tuples(total: int, n: int) -> Iterator[Tuple[int, ...]]:
    """Ordered n-tuples of non-negative powers summing to total."""
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in insertion_tuples(total - first, n - 1):
            yield (first,) + rest


def descendant_instances(d_max: int, genus_max: int, n_max: int) -> Iterator[Tuple[Partition, Partition, Tuple[int, ...], int]]:
    for d in range(1, d_max + 1):
        parts = enumerate_partitions(d)
        for mu in parts:
            for nu in parts:
                for g in range(1 - len(mu) - len(nu) + 1, genus_max + 1):
                    total = 2 * g - 2 + len(mu) + len(nu)
                    if total < 0:
                        continue
                    for n in range(n_max + 1):
                        for ks in insertion_tuples(total, n):
                            yield mu, nu, ks, g


def _walk_size(d: int, h: int, profiles: Sequence[Partition]) -> int:
    total = factorial(d) ** (2 * h)
    for mu in profiles[:-1]:
        total *= factorial(d) // centralizer_size(mu)
    return total


def _all_equal(values: Values) -> bool:
    return len(set(values.values())) <= 1


class VerificationSuite:
    """Builds every instance of the selected suites and runs them on a thread pool."""

    def __init__(self, config: Optional[RunConfig] = None, budget: str = "quick", workers: Optional[int] = None):
        self.config = config or RunConfig()
        self.budget_name = budget
        self.budget = self.config.budget(budget)
        self.workers = workers or self.config["workers"]

    # hurwitz

    def hurwitz_instances(self) -> List[Instance]:
        out: List[Instance] = []
        for h, d_cap in ((0, self.budget["d_max"]), (1, self.budget["elliptic_d_max"])):
            for d in range(1, d_cap + 1):
                parts = enumerate_partitions(d)
                for n in range(self.budget["profiles_max"] + 1):
                    for profiles in itertools.combinations_with_replacement(parts, n):
                        problem = HurwitzProblem(d, profiles, target_genus=h, connected=False)
                        if problem.riemann_hurwitz_genus() is None:
                            continue
                        for connected in (False, True):
                            name = (f"h={h} d={d} [{';'.join(format_partition(mu) for mu in profiles)}]"
                                    f"{' connected' if connected else ''}")
                            out.append((name, self._hurwitz_check(d, h, profiles, connected)))
        return out

    def _hurwitz_check(self, d: int, h: int, profiles: Tuple[Partition, ...], connected: bool) -> Callable[[], Values]:
        def run() -> Values:
            problem = HurwitzProblem(d, profiles, target_genus=h, connected=connected)
            if h:
                target = TargetShape.cycle(vertical=profiles)
            else:
                target = caterpillar_for(profiles, d)
            values = {
                "class-algebra": hurwitz_class_algebra(problem),
                "tropical": hurwitz_tropical(target, degree=d, connected=connected),
            }
            walkable = not connected or _walk_size(d, h, profiles) <= BRUTEFORCE_WALK_CAP
            if d <= self.config["bruteforce_max_degree"] and walkable:
                values["bruteforce"] = hurwitz_bruteforce(problem, self.config["bruteforce_max_degree"])
            return values
        return run

    # vertex multiplicities

    def vertex_instances(self) -> List[Instance]:
        out: List[Instance] = [("g=1 (1,1)|(2) spot value", lambda: {
            "series": vertex_multiplicity(1, (1, 1), (2,)), "expected": Fraction(5, 24)})]
        for d in range(1, self.budget["d_max"] + 4):
            out.append((f"d={d} genus 0", self._vertex_check(d, 0)))
            out.append((f"d={d} genus 1", self._vertex_check(d, 1)))
        return out

    @staticmethod
    def _vertex_check(d: int, g: int) -> Callable[[], Values]:
        def run() -> Values:
            parts = enumerate_partitions(d)
            mismatches = 0
            for mu in parts:
                for nu in parts:
                    closed = Fraction(1) if g == 0 else genus_one_closed_form(mu, nu)
                    if vertex_multiplicity(g, mu, nu) != closed:
                        logger.error(f"[VERIFY] m_v({g}, {mu}, {nu}) disagrees with the closed form")
                        mismatches += 1
            return {"mismatches": Fraction(mismatches), "expected": Fraction(0)}
        return run

    # three-way descendant equality

    def descendant_instances(self) -> List[Instance]:
        out: List[Instance] = []
        d_max = min(self.budget["d_max"], 4)
        for mu, nu, ks, g in descendant_instances(d_max, self.budget["genus_max"], self.budget["insertions_max"]):
            name = f"<{format_partition(mu)}|{','.join(map(str, ks))}|{format_partition(nu)}> g={g}"
            out.append((name, self._descendant_check(mu, nu, ks, g)))
        for d in range(1, self.budget["elliptic_d_max"] + 1):
            for g in range(1, self.budget["genus_max"] + 1):
                for n in range(self.budget["insertions_max"] + 1):
                    for ks in insertion_tuples(2 * g - 2, n):
                        out.append((f"elliptic d={d} k={','.join(map(str, ks))} g={g}",
                                    self._elliptic_check(d, ks, g)))
        out.append(("example (1^4)|3,3|(1^4) total", lambda: {
            "tropical": descendant_invariant(EXAMPLE_MU, EXAMPLE_MU, EXAMPLE_INSERTIONS, genus=0),
            "expected": EXAMPLE_TOTAL}))
        return out

    @staticmethod
    def _descendant_check(mu: Partition, nu: Partition, ks: Tuple[int, ...], g: int) -> Callable[[], Values]:
        def run() -> Values:
            return {
                "tropical": descendant_invariant(mu, nu, ks, genus=g),
                "fock": matrix_element(mu, nu, ks, genus=g),
                "substitution": substitute_and_evaluate(mu, nu, ks, genus=g),
            }
        return run

    @staticmethod
    def _elliptic_check(d: int, ks: Tuple[int, ...], g: int) -> Callable[[], Values]:
        def run() -> Values:
            return {
                "tropical": elliptic_invariant(d, ks, genus=g),
                "fock": trace_element(d, ks, genus=g),
                "substitution": substitute_elliptic(d, ks, genus=g),
            }
        return run

    # surgery

    def surgery_instances(self) -> List[Instance]:
        out: List[Instance] = []
        for i, _ in enumerate(enumerate_descendant_covers(EXAMPLE_MU, EXAMPLE_MU, EXAMPLE_INSERTIONS, genus=0)):
            out.append((f"example cover {i}", self._surgery_check(EXAMPLE_MU, EXAMPLE_MU, EXAMPLE_INSERTIONS, 0, i)))
        d_max = min(self.budget["d_max"], 3)
        for mu, nu, ks, g in descendant_instances(d_max, self.budget["genus_max"], 1):
            if len(ks) != 1:
                continue
            for i, _ in enumerate(enumerate_descendant_covers(mu, nu, ks, genus=g)):
                name = f"<{format_partition(mu)}|{ks[0]}|{format_partition(nu)}> g={g} cover {i}"
                out.append((name, self._surgery_check(mu, nu, ks, g, i)))
        return out

    @staticmethod
    def _surgery_check(mu: Partition, nu: Partition, ks: Tuple[int, ...], g: int, index: int) -> Callable[[], Values]:
        def run() -> Values:
            cover, mult = enumerate_descendant_covers(mu, nu, ks, genus=g)[index]
            result = tgwh_surgery(cover)
            for e in result.entries:
                if collapse_surgery(e.cover, ks) != cover:
                    raise GWHError(f"surgery output does not collapse back onto cover {index}")
            return {"cover": mult.total, "surgery": result.total}
        return run

    # operator identities

    def operators_instances(self) -> List[Instance]:
        degree_cap = min(self.config["fock_degree_cap"], self.budget["d_max"] + 2)
        genus_cap = min(self.config["fock_genus_cap"], self.budget["genus_max"] + 1)
        out: List[Instance] = []
        for k in range(5):
            out.append((f"M_{k} vertex form D={degree_cap} G={genus_cap}",
                        self._mk_check(k, degree_cap, genus_cap)))
        out.append((f"M_1 = cut-join D={degree_cap}", lambda: {
            "M1": Fraction(int(build_Mk(1, degree_cap, 0).ungraded() == cut_join(degree_cap).ungraded())),
            "expected": Fraction(1)}))
        seed0 = self.config["random_seed"]
        for seed in range(seed0, seed0 + self.config["random_products"]):
            out.append((f"wick seed={seed}", self._wick_check(seed)))
        return out

    @staticmethod
    def _mk_check(k: int, degree_cap: int, genus_cap: int) -> Callable[[], Values]:
        def run() -> Values:
            a = build_Mk(k, degree_cap, genus_cap)
            b = build_Mk_vertex_form(k, degree_cap, genus_cap)
            return {"equal": Fraction(int(a == b)), "expected": Fraction(1)}
        return run

    @staticmethod
    def _wick_check(seed: int) -> Callable[[], Values]:
        def run() -> Values:
            product = random_product(seed)
            return {"direct": vacuum_expectation(product), "wick": wick_expectation(product)[0]}
        return run

    # degeneration splitting

    def split_instances(self) -> List[Instance]:
        out: List[Instance] = []
        d_max = min(self.budget["d_max"], 4)
        for mu, nu, ks, g in descendant_instances(d_max, self.budget["genus_max"], self.budget["insertions_max"]):
            if not ks:
                continue
            for position in range(len(ks) + 1):
                name = f"<{format_partition(mu)}|{','.join(map(str, ks))}|{format_partition(nu)}> cut {position}"
                out.append((name, self._split_check(mu, nu, ks, position)))
        return out

    @staticmethod
    def _split_check(mu: Partition, nu: Partition, ks: Tuple[int, ...], position: int) -> Callable[[], Values]:
        def run() -> Values:
            report = split_at_point(mu, nu, ks, position)
            return {"direct": report.direct, "glued": report.glued}
        return run

    # cut-join

    def cut_join_instances(self) -> List[Instance]:
        out: List[Instance] = []
        for d in range(1, self.budget["d_max"] + 1):
            parts = enumerate_partitions(d)
            r_max = self.budget["cut_join_r_max"] if d > 1 else 0
            for mu in parts:
                for nu in parts:
                    for r in range(r_max + 1):
                        if (len(mu) + len(nu) + r) % 2:
                            continue
                        name = f"({format_partition(mu)}) F2^{r} ({format_partition(nu)})"
                        out.append((name, self._cut_join_check(d, mu, nu, r)))
        return out

    def _cut_join_check(self, d: int, mu: Partition, nu: Partition, r: int) -> Callable[[], Values]:
        def run() -> Values:
            transposition = make_partition((2,) + ones(d - 2)) if d > 1 else ()
            problem = HurwitzProblem(d, (mu,) + (transposition,) * r + (nu,), connected=False)
            return {
                "fock": double_hurwitz(mu, nu, r),
                "bruteforce": hurwitz_bruteforce(problem, self.config["bruteforce_max_degree"]),
            }
        return run

    # completion coefficients

    def completion_instances(self) -> List[Instance]:
        out: List[Instance] = [("k=1 is (2)", lambda: {
            "equal": Fraction(int(completion_coefficients(1).expansion == WElement.basis((2,)))),
            "expected": Fraction(1)})]
        for k in range(self.budget["completion_k_max"] + 1):
            out.append((f"k={k} routes agree", self._completion_check(k)))
        return out

    @staticmethod
    def _completion_check(k: int) -> Callable[[], Values]:
        def run() -> Values:
            one_point = completion_coefficients(k).expansion
            system = solve_completion_by_correspondence(k, d_max=k + 1)
            support = {mu for mu in one_point.support() + system.support() if size(mu)}
            mismatches = [mu for mu in support if one_point.coefficient(mu) != system.coefficient(mu)]
            for mu in mismatches:
                logger.error(f"[VERIFY] completion k={k} term {mu}: {one_point.coefficient(mu)} "
                             f"!= {system.coefficient(mu)}")
            return {"mismatches": Fraction(len(mismatches)), "expected": Fraction(0)}
        return run

    # driver

    def instances(self, suite: str) -> List[Instance]:
        builders = {
            "hurwitz": self.hurwitz_instances,
            "vertex": self.vertex_instances,
            "descendant": self.descendant_instances,
            "surgery": self.surgery_instances,
            "operators": self.operators_instances,
            "split": self.split_instances,
            "cut-join": self.cut_join_instances,
            "completion": self.completion_instances,
        }
        if suite not in builders:
            raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        return builders[suite]()

    @staticmethod
    def _execute(suite: str, name: str, fn: Callable[[], Values]) -> Check:
        try:
            values = fn()
        except Exception as e:
            logger.error(f"[VERIFY] {suite}: {name} raised {type(e).__name__}: {e}")
            return Check(suite, name, False, error=f"{type(e).__name__}: {e}")
        passed = _all_equal(values)
        if not passed:
            logger.error(f"[VERIFY] {suite}: {name} disagrees: {values}")
        return Check(suite, name, passed, {k: format_rational(v) for k, v in sorted(values.items())})

    def run(self, suites: Optional[Sequence[str]] = None) -> VerifyReport:
        suites = list(suites or SUITES)
        checks: List[Check] = []
        seconds: Dict[str, float] = {}
        with concurrent.futures.ThreadPoolExecutor(max_workers=self.workers) as executor:
            for suite in suites:
                started = time.perf_counter()
                instances = self.instances(suite)
                logger.info(f"[VERIFY] {suite}: {len(instances)} instances ({self.budget_name})")
                futures = [executor.submit(self._execute, suite, name, fn) for name, fn in instances]
                checks.extend(f.result() for f in futures)
                seconds[suite] = time.perf_counter() - started
                failed = sum(1 for c in checks if c.suite == suite and not c.passed)
                logger.info(f"[VERIFY] {suite}: {len(instances) - failed}/{len(instances)} passed "
                            f"in {seconds[suite]:.2f}s")
        return VerifyReport(self.budget_name, checks, seconds)


def run_verification(config: Optional[RunConfig] = None, budget: str = "quick",
                     suites: Optional[Sequence[str]] = None, workers: Optional[int] = None) -> VerifyReport:
    return VerificationSuite(config, budget, workers).run(suites)
