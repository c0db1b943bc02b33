#!/usr/bin/env python3
"""
Local Gromov-Witten data
- Vertex multiplicities m_v(g, mu, nu) = [z^2g] prod S(mu_i z) prod S(nu_i z) / S(z)
- Genus-one closed form and connected one-point invariants
- Completion coefficients by the one-point formula and by a defining linear system
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Mapping, Optional, Tuple

from sympy import Matrix, Rational as SymRational

from exact_arith import series_sinh_ratio
from partitions import (
    DegreeMismatch, GWHError, Partition, WElement, aut_count, centralizer_size,
    enumerate_partitions, make_partition, ones, partitions_up_to, size,
)
from perm_hurwitz import eval_hurwitz_extended

logger = logging.getLogger(__name__)

_memo_lock = threading.Lock()
_multiplicities: Dict[Tuple[int, Partition, Partition], Fraction] = {}
_cycles: Dict[int, "CompletedCycle"] = {}


class InconsistentSystem(GWHError):
    relation = "completion-system"


@dataclass(frozen=True)
class VertexData:
    genus: int
    mu: Partition
    nu: Partition

    def __post_init__(self):
        object.__setattr__(self, "mu", make_partition(self.mu))
        object.__setattr__(self, "nu", make_partition(self.nu))
        if size(self.mu) != size(self.nu):
            raise DegreeMismatch(f"vertex sides {self.mu} and {self.nu} have different degree")
        if size(self.mu) == 0:
            raise DegreeMismatch("a vertex needs positive local degree")
        if self.genus < 0:
            raise GWHError("vertex genus must be non-negative")

    @property
    def degree(self) -> int:
        return size(self.mu)

    @property
    def power(self) -> int:
        """Descendant power k = 2g - 2 + l(mu) + l(nu)."""
        return 2 * self.genus - 2 + len(self.mu) + len(self.nu)


def vertex_multiplicity(g: int, mu: Partition, nu: Partition) -> Fraction:
    v = VertexData(g, mu, nu)
    key = (v.genus, v.mu, v.nu) if v.mu >= v.nu else (v.genus, v.nu, v.mu)
    with _memo_lock:
        cached = _multiplicities.get(key)
    if cached is not None:
        return cached
    order = 2 * v.genus
    s = series_sinh_ratio(order)
    series = s.invert()
    for part in v.mu + v.nu:
        series = series * s.scale_argument(part)
    value = series.coefficient(order)
    with _memo_lock:
        _multiplicities[key] = value
    return value


def genus_one_closed_form(mu: Partition, nu: Partition) -> Fraction:
    v = VertexData(1, mu, nu)
    return Fraction(sum(p * p for p in v.mu) + sum(p * p for p in v.nu) - 1, 24)


def connected_one_point(g: int, mu: Partition, nu: Partition) -> Fraction:
    """<mu|tau_k(pt)|nu>, connected, k = 2g-2+l(mu)+l(nu)."""
    v = VertexData(g, mu, nu)
    return vertex_multiplicity(g, v.mu, v.nu) / (aut_count(v.mu) * aut_count(v.nu))


def one_point_invariant(mu: Partition, k: int) -> Fraction:
    """<mu|tau_k(pt)> relative to one point, via the trivial profile at the second point."""
    mu = make_partition(mu)
    d = size(mu)
    if d == 0 or k < 0:
        return Fraction(0)
    twice_g = k + 2 - len(mu) - d
    if twice_g < 0 or twice_g % 2:
        return Fraction(0)
    g = twice_g // 2
    return vertex_multiplicity(g, mu, ones(d)) / (aut_count(mu) * factorial(d))


@dataclass(frozen=True)
class CompletedCycle:
    k: int
    expansion: WElement

    @property
    def leading(self) -> Partition:
        return (self.k + 1,)

    def coefficient(self, mu: Partition) -> Fraction:
        return self.expansion.coefficient(mu)

    def corrections(self) -> List[Tuple[Partition, Fraction]]:
        return [(mu, c) for mu, c in self.expansion.items() if mu != self.leading]

    def insertion(self) -> WElement:
        """The W-image of tau_k(pt): the completed cycle divided by k!."""
        return self.expansion * Fraction(1, factorial(self.k))

    def to_json(self) -> Dict[str, Dict[str, str]]:
        return {"completed_cycle": self.expansion.to_json()}


def compco_terms(k: int) -> Dict[Partition, Fraction]:
    """rho_{k+1,mu} = k! z(mu) <mu|tau_k(pt)> for every non-empty mu of size <= k+1."""
    terms: Dict[Partition, Fraction] = {}
    for mu in partitions_up_to(k + 1, include_empty=False):
        rho = factorial(k) * centralizer_size(mu) * one_point_invariant(mu, k)
        if rho:
            terms[mu] = rho
    return terms


def completion_coefficients(k: int) -> CompletedCycle:
    if k < 0:
        raise GWHError("completed cycles need k >= 0")
    with _memo_lock:
        cached = _cycles.get(k)
    if cached is not None:
        return cached
    terms = compco_terms(k)
    if terms.get((k + 1,)) != 1:
        raise InconsistentSystem(f"leading completion coefficient for k={k} is {terms.get((k + 1,))}")
    negative = [mu for mu, c in terms.items() if c < 0]
    if negative:
        logger.error(f"[COMPLETION] negative coefficients for k={k}: {negative}")
    fixed = {mu: terms.get(mu, Fraction(0))
             for mu in partitions_up_to(k + 1, include_empty=False) if mu != (k + 1,)}
    # the empty term comes from the degree-1 equations
    solved = solve_completion_by_correspondence(k, d_max=1, fixed=fixed, d_min=1)
    cycle = CompletedCycle(k, solved)
    logger.info(f"[COMPLETION] k={k}: {cycle.expansion}")
    with _memo_lock:
        _cycles[k] = cycle
    return cycle


def _to_sym(q: Fraction) -> SymRational:
    return SymRational(q.numerator, q.denominator)


def solve_completion_by_correspondence(k: int, d_max: int,
                                       fixed: Optional[Mapping[Partition, Fraction]] = None,
                                       d_min: int = 0) -> WElement:
    """Solve k! <mu|tau_k|nu>* = H*(mu, (k+1) + sum rho_l l, nu) for the unknown rho over d_min <= d <= d_max."""
    if not 0 <= d_min <= d_max:
        raise GWHError(f"degree range {d_min}..{d_max} is empty")
    # imported here: trop_covers needs vertex multiplicities from this module
    from trop_covers import descendant_invariant

    fixed = {make_partition(mu): Fraction(c) for mu, c in (fixed or {}).items()}
    leading = (k + 1,)
    unknowns = [mu for mu in partitions_up_to(k) if mu not in fixed]
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for d in range(d_min, d_max + 1):
        sides = enumerate_partitions(d)
        for mu in sides:
            for nu in sides:
                lhs = Fraction(0)
                if d:
                    lhs = factorial(k) * descendant_invariant(mu, nu, (k,), connected=False)
                lhs -= eval_hurwitz_extended(d, [mu, leading, nu])
                for lam, c in fixed.items():
                    lhs -= c * eval_hurwitz_extended(d, [mu, lam, nu])
                row = [eval_hurwitz_extended(d, [mu, lam, nu]) for lam in unknowns]
                if any(row) or lhs:
                    rows.append(row)
                    rhs.append(lhs)
    solution: Dict[Partition, Fraction] = {}
    if unknowns:
        if not rows:
            raise InconsistentSystem(f"no equations constrain the k={k} completion system")
        a = Matrix([[_to_sym(x) for x in row] for row in rows])
        b = Matrix([_to_sym(x) for x in rhs])
        try:
            sol, params = a.gauss_jordan_solve(b)
        except ValueError as e:
            raise InconsistentSystem(f"completion system for k={k}, d_max={d_max} is inconsistent") from e
        if len(params):
            raise InconsistentSystem(
                f"completion system for k={k}, d_max={d_max} is underdetermined ({len(params)} free)")
        for lam, value in zip(unknowns, sol):
            solution[lam] = Fraction(int(value.p), int(value.q))
    elif any(rhs):
        raise InconsistentSystem(f"fixed completion coefficients for k={k} violate the correspondence")
    terms: Dict[Partition, Fraction] = {leading: Fraction(1)}
    terms.update(fixed)
    terms.update(solution)
    logger.debug(f"[COMPLETION] k={k} d_max={d_max}: {len(rows)} equations, {len(unknowns)} unknowns")
    return WElement(terms)
