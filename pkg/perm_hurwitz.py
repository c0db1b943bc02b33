#!/usr/bin/env python3
"""
Hurwitz numbers from the symmetric group
- Brute-force monodromy counts over S_d (numpy multiplication tables)
- Class-algebra convolution in the conjugacy-class basis, with the genus-adding element K
- Connected <-> disconnected conversion by inclusion-exclusion over the orbit of sheet 1
- Local Hurwitz numbers H(v) and the extended (tilde) evaluation on W
"""
from __future__ import annotations

import itertools
import logging
import threading
import time
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from networkx.utils import UnionFind

from exact_arith import RationalLike, as_rational
from partitions import (
    EMPTY, ConstraintViolation, DegreeMismatch, GWHError, OversizeCondition, Partition, WElement,
    aut_count, centralizer_size, enumerate_partitions, make_partition, ones, remove_parts, size,
    sub_partitions, tilde_extend,
)

logger = logging.getLogger(__name__)

BRUTEFORCE_MAX_DEGREE = 6
CLASS_ALGEBRA_MAX_DEGREE = 7

_cache_lock = threading.Lock()
_groups: Dict[int, "SymmetricGroup"] = {}
_structure: Dict[Tuple[int, Partition, Partition], Dict[Partition, int]] = {}
_local: Dict[Tuple, Fraction] = {}


class SymmetricGroup:
    """All of S_d as index-addressed numpy tables; index 0 is the identity."""

    def __init__(self, d: int):
        self.degree = d
        perms = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
        self.perms = perms
        self.order = perms.shape[0]
        weights = d ** np.arange(d - 1, -1, -1, dtype=np.int64) if d else np.zeros(0, dtype=np.int64)
        self._weights = weights
        self.codes = perms @ weights
        n = self.order
        # (p*q)[i] = p[q[i]]
        composed = perms[np.arange(n)[:, None, None], perms[None, :, :]]
        self.mult = np.searchsorted(self.codes, composed @ weights)
        self.inv = np.searchsorted(self.codes, np.argsort(perms, axis=1) @ weights)
        self.classes: List[Partition] = []
        class_ids = np.zeros(n, dtype=np.int64)
        index: Dict[Partition, int] = {}
        for i in range(n):
            mu = self._cycle_type(perms[i])
            if mu not in index:
                index[mu] = len(self.classes)
                self.classes.append(mu)
            class_ids[i] = index[mu]
        self.class_of = class_ids
        self.class_index = index
        self.members = {mu: np.flatnonzero(class_ids == cid) for mu, cid in index.items()}
        logger.debug(f"[HURWITZ] S_{d} tables built ({n} elements, {len(self.classes)} classes)")

    @staticmethod
    def _cycle_type(p) -> Partition:
        seen = set()
        lengths = []
        for start in range(len(p)):
            if start in seen:
                continue
            length = 0
            j = start
            while j not in seen:
                seen.add(j)
                j = int(p[j])
                length += 1
            lengths.append(length)
        return make_partition(lengths)

    def cycle_type(self, index: int) -> Partition:
        return self.classes[int(self.class_of[index])]

    def class_members(self, mu: Partition) -> np.ndarray:
        if size(mu) != self.degree:
            raise DegreeMismatch(f"class {mu} is not a partition of {self.degree}")
        return self.members[make_partition(mu)]

    def commutator(self, a: int, b: int) -> int:
        m, inv = self.mult, self.inv
        return int(m[m[m[a, b], inv[a]], inv[b]])

    def is_transitive(self, indices: Sequence[int]) -> bool:
        if self.degree <= 1:
            return True
        uf = UnionFind(range(self.degree))
        for idx in indices:
            row = self.perms[idx]
            for i in range(self.degree):
                uf.union(i, int(row[i]))
        return len(list(uf.to_sets())) == 1


def symmetric_group(d: int) -> SymmetricGroup:
    with _cache_lock:
        group = _groups.get(d)
    if group is None:
        if d >= CLASS_ALGEBRA_MAX_DEGREE:
            logger.warning(f"[HURWITZ] S_{d} multiplication table needs {factorial(d) ** 2 * 8 >> 20} MiB")
        group = SymmetricGroup(d)
        with _cache_lock:
            group = _groups.setdefault(d, group)
    return group


@dataclass(frozen=True)
class HurwitzProblem:
    degree: int
    profiles: Tuple[Partition, ...] = ()
    target_genus: int = 0
    connected: bool = True
    source_genus: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(make_partition(mu) for mu in self.profiles))
        if self.degree < 0 or self.target_genus < 0:
            raise GWHError("degree and target genus must be non-negative")

    def branch_sum(self) -> int:
        return sum(size(mu) - len(mu) for mu in self.profiles)

    def source_euler(self) -> int:
        """2 - 2g from Riemann-Hurwitz."""
        return self.degree * (2 - 2 * self.target_genus) - self.branch_sum()

    def riemann_hurwitz_genus(self) -> Optional[int]:
        chi = self.source_euler()
        if chi % 2:
            return None
        return (2 - chi) // 2

    def admissible(self) -> bool:
        g = self.riemann_hurwitz_genus()
        if g is None:
            return False
        if self.source_genus is not None and self.source_genus != g:
            return False
        return not (self.connected and g < 0)

    def check_sizes(self):
        for mu in self.profiles:
            if size(mu) != self.degree:
                raise DegreeMismatch(
                    f"profile {mu} is not a partition of {self.degree}; tilde-extend conditions first")


def _check_degree(d: int, cap: int, method: str):
    if d > cap:
        raise ConstraintViolation(f"{method} is limited to degree <= {cap}", relation="degree-cap")


def _slots(group: SymmetricGroup, problem: HurwitzProblem) -> List[np.ndarray]:
    everything = np.arange(group.order)
    slots = [everything] * (2 * problem.target_genus)
    slots += [group.class_members(mu) for mu in problem.profiles]
    return slots


def _monodromy_tuples(group: SymmetricGroup, problem: HurwitzProblem) -> Iterator[Tuple[int, ...]]:
    """Tuples (a1,b1,...,ah,bh,s1,...,sn) with prod[a,b] * prod s = e; last factor by membership."""
    h = problem.target_genus
    slots = _slots(group, problem)
    if not slots:
        yield ()
        return
    mult, inv = group.mult, group.inv
    last_class = group.class_index[problem.profiles[-1]] if problem.profiles else None

    def walk(pos: int, current: int, chosen: Tuple[int, ...]):
        if pos < 2 * h:
            for a in slots[pos]:
                for b in slots[pos + 1]:
                    comm = group.commutator(int(a), int(b))
                    yield from walk(pos + 2, int(mult[current, comm]), chosen + (int(a), int(b)))
            return
        if pos == len(slots) - 1:
            need = int(inv[current])
            if group.class_of[need] == last_class:
                yield chosen + (need,)
            return
        if pos == len(slots):
            if current == 0:
                yield chosen
            return
        for s in slots[pos]:
            yield from walk(pos + 1, int(mult[current, s]), chosen + (int(s),))

    yield from walk(0, 0, ())


def count_monodromy(problem: HurwitzProblem) -> int:
    problem.check_sizes()
    group = symmetric_group(problem.degree)
    total = 0
    for tup in _monodromy_tuples(group, problem):
        if problem.connected and not group.is_transitive(tup):
            continue
        total += 1
    return total


def _step(group: SymmetricGroup, state: np.ndarray, elements: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Distribution of g*s over S_d given the distribution of g and the weights of s."""
    out = np.zeros_like(state)
    np.add.at(out, group.mult[:, elements], state[:, None] * weights[None, :])
    return out


def commutator_counts(group: SymmetricGroup) -> np.ndarray:
    """Number of pairs (a, b) with aba^-1b^-1 = x, for every x."""
    a = np.arange(group.order)[:, None]
    b = np.arange(group.order)[None, :]
    m, inv = group.mult, group.inv
    comm = m[m[m[a, b], inv[a]], inv[b]]
    return np.bincount(comm.ravel(), minlength=group.order).astype(np.int64)


def count_products(problem: HurwitzProblem) -> int:
    """All monodromy tuples with product e, counted by pushing the distribution of the partial product
    through S_d one factor at a time. Disconnected covers only.
    """
    problem.check_sizes()
    group = symmetric_group(problem.degree)
    state = np.zeros(group.order, dtype=np.int64)
    state[0] = 1
    if problem.target_genus:
        everything = np.arange(group.order)
        pairs = commutator_counts(group)
        for _ in range(problem.target_genus):
            state = _step(group, state, everything, pairs)
    for mu in problem.profiles:
        members = group.class_members(mu)
        state = _step(group, state, members, np.ones(len(members), dtype=np.int64))
    return int(state[0])


def hurwitz_bruteforce(problem: HurwitzProblem, max_degree: int = BRUTEFORCE_MAX_DEGREE) -> Fraction:
    """Monodromy count divided by d!.

    Connected problems walk every tuple and keep the transitive ones; disconnected problems
    propagate the product distribution instead.
    """
    problem.check_sizes()
    _check_degree(problem.degree, max_degree, "brute force")
    if not problem.admissible():
        return Fraction(0)
    if problem.degree == 0:
        return Fraction(0 if problem.connected else 1)
    started = time.perf_counter()
    count = count_monodromy(problem) if problem.connected else count_products(problem)
    value = Fraction(count, factorial(problem.degree))
    logger.debug(f"[HURWITZ] brute force d={problem.degree} h={problem.target_genus} "
                 f"profiles={problem.profiles} -> {value} ({time.perf_counter() - started:.3f}s)")
    return value


# class algebra

def structure_constants(d: int, lam: Partition, mu: Partition) -> Dict[Partition, int]:
    """C_lam * C_mu = sum_nu c[nu] C_nu."""
    key = (d, make_partition(lam), make_partition(mu))
    with _cache_lock:
        cached = _structure.get(key)
    if cached is not None:
        return cached
    group = symmetric_group(d)
    lam_members = group.class_members(lam)
    mu_id = group.class_index[make_partition(mu)]
    out: Dict[Partition, int] = {}
    for nu in group.classes:
        z = int(group.members[nu][0])
        hits = group.class_of[group.mult[group.inv[lam_members], z]] == mu_id
        count = int(np.count_nonzero(hits))
        if count:
            out[nu] = count
    with _cache_lock:
        _structure[key] = out
    return out


class ClassAlgebraElement:
    """Element of the centre of Q[S_d] in the basis {C_mu}."""

    __slots__ = ("degree", "_coeffs")

    def __init__(self, degree: int, coeffs: Optional[Mapping[Partition, RationalLike]] = None):
        self.degree = degree
        clean: Dict[Partition, Fraction] = {}
        for mu, c in (coeffs or {}).items():
            mu = make_partition(mu)
            if size(mu) != degree:
                raise DegreeMismatch(f"class {mu} is not a partition of {degree}")
            c = as_rational(c)
            if c:
                clean[mu] = clean.get(mu, Fraction(0)) + c
        self._coeffs = {mu: c for mu, c in clean.items() if c}

    @classmethod
    def identity(cls, d: int) -> "ClassAlgebraElement":
        return cls(d, {ones(d): 1})

    @classmethod
    def class_sum(cls, mu: Partition) -> "ClassAlgebraElement":
        return cls(size(mu), {mu: 1})

    @property
    def coeffs(self) -> Dict[Partition, Fraction]:
        return dict(self._coeffs)

    def coefficient(self, mu: Partition) -> Fraction:
        return self._coeffs.get(make_partition(mu), Fraction(0))

    def __add__(self, other: "ClassAlgebraElement") -> "ClassAlgebraElement":
        self._same_degree(other)
        out = dict(self._coeffs)
        for mu, c in other._coeffs.items():
            out[mu] = out.get(mu, Fraction(0)) + c
        return ClassAlgebraElement(self.degree, out)

    def __mul__(self, other):
        if not isinstance(other, ClassAlgebraElement):
            s = as_rational(other)
            return ClassAlgebraElement(self.degree, {mu: s * c for mu, c in self._coeffs.items()})
        self._same_degree(other)
        out: Dict[Partition, Fraction] = {}
        for lam, a in self._coeffs.items():
            for mu, b in other._coeffs.items():
                for nu, c in structure_constants(self.degree, lam, mu).items():
                    out[nu] = out.get(nu, Fraction(0)) + a * b * c
        return ClassAlgebraElement(self.degree, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "ClassAlgebraElement":
        result = ClassAlgebraElement.identity(self.degree)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, ClassAlgebraElement) and self.degree == other.degree \
            and self._coeffs == other._coeffs

    def __repr__(self) -> str:
        body = ", ".join(f"{mu}: {c}" for mu, c in sorted(self._coeffs.items()))
        return f"ClassAlgebraElement(d={self.degree}, {{{body}}})"

    def _same_degree(self, other: "ClassAlgebraElement"):
        if self.degree != other.degree:
            raise DegreeMismatch(f"class algebra degrees {self.degree} and {other.degree} differ")


def class_algebra_product(elements: Sequence[ClassAlgebraElement]) -> ClassAlgebraElement:
    if not elements:
        raise GWHError("empty product has no degree")
    result = elements[0]
    for e in elements[1:]:
        result = result * e
    return result


def genus_adding_element(d: int) -> ClassAlgebraElement:
    """K = sum_mu z(mu) C_mu^2."""
    total = ClassAlgebraElement(d)
    for mu in enumerate_partitions(d):
        c = ClassAlgebraElement.class_sum(mu)
        total = total + (c * c) * centralizer_size(mu)
    return total


def disconnected_class_algebra(d: int, h: int, profiles: Sequence[Partition]) -> Fraction:
    """Coefficient of C_e in K^h prod C_mu, divided by d!."""
    _check_degree(d, CLASS_ALGEBRA_MAX_DEGREE, "class algebra")
    if d == 0:
        return Fraction(1) if all(mu == EMPTY for mu in profiles) else Fraction(0)
    product_ = ClassAlgebraElement.identity(d)
    if h:
        product_ = product_ * genus_adding_element(d) ** h
    for mu in profiles:
        product_ = product_ * ClassAlgebraElement.class_sum(mu)
    return product_.coefficient(ones(d)) / factorial(d)


def hurwitz_class_algebra(problem: HurwitzProblem) -> Fraction:
    problem.check_sizes()
    if not problem.admissible():
        return Fraction(0)
    if problem.connected:
        return connected_from_disconnected(problem.degree, problem.target_genus, problem.profiles)
    return disconnected_class_algebra(problem.degree, problem.target_genus, problem.profiles)


# connected <-> disconnected

DisconnectedFn = Callable[[int, int, Tuple[Partition, ...]], Fraction]
ConnectedFn = Callable[[int, int, Tuple[Partition, ...]], Fraction]


def _splits(profiles: Tuple[Partition, ...], b: int) -> Iterator[Tuple[Tuple[Partition, ...], Tuple[Partition, ...]]]:
    """Ways to carve a size-b sub-multiset out of every profile."""
    options = [[nu for nu in sub_partitions(mu) if size(nu) == b] for mu in profiles]
    for choice in itertools.product(*options):
        rest = tuple(remove_parts(mu, nu) for mu, nu in zip(profiles, choice))
        yield tuple(choice), rest


def connected_from_disconnected(d: int, h: int, profiles: Sequence[Partition],
                                disconnected: Optional[DisconnectedFn] = None) -> Fraction:
    """H(d) = H*(d) - sum_{b<d} (b/d) sum_splits H(b; nu) H*(d-b; rho)."""
    disconnected = disconnected or disconnected_class_algebra
    memo: Dict[Tuple, Fraction] = {}

    def conn(n: int, profs: Tuple[Partition, ...]) -> Fraction:
        key = (n, profs)
        if key in memo:
            return memo[key]
        if n == 0:
            return Fraction(0)
        value = disconnected(n, h, profs)
        for b in range(1, n):
            for nu, rho in _splits(profs, b):
                c = conn(b, nu)
                if c:
                    value -= Fraction(b, n) * c * disconnected(n - b, h, rho)
        memo[key] = value
        return value

    return conn(d, tuple(make_partition(mu) for mu in profiles))


def disconnected_from_connected(d: int, h: int, profiles: Sequence[Partition],
                                connected: Optional[ConnectedFn] = None) -> Fraction:
    """H*(d) = sum_{b=1..d} (b/d) sum_splits H(b; nu) H*(d-b; rho)."""
    if connected is None:
        def connected(n, g, profs):
            return connected_from_disconnected(n, g, profs)
    memo: Dict[Tuple, Fraction] = {}

    def disc(n: int, profs: Tuple[Partition, ...]) -> Fraction:
        key = (n, profs)
        if key in memo:
            return memo[key]
        if n == 0:
            return Fraction(1) if all(mu == EMPTY for mu in profs) else Fraction(0)
        value = Fraction(0)
        for b in range(1, n + 1):
            for nu, rho in _splits(profs, b):
                c = connected(b, h, nu)
                if c:
                    value += Fraction(b, n) * c * disc(n - b, rho)
        memo[key] = value
        return value

    return disc(d, tuple(make_partition(mu) for mu in profiles))


# local and extended evaluation

def local_hurwitz(g: int, h: int, profiles: Sequence[Partition]) -> Fraction:
    """H(v) = H_{g->h}(mu_1..mu_n) * prod |Aut(mu_i)| (connected)."""
    profiles = tuple(sorted(make_partition(mu) for mu in profiles))
    sizes = {size(mu) for mu in profiles}
    if len(sizes) > 1:
        raise DegreeMismatch(f"local profiles of different sizes {sorted(sizes)}")
    key = (g, h, profiles)
    with _cache_lock:
        cached = _local.get(key)
    if cached is not None:
        return cached
    d = sizes.pop() if sizes else 0
    problem = HurwitzProblem(d, profiles, target_genus=h, connected=True, source_genus=g)
    value = Fraction(0)
    if d > 0 and problem.admissible():
        value = hurwitz_class_algebra(problem)
        for mu in profiles:
            value *= aut_count(mu)
    with _cache_lock:
        _local[key] = value
    return value


def eval_hurwitz_extended(d: int, profiles: Sequence[Partition], h: int = 0) -> Fraction:
    """Disconnected count with empty/oversize/tilde conventions for conditions of size <= d."""
    if d == 0:
        return Fraction(1) if all(size(mu) == 0 for mu in profiles) else Fraction(0)
    weight = Fraction(1)
    extended = []
    for mu in profiles:
        try:
            mu_t, w = tilde_extend(make_partition(mu), d)
        except OversizeCondition:
            return Fraction(0)
        extended.append(mu_t)
        weight *= w
    problem = HurwitzProblem(d, tuple(extended), target_genus=h, connected=False)
    if not problem.admissible():
        return Fraction(0)
    return weight * disconnected_class_algebra(d, h, problem.profiles)


def eval_hurwitz_multilinear(d: int, conditions: Sequence[WElement], h: int = 0) -> Fraction:
    """Multilinear extension of eval_hurwitz_extended to W-valued arguments."""
    total = Fraction(0)
    for choice in itertools.product(*(c.items() for c in conditions)):
        coeff = Fraction(1)
        for _, c in choice:
            coeff *= c
        if coeff:
            total += coeff * eval_hurwitz_extended(d, [mu for mu, _ in choice], h)
    return total
