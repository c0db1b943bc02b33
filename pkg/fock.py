#!/usr/bin/env python3
"""
Bosonic Fock space in the polynomial realization
- b_mu = p_mu1 ... p_mum, vacuum = b_(); <b_mu|b_nu> = z(mu) delta
- a_n multiplies by p_-n for n < 0 and acts as n d/dp_n for n > 0
- Normally ordered u-graded operators: cut-join F2 and the descendant operators M_k,
  the latter built both from vertex multiplicities and from the vertex-operator series
- Vacuum expectations by direct action and by Wick contraction (Feynman graphs)
- Deterministic random products (sha256 / xorshift) and a small operator-expression language
"""
from __future__ import annotations

import hashlib
import itertools
import logging
import re
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from exact_arith import RationalLike, as_rational, format_rational, series_product, series_sinh_ratio
from local_gw import vertex_multiplicity
from partitions import (
    EMPTY, ConstraintViolation, DegreeMismatch, GWHError, Partition, aut_count, centralizer_size,
    enumerate_partitions, format_partition, make_partition, merge, parse_partition, size,
)
from trop_covers import BOUNDARY, CoverVertex, TargetShape, TropicalCover, parallel_factor

logger = logging.getLogger(__name__)

_op_lock = threading.Lock()
_operators: Dict[Tuple, "GradedOperator"] = {}

Factors = Tuple[int, ...]
Graded = Dict[int, "FockVector"]


class ExpressionError(GWHError):
    relation = "expression"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class FockVector:
    """Finite rational combination of the basis vectors b_mu."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Partition, RationalLike]] = None):
        clean: Dict[Partition, Fraction] = {}
        for mu, c in (terms or {}).items():
            c = as_rational(c)
            if c:
                mu = make_partition(mu)
                clean[mu] = clean.get(mu, Fraction(0)) + c
        self._terms = {mu: c for mu, c in clean.items() if c}

    @classmethod
    def vacuum(cls) -> "FockVector":
        return cls({EMPTY: 1})

    @classmethod
    def basis(cls, mu: Partition) -> "FockVector":
        return cls({make_partition(mu): 1})

    @property
    def terms(self) -> Dict[Partition, Fraction]:
        return dict(self._terms)

    def coefficient(self, mu: Partition) -> Fraction:
        return self._terms.get(make_partition(mu), Fraction(0))

    def items(self) -> List[Tuple[Partition, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: (size(kv[0]), kv[0]))

    def max_degree(self) -> int:
        return max((size(mu) for mu in self._terms), default=0)

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self._terms)
        for mu, c in other._terms.items():
            out[mu] = out.get(mu, Fraction(0)) + c
        return FockVector(out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other * -1

    def __mul__(self, scalar: RationalLike) -> "FockVector":
        s = as_rational(scalar)
        return FockVector({mu: s * c for mu, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, FockVector) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def to_json(self) -> Dict[str, str]:
        return {format_partition(mu): format_rational(c) for mu, c in self.items()}

    def __repr__(self) -> str:
        body = " + ".join(f"{format_rational(c)}*b({format_partition(mu)})" for mu, c in self.items())
        return f"FockVector({body or '0'})"


def inner_product(x: FockVector, y: FockVector) -> Fraction:
    total = Fraction(0)
    for mu, c in x.terms.items():
        d = y.coefficient(mu)
        if d:
            total += c * d * centralizer_size(mu)
    return total


def _apply_factor(n: int, v: FockVector) -> FockVector:
    out: Dict[Partition, Fraction] = {}
    if n < 0:
        for mu, c in v.terms.items():
            key = merge(mu, (-n,))
            out[key] = out.get(key, Fraction(0)) + c
        return FockVector(out)
    for mu, c in v.terms.items():
        count = mu.count(n)
        if count:
            parts = list(mu)
            parts.remove(n)
            key = tuple(parts)
            out[key] = out.get(key, Fraction(0)) + c * n * count
    return FockVector(out)


@dataclass(frozen=True)
class HeisenbergMonomial:
    factors: Factors
    scalar: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(n) for n in self.factors))
        object.__setattr__(self, "scalar", as_rational(self.scalar))
        if any(n == 0 for n in self.factors):
            raise GWHError("a_0 is central and never appears in a monomial")

    def is_normally_ordered(self) -> bool:
        return is_normally_ordered(self.factors)

    def adjoint(self) -> "HeisenbergMonomial":
        """a_n is adjoint to a_-n: negate every index and reverse the order."""
        return HeisenbergMonomial(tuple(-n for n in reversed(self.factors)), self.scalar)

    def apply(self, v: FockVector) -> FockVector:
        return apply(self, v)

    def __str__(self) -> str:
        body = " ".join(f"a({n})" for n in self.factors) or "1"
        return body if self.scalar == 1 else f"{format_rational(self.scalar)} {body}"


def is_normally_ordered(factors: Factors) -> bool:
    """Creation factors (negative) first, annihilation factors after."""
    seen_positive = False
    for n in factors:
        if n > 0:
            seen_positive = True
        elif seen_positive:
            return False
    return True


def apply(m: HeisenbergMonomial, v: FockVector) -> FockVector:
    """Rightmost factor acts first."""
    for n in reversed(m.factors):
        if not v:
            break
        v = _apply_factor(n, v)
    return v * m.scalar


class GradedOperator:
    """sum_p u^p sum_x c_x a_x1 ... a_xl, every monomial normally ordered."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[int, Mapping[Factors, RationalLike]]] = None):
        clean: Dict[int, Dict[Factors, Fraction]] = {}
        for p, monomials in (terms or {}).items():
            if p < 0:
                raise GWHError("graded operators never store negative u powers")
            for x, c in monomials.items():
                x = tuple(x)
                if not is_normally_ordered(x):
                    raise GWHError(f"monomial {x} is not normally ordered")
                c = as_rational(c)
                if c:
                    bucket = clean.setdefault(p, {})
                    bucket[x] = bucket.get(x, Fraction(0)) + c
        self._terms = {p: {x: c for x, c in b.items() if c} for p, b in clean.items()}
        self._terms = {p: b for p, b in self._terms.items() if b}

    @property
    def terms(self) -> Dict[int, Dict[Factors, Fraction]]:
        return {p: dict(b) for p, b in self._terms.items()}

    def coefficient(self, power: int, factors: Factors) -> Fraction:
        return self._terms.get(power, {}).get(tuple(factors), Fraction(0))

    def items(self) -> List[Tuple[int, Factors, Fraction]]:
        return sorted((p, x, c) for p, b in self._terms.items() for x, c in b.items())

    def ungraded(self) -> Dict[Factors, Fraction]:
        """Set u = 1."""
        out: Dict[Factors, Fraction] = {}
        for _, x, c in self.items():
            out[x] = out.get(x, Fraction(0)) + c
        return {x: c for x, c in out.items() if c}

    def __len__(self) -> int:
        return sum(len(b) for b in self._terms.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedOperator) and self._terms == other._terms

    def apply(self, vector: Graded) -> Graded:
        out: Graded = {}
        for q, v in vector.items():
            for p, x, c in self.items():
                w = apply(HeisenbergMonomial(x, c), v)
                if w:
                    out[p + q] = out.get(p + q, FockVector()) + w
        return {p: v for p, v in out.items() if v}

    def to_json(self) -> List[Dict]:
        return [{"u": p, "factors": list(x), "coefficient": format_rational(c)} for p, x, c in self.items()]


def apply_sequence(operators: Sequence[GradedOperator], ket: FockVector) -> Graded:
    """prod operators applied to ket, rightmost first."""
    state: Graded = {0: ket}
    for op in reversed(operators):
        state = op.apply(state)
    return state


def bracket(bra: FockVector, state: Graded) -> Dict[int, Fraction]:
    out = {p: inner_product(bra, v) for p, v in state.items()}
    return {p: c for p, c in sorted(out.items()) if c}


# cut-join and double Hurwitz numbers

def cut_join(degree_cap: int) -> GradedOperator:
    """F2 = 1/2 sum_{i,j>0} (a_-i a_-j a_i+j + a_-(i+j) a_i a_j), restricted to i + j <= cap."""
    terms: Dict[Factors, Fraction] = {}
    half = Fraction(1, 2)
    for i in range(1, degree_cap):
        for j in range(1, degree_cap - i + 1):
            join = tuple(sorted((-i, -j))) + (i + j,)
            cut = (-(i + j),) + tuple(sorted((i, j)))
            terms[join] = terms.get(join, Fraction(0)) + half
            terms[cut] = terms.get(cut, Fraction(0)) + half
    return GradedOperator({0: terms})


def double_hurwitz(mu: Partition, nu: Partition, r: int) -> Fraction:
    """(1/z(mu)z(nu)) <b_mu|F2^r|b_nu>: disconnected, r simple branch points."""
    mu, nu = make_partition(mu), make_partition(nu)
    if size(mu) != size(nu):
        raise DegreeMismatch(f"|mu| = {size(mu)} but |nu| = {size(nu)}")
    if r < 0:
        raise GWHError("the number of simple branch points must be non-negative")
    f2 = cut_join(size(mu))
    state = apply_sequence([f2] * r, FockVector.basis(nu))
    raw = sum(bracket(FockVector.basis(mu), state).values(), Fraction(0))
    return raw / (centralizer_size(mu) * centralizer_size(nu))


# descendant operators

def _cached(key: Tuple, build) -> "GradedOperator":
    with _op_lock:
        op = _operators.get(key)
    if op is None:
        op = build()
        with _op_lock:
            op = _operators.setdefault(key, op)
    return op


def _check_power(k: int):
    if k < 0:
        raise GWHError(f"descendant power must be non-negative, got {k}")


def build_Mk(k: int, degree_cap: int, genus_cap: int) -> GradedOperator:
    """M_k = sum_g sum_x <x+|tau_k|x-> u^(l-1+g) a_x1 ... a_xl+..., truncated at |x+| <= degree_cap."""
    _check_power(k)

    def build() -> GradedOperator:
        terms: Dict[int, Dict[Factors, Fraction]] = {}
        for g in range(genus_cap + 1):
            length = k + 2 - 2 * g
            if length < 2:
                continue
            for d in range(1, degree_cap + 1):
                parts = enumerate_partitions(d, max_length=length - 1)
                for mu in parts:
                    for nu in parts:
                        if len(mu) + len(nu) != length:
                            continue
                        c = vertex_multiplicity(g, mu, nu) / (aut_count(mu) * aut_count(nu))
                        x = tuple(sorted(-p for p in mu)) + tuple(sorted(nu))
                        terms.setdefault(len(mu) - 1 + g, {})[x] = c
        op = GradedOperator(terms)
        logger.debug(f"[FOCK] M_{k} built: {len(op)} monomials (D={degree_cap}, G={genus_cap})")
        return op

    return _cached(("M", k, degree_cap, genus_cap), build)


def build_Mk_vertex_form(k: int, degree_cap: int, genus_cap: int) -> GradedOperator:
    """M_k = Coeff_z^0 (1/S(z)) sum_g z^-2g u^(g-1) A_k^g, with
    A_k^g = 1/(k+2-2g)! Coeff_w^0 :(sum_x S(xz) a^_x w^x)^(k+2-2g):, a^_n = u a_n for n < 0.
    """
    _check_power(k)

    def build() -> GradedOperator:
        order = 2 * genus_cap
        s = series_sinh_ratio(order)
        s_inv = s.invert()
        letters = [x for x in range(-degree_cap, degree_cap + 1) if x]
        terms: Dict[int, Dict[Factors, Fraction]] = {}
        for g in range(genus_cap + 1):
            length = k + 2 - 2 * g
            if length < 1:
                continue
            for x in itertools.combinations_with_replacement(letters, length):
                # w^0 extraction
                if sum(x) != 0 or sum(n for n in x if n > 0) > degree_cap:
                    continue
                orderings = factorial(length) // prod(factorial(m) for m in Counter(x).values())
                series = series_product([s_inv] + [s.scale_argument(n) for n in x], order)
                # z^-2g shift, then z^0
                c = Fraction(orderings, factorial(length)) * series.coefficient(2 * g)
                creators = sum(1 for n in x if n < 0)
                terms.setdefault(g - 1 + creators, {})[tuple(x)] = c
        return GradedOperator(terms)

    return _cached(("V", k, degree_cap, genus_cap), build)


def _genus_for(mu: Partition, nu: Partition, insertions: Sequence[int], genus: Optional[int]) -> int:
    twice = sum(insertions) + 2 - len(mu) - len(nu)
    if twice % 2 or (genus is not None and 2 * genus != twice):
        raise ConstraintViolation(
            f"sum k_i = {sum(insertions)} does not equal 2g - 2 + l(mu) + l(nu)", relation="dimension")
    return twice // 2


def descendant_operators(insertions: Sequence[int], degree: int) -> List[GradedOperator]:
    return [build_Mk(k, degree, k // 2) for k in insertions]


def matrix_element(mu: Partition, nu: Partition, insertions: Sequence[int],
                   genus: Optional[int] = None) -> Fraction:
    """Coeff_u^(g+l(mu)-1) <b_mu|M_k1 ... M_kn|b_nu> / (z(mu) z(nu))."""
    mu, nu = make_partition(mu), make_partition(nu)
    if size(mu) != size(nu):
        raise DegreeMismatch(f"|mu| = {size(mu)} but |nu| = {size(nu)}")
    for k in insertions:
        _check_power(k)
    g = _genus_for(mu, nu, insertions, genus)
    power = g + len(mu) - 1
    if power < 0:
        return Fraction(0)
    state = apply_sequence(descendant_operators(insertions, size(mu)), FockVector.basis(nu))
    raw = bracket(FockVector.basis(mu), state).get(power, Fraction(0))
    return raw / (centralizer_size(mu) * centralizer_size(nu))


def trace_element(d: int, insertions: Sequence[int], genus: Optional[int] = None) -> Fraction:
    """Elliptic invariant: Coeff_u^(g-1) sum_lambda <b_lambda|M...M|b_lambda> / z(lambda)."""
    if d < 1:
        raise DegreeMismatch("elliptic invariants need positive degree")
    for k in insertions:
        _check_power(k)
    g = _genus_for(EMPTY, EMPTY, insertions, genus)
    if g < 1:
        return Fraction(0)
    ops = descendant_operators(insertions, d)
    total = Fraction(0)
    for lam in enumerate_partitions(d):
        b = FockVector.basis(lam)
        total += bracket(b, apply_sequence(ops, b)).get(g - 1, Fraction(0)) / centralizer_size(lam)
    return total


# Wick expansion

@dataclass(frozen=True)
class FeynmanGraph:
    """A completion: each pair joins a right-directed germ at group i to a left-directed one at j > i."""

    groups: int
    pairs: Tuple[Tuple[int, int, int], ...]
    weight: Fraction
    internal_weight: Fraction

    def edge_counts(self) -> Counter:
        return Counter(self.pairs)

    def to_dot(self, name: str = "feynman") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for i in range(self.groups):
            shape = "point" if i in (0, self.groups - 1) else "circle"
            lines.append(f'  g{i} [shape={shape},label="{i}"];')
        for (i, j, w), m in sorted(self.edge_counts().items()):
            label = f"{w}" + (f" x{m}" if m > 1 else "")
            lines.append(f'  g{i} -> g{j} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)

    def to_json(self) -> Dict:
        return {"pairs": [list(p) for p in self.pairs], "weight": format_rational(self.weight),
                "internal_weight": format_rational(self.internal_weight)}


@dataclass(frozen=True)
class FeynmanFragment:
    """Germs of a product m_0 m_1 ... m_n+1: annihilators point right, creators point left."""

    monomials: Tuple[HeisenbergMonomial, ...]

    def __post_init__(self):
        ms = self.monomials
        if len(ms) < 2:
            raise GWHError("a Feynman product needs its two boundary monomials")
        if any(n < 0 for n in ms[0].factors):
            raise GWHError("the first monomial of a Feynman product must be all annihilators")
        if any(n > 0 for n in ms[-1].factors):
            raise GWHError("the last monomial of a Feynman product must be all creators")
        for m in ms[1:-1]:
            if not m.is_normally_ordered():
                raise GWHError(f"inner monomial {m} is not normally ordered")

    @classmethod
    def from_factors(cls, groups: Sequence[Sequence[int]]) -> "FeynmanFragment":
        return cls(tuple(HeisenbergMonomial(tuple(g)) for g in groups))

    @property
    def scalar(self) -> Fraction:
        return prod((m.scalar for m in self.monomials), start=Fraction(1))

    def germs(self) -> List[Tuple[int, int]]:
        """(group, index) in product order."""
        return [(gi, n) for gi, m in enumerate(self.monomials) for n in m.factors]

    def completions(self) -> Iterator[FeynmanGraph]:
        germs = self.germs()
        last = len(self.monomials) - 1
        right = [(pos, gi, n) for pos, (gi, n) in enumerate(germs) if n > 0]
        left = [(pos, gi, -n) for pos, (gi, n) in enumerate(germs) if n < 0]
        if sorted(n for _, _, n in right) != sorted(w for _, _, w in left):
            return
        used = [False] * len(left)
        chosen: List[Tuple[int, int, int]] = []

        def walk(idx: int):
            if idx == len(right):
                yield tuple(chosen)
                return
            pos, gi, w = right[idx]
            for c, (cpos, gj, cw) in enumerate(left):
                if used[c] or cw != w or cpos <= pos:
                    continue
                used[c] = True
                chosen.append((gi, gj, w))
                yield from walk(idx + 1)
                chosen.pop()
                used[c] = False

        for pairs in walk(0):
            weight = Fraction(prod(w for _, _, w in pairs))
            internal = Fraction(1)
            for gi, gj, w in pairs:
                internal *= w
                # boundary germs carry no weight
                if gi == 0:
                    internal /= w
                if gj == last:
                    internal /= w
            yield FeynmanGraph(len(self.monomials), tuple(sorted(pairs)), weight, internal)


def vacuum_expectation(product: Sequence[HeisenbergMonomial]) -> Fraction:
    v = FockVector.vacuum()
    for m in reversed(product):
        v = apply(m, v)
    return v.coefficient(EMPTY)


def wick_expectation(product: Sequence[HeisenbergMonomial],
                     internal_only: bool = False) -> Tuple[Fraction, List[FeynmanGraph]]:
    """Sum over complete contractions; raw weights multiply the pair weights w."""
    fragment = FeynmanFragment(tuple(product))
    graphs = list(fragment.completions())
    attr = "internal_weight" if internal_only else "weight"
    total = sum((getattr(g, attr) for g in graphs), Fraction(0)) * fragment.scalar
    return total, graphs


@dataclass(frozen=True)
class FeynmanClass:
    cover: TropicalCover
    size: int
    expected_size: Fraction
    contribution: Fraction

    def to_json(self) -> Dict:
        return {"cover": self.cover.to_json(), "size": self.size,
                "expected_size": format_rational(self.expected_size),
                "contribution": format_rational(self.contribution)}


def _genus_of_term(power: int, factors: Factors) -> int:
    return power + 1 - sum(1 for n in factors if n < 0)


def feynman_covers(mu: Partition, nu: Partition, insertions: Sequence[int],
                   genus: Optional[int] = None) -> List[FeynmanClass]:
    """Collapse the completed graphs of <a_mu M_k1 ... M_kn a_-nu> onto tropical line covers."""
    mu, nu = make_partition(mu), make_partition(nu)
    if size(mu) != size(nu):
        raise DegreeMismatch(f"|mu| = {size(mu)} but |nu| = {size(nu)}")
    g = _genus_for(mu, nu, insertions, genus)
    d = size(mu)
    n = len(insertions)
    target = TargetShape.line(insertions)
    choices = [build_Mk(k, d, k // 2).items() for k in insertions]
    bra = HeisenbergMonomial(tuple(sorted(mu)))
    ket = HeisenbergMonomial(tuple(sorted(-p for p in nu)))
    sizes: Counter = Counter()
    contributions: Dict[TropicalCover, Fraction] = {}
    for combo in itertools.product(*choices):
        inner = [HeisenbergMonomial(x, c) for _, x, c in combo]
        fragment = FeynmanFragment(tuple([bra] + inner + [ket]))
        vertices = [CoverVertex(i, _genus_of_term(p, x)) for i, (p, x, _) in enumerate(combo)]
        for graph in fragment.completions():
            edges: Counter = Counter()
            for (gi, gj, w), m in graph.edge_counts().items():
                left = BOUNDARY if gi == 0 else gi - 1
                right = BOUNDARY if gj == n + 1 else gj - 1
                edges[(left, right, w, 0)] += m
            cover = TropicalCover.assemble(target, vertices, edges)
            if cover.genus() != g:
                continue
            sizes[cover] += 1
            contributions[cover] = contributions.get(cover, Fraction(0)) + \
                fragment.scalar * graph.internal_weight / (aut_count(mu) * aut_count(nu))
    out = []
    for cover in sorted(sizes, key=TropicalCover.sort_key):
        expected = Fraction(aut_count(mu) * aut_count(nu), parallel_factor(cover))
        for i in range(len(cover.vertices)):
            left, right = cover.sides(i)
            expected *= aut_count(left) * aut_count(right)
        out.append(FeynmanClass(cover, sizes[cover], expected, contributions[cover]))
    logger.debug(f"[FOCK] {len(out)} Feynman classes for mu={mu} nu={nu} k={tuple(insertions)}")
    return out


# deterministic randomness

def det_rand(seed: int) -> Fraction:
    """Deterministic value in [0, 1): the leading 64 bits of sha256 over the seed, as an exact fraction."""
    digest = hashlib.sha256(b"gwh-rand:%d" % seed).digest()
    return Fraction(int.from_bytes(digest[:8], "big"), 1 << 64)


def det_randint(seed: int, low: int, high: int) -> int:
    """Uniform integer in [low, high]."""
    return low + int(det_rand(seed) * (high - low + 1))


def _det_partition(seed: int, d: int) -> Partition:
    parts = enumerate_partitions(d)
    return parts[det_randint(seed, 0, len(parts) - 1)]


def random_product(seed: int, max_degree: int = 6, max_inner: int = 2) -> List[HeisenbergMonomial]:
    """Bra annihilators, degree-preserving inner monomials, ket creators; total degree <= max_degree."""
    base = seed * 1000
    d = det_randint(base, 1, max_degree)
    bra = _det_partition(base + 1, d)
    ket = _det_partition(base + 2, d)
    product = [HeisenbergMonomial(tuple(sorted(bra)))]
    for i in range(det_randint(base + 3, 0, max_inner)):
        s = det_randint(base + 10 + 3 * i, 1, d)
        creators = _det_partition(base + 11 + 3 * i, s)
        annihilators = _det_partition(base + 12 + 3 * i, s)
        product.append(HeisenbergMonomial(tuple(sorted(-p for p in creators)) + tuple(sorted(annihilators))))
    product.append(HeisenbergMonomial(tuple(sorted(-p for p in ket))))
    return product


# operator expressions

_TOKEN = re.compile(r"(a\((-?\d+)\)|F2|M\((\d+)\))(?:\^(\d+))?$")


@dataclass(frozen=True)
class OperatorExpression:
    bra: Partition
    ket: Partition
    operators: Tuple[Tuple[str, int], ...]  # ("a", n) | ("F2", 0) | ("M", k), powers expanded

    def degree_profile(self) -> int:
        """Largest Fock degree reached while applying the operators to the ket."""
        d = size(self.ket)
        top = d
        for kind, n in reversed(self.operators):
            if kind == "a":
                d -= n
                top = max(top, d)
        return max(top, size(self.bra))

    def build(self, degree_cap: Optional[int] = None) -> List[GradedOperator]:
        cap = degree_cap if degree_cap is not None else self.degree_profile()
        ops = []
        for kind, n in self.operators:
            if kind == "a":
                ops.append(GradedOperator({0: {(n,): 1}}))
            elif kind == "F2":
                ops.append(cut_join(cap))
            else:
                ops.append(build_Mk(n, cap, n // 2))
        return ops

    def evaluate(self, degree_cap: Optional[int] = None) -> Dict[int, Fraction]:
        """u-graded <bra|ops|ket>."""
        state = apply_sequence(self.build(degree_cap), FockVector.basis(self.ket))
        return bracket(FockVector.basis(self.bra), state)

    def fragment(self) -> FeynmanFragment:
        """Only plain a(n) products have a Feynman expansion here."""
        if any(kind != "a" for kind, _ in self.operators):
            raise GWHError("Feynman diagrams need an expression built from a(n) factors only")
        groups = [tuple(sorted(self.bra))] + [(n,) for _, n in self.operators] + \
                 [tuple(sorted(-p for p in self.ket))]
        return FeynmanFragment.from_factors(groups)


def parse_expression(text: str) -> OperatorExpression:
    """Whitespace-separated tokens: `bra 2,1` first, `ket 1,1,1` last, a(n) F2 M(k) with ^r powers."""
    tokens = [(m.group(0), m.start()) for m in re.finditer(r"\S+", text)]
    bra: Partition = EMPTY
    ket: Partition = EMPTY
    operators: List[Tuple[str, int]] = []
    i = 0
    seen_ket = False
    while i < len(tokens):
        tok, pos = tokens[i]
        if seen_ket:
            raise ExpressionError(f"unexpected {tok!r} after the ket", pos)
        if tok in ("bra", "ket"):
            if i + 1 >= len(tokens):
                raise ExpressionError(f"{tok} needs a partition", pos + len(tok))
            part_tok, part_pos = tokens[i + 1]
            try:
                mu = parse_partition(part_tok)
            except GWHError:
                raise ExpressionError(f"bad partition {part_tok!r}", part_pos) from None
            if tok == "bra":
                if operators or i:
                    raise ExpressionError("bra must come first", pos)
                bra = mu
            else:
                ket = mu
                seen_ket = True
            i += 2
            continue
        if tok.startswith("^"):
            if not operators or not tok[1:].isdigit():
                raise ExpressionError(f"dangling power {tok!r}", pos)
            power = int(tok[1:])
            last = operators.pop()
            operators.extend([last] * power)
            i += 1
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ExpressionError(f"unknown token {tok!r}", pos)
        if m.group(2) is not None:
            n = int(m.group(2))
            if n == 0:
                raise ExpressionError("a(0) is not a ladder operator", pos)
            op = ("a", n)
        elif m.group(3) is not None:
            op = ("M", int(m.group(3)))
        else:
            op = ("F2", 0)
        power = int(m.group(4)) if m.group(4) is not None else 1
        operators.extend([op] * power)
        i += 1
    return OperatorExpression(bra, ket, tuple(operators))


def graded_to_json(graded: Mapping[int, Fraction]) -> Dict[str, str]:
    return {str(p): format_rational(c) for p, c in sorted(graded.items())}
