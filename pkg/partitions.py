#!/usr/bin/env python3
"""
Integer partitions and the space W of ramification conditions
- Partitions are weakly decreasing tuples of positive ints, () is the partition of 0
- |Aut|, centralizer sizes, reverse-lexicographic enumeration, tilde extension
- WElement: finite rational combinations of partitions (completed cycles live here)
- Error hierarchy shared by every module above this one
"""
from __future__ import annotations

import logging
from collections import Counter
from fractions import Fraction
from itertools import product
from math import comb, factorial, prod
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from exact_arith import RationalLike, as_rational, format_rational

logger = logging.getLogger(__name__)

Partition = Tuple[int, ...]
EMPTY: Partition = ()


class GWHError(ValueError):
    """Root of every user-facing error raised by the library."""

    relation: Optional[str] = None


class PartitionError(GWHError):
    pass


class DegreeMismatch(GWHError):
    relation = "degree"


class OversizeCondition(GWHError):
    """A ramification condition larger than the degree; callers map it to 0."""

    relation = "oversize"


class ConstraintViolation(GWHError):
    def __init__(self, message: str, relation: str):
        super().__init__(message)
        self.relation = relation


# construction and text codec

def make_partition(parts: Iterable[int]) -> Partition:
    parts = list(parts)
    for p in parts:
        if isinstance(p, bool) or not isinstance(p, int) or p <= 0:
            raise PartitionError(f"partition parts must be positive integers, got {p!r}")
    return tuple(sorted(parts, reverse=True))


def parse_partition(text: str) -> Partition:
    """'2,1,1' -> (2, 1, 1); '' -> ()."""
    text = text.strip()
    if not text:
        return EMPTY
    try:
        parts = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise PartitionError(f"cannot parse partition {text!r}") from None
    return make_partition(parts)


def format_partition(mu: Partition) -> str:
    return ",".join(str(p) for p in mu)


def parse_profiles(text: str) -> List[Partition]:
    """'2;1,1' -> [(2,), (1, 1)]; an empty string means no profiles."""
    if not text.strip():
        return []
    return [parse_partition(chunk) for chunk in text.split(";")]


def parse_powers(text: str) -> List[int]:
    if not text.strip():
        return []
    try:
        powers = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise PartitionError(f"cannot parse insertion powers {text!r}") from None
    if any(k < 0 for k in powers):
        raise PartitionError("insertion powers must be non-negative")
    return powers


# statistics

def size(mu: Partition) -> int:
    return sum(mu)


def aut_count(mu: Partition) -> int:
    """prod_j k_j! over the multiplicities k_j of the distinct parts."""
    return prod(factorial(k) for k in Counter(mu).values())


def centralizer_size(mu: Partition) -> int:
    return aut_count(mu) * prod(mu)


def ones(d: int) -> Partition:
    return (1,) * d


def sort_key(mu: Partition) -> Tuple:
    """Larger size first, then reverse-lexicographic."""
    return (-size(mu), tuple(-p for p in mu))


# enumeration

def _partitions(d: int, max_part: int, max_length: Optional[int]) -> Iterator[Partition]:
    if d == 0:
        yield EMPTY
        return
    if max_length is not None and max_length <= 0:
        return
    for first in range(min(d, max_part), 0, -1):
        rest_len = None if max_length is None else max_length - 1
        for rest in _partitions(d - first, first, rest_len):
            yield (first,) + rest


def enumerate_partitions(d: int, max_length: Optional[int] = None) -> List[Partition]:
    if d < 0:
        raise PartitionError("cannot partition a negative integer")
    return list(_partitions(d, d, max_length))


def partitions_up_to(n: int, include_empty: bool = True) -> List[Partition]:
    out = [EMPTY] if include_empty else []
    for d in range(1, n + 1):
        out.extend(enumerate_partitions(d))
    return out


def sub_partitions(mu: Partition) -> List[Partition]:
    """Every distinct sub-multiset of mu, itself a partition."""
    counts = sorted(Counter(mu).items(), reverse=True)
    out = []
    for choice in product(*(range(k + 1) for _, k in counts)):
        out.append(make_partition(p for (p, _), c in zip(counts, choice) for _ in range(c)))
    return out


def remove_parts(mu: Partition, nu: Partition) -> Partition:
    """mu minus the sub-multiset nu."""
    left = Counter(mu)
    left.subtract(Counter(nu))
    if any(v < 0 for v in left.values()):
        raise PartitionError(f"{nu} is not contained in {mu}")
    return make_partition(left.elements())


def merge(*parts: Partition) -> Partition:
    return make_partition(p for mu in parts for p in mu)


def tilde_extend(mu: Partition, d: int) -> Tuple[Partition, Fraction]:
    """Pad mu with 1-parts to size d; weight C(j+k, k) with j existing 1-parts, k added."""
    k = d - size(mu)
    if k < 0:
        raise OversizeCondition(f"condition {format_partition(mu)!r} exceeds degree {d}")
    j = mu.count(1)
    return mu + ones(k), Fraction(comb(j + k, k))


class WElement:
    """Finite rational combination of partitions; zero terms are dropped."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Partition, RationalLike]] = None):
        clean: Dict[Partition, Fraction] = {}
        for mu, c in (terms or {}).items():
            mu = make_partition(mu)
            c = as_rational(c)
            if c:
                clean[mu] = clean.get(mu, Fraction(0)) + c
        self._terms = {mu: c for mu, c in clean.items() if c}

    @classmethod
    def basis(cls, mu: Partition) -> "WElement":
        return cls({mu: 1})

    @property
    def terms(self) -> Dict[Partition, Fraction]:
        return dict(self._terms)

    def coefficient(self, mu: Partition) -> Fraction:
        return self._terms.get(make_partition(mu), Fraction(0))

    def items(self) -> List[Tuple[Partition, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: sort_key(kv[0]))

    def support(self) -> List[Partition]:
        return [mu for mu, _ in self.items()]

    def __add__(self, other: "WElement") -> "WElement":
        out = dict(self._terms)
        for mu, c in other._terms.items():
            out[mu] = out.get(mu, Fraction(0)) + c
        return WElement(out)

    def __sub__(self, other: "WElement") -> "WElement":
        return self + other * -1

    def __mul__(self, scalar: RationalLike) -> "WElement":
        s = as_rational(scalar)
        return WElement({mu: s * c for mu, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, WElement) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def to_json(self) -> Dict[str, str]:
        return {format_partition(mu): format_rational(c) for mu, c in self.items()}

    def __repr__(self) -> str:
        body = " + ".join(f"{format_rational(c)}*({format_partition(mu)})" for mu, c in self.items())
        return f"WElement({body or '0'})"


def check_same_size(profiles: Sequence[Partition], d: Optional[int] = None) -> int:
    sizes = {size(mu) for mu in profiles}
    if d is not None:
        sizes.add(d)
    if len(sizes) > 1:
        raise DegreeMismatch(f"profiles of different sizes {sorted(sizes)}")
    return sizes.pop() if sizes else 0
