#!/usr/bin/env python3
"""
Exact arithmetic substrate
- Rationals are fractions.Fraction, always in lowest terms
- Truncated univariate formal series over the rationals
- S(z) = sinh(z/2)/(z/2) and the ring operations the vertex formulas need
- Text codec "p/q" used by every JSON emitter
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[int, Fraction, str]

ZERO = Fraction(0)


class SeriesError(ArithmeticError):
    """Raised for non-invertible series and mismatched variable tags."""


def as_rational(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact or boolean value {x!r}")
    return Fraction(x)


def format_rational(q: RationalLike) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    if any(c in text for c in ".eE"):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


@dataclass(frozen=True)
class FormalSeries:
    """Dense truncated series sum_{i<=N} coeffs[i] * var**i."""

    var: str
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise SeriesError("a series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", tuple(as_rational(c) for c in self.coeffs))

    # construction

    @classmethod
    def constant(cls, value: RationalLike, order: int, var: str = "z") -> "FormalSeries":
        coeffs = [ZERO] * (order + 1)
        coeffs[0] = as_rational(value)
        return cls(var, tuple(coeffs))

    @classmethod
    def monomial(cls, power: int, order: int, var: str = "z", scalar: RationalLike = 1) -> "FormalSeries":
        coeffs = [ZERO] * (order + 1)
        if power <= order:
            coeffs[power] = as_rational(scalar)
        return cls(var, tuple(coeffs))

    # accessors

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, i: int) -> Fraction:
        if i < 0 or i > self.order:
            return ZERO
        return self.coeffs[i]

    def truncate(self, order: int) -> "FormalSeries":
        if order >= self.order:
            return self
        return FormalSeries(self.var, self.coeffs[: order + 1])

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and all(c == 0 for c in self.coeffs[1:])

    def _check(self, other: "FormalSeries") -> int:
        if self.var != other.var:
            raise SeriesError(f"mismatched variables {self.var!r} and {other.var!r}")
        return min(self.order, other.order)

    # ring operations

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        n = self._check(other)
        return FormalSeries(self.var, tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)))

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(self.var, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            n = self._check(other)
            out = [ZERO] * (n + 1)
            for i, a in enumerate(self.coeffs[: n + 1]):
                if a == 0:
                    continue
                for j in range(n - i + 1):
                    b = other.coeffs[j]
                    if b:
                        out[i + j] += a * b
            return FormalSeries(self.var, tuple(out))
        c = as_rational(other)
        return FormalSeries(self.var, tuple(c * a for a in self.coeffs))

    __rmul__ = __mul__

    def invert(self) -> "FormalSeries":
        a0 = self.coeffs[0]
        if a0 == 0:
            raise SeriesError("non-invertible series")
        n = self.order
        b = [ZERO] * (n + 1)
        b[0] = 1 / a0
        for m in range(1, n + 1):
            s = ZERO
            for k in range(1, m + 1):
                if self.coeffs[k]:
                    s += self.coeffs[k] * b[m - k]
            b[m] = -s / a0
        return FormalSeries(self.var, tuple(b))

    def scale_argument(self, c: RationalLike) -> "FormalSeries":
        """Substitute var -> c*var."""
        c = as_rational(c)
        return FormalSeries(self.var, tuple(a * c ** i for i, a in enumerate(self.coeffs)))

    def power(self, e: int) -> "FormalSeries":
        if e < 0:
            return self.invert().power(-e)
        result = FormalSeries.constant(1, self.order, self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(format_rational(c))
            else:
                mono = self.var if i == 1 else f"{self.var}^{i}"
                terms.append(mono if c == 1 else f"{format_rational(c)}*{mono}")
        return " + ".join(terms) if terms else "0"


def series_sinh_ratio(order: int, var: str = "z") -> FormalSeries:
    """S(z) = sum_k (z/2)^{2k}/(2k+1)! up to z^order."""
    if order < 0:
        raise SeriesError("truncation order must be non-negative")
    coeffs = [ZERO] * (order + 1)
    for k in range(order // 2 + 1):
        coeffs[2 * k] = Fraction(1, 4 ** k * factorial(2 * k + 1))
    return FormalSeries(var, tuple(coeffs))


def series_invert(s: FormalSeries) -> FormalSeries:
    return s.invert()


def series_mul(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    return a * b


def series_add(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    return a + b


def series_scale_argument(s: FormalSeries, c: RationalLike) -> FormalSeries:
    return s.scale_argument(c)


def series_product(factors: Iterable[FormalSeries], order: int, var: str = "z") -> FormalSeries:
    result = FormalSeries.constant(1, order, var)
    for f in factors:
        result = result * f
    return result


def exact_sum(values: Sequence[RationalLike]) -> Fraction:
    total = ZERO
    for v in values:
        total += as_rational(v)
    return total
