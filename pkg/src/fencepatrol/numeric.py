"""Exact rational helpers.

All quantities in the package are :class:`fractions.Fraction` values, which
are always stored in lowest terms with a positive denominator. This module
adds the textual form used on the command line and in schedule files, and the
rational least common multiple used to build common periods.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

from .errors import PatrolError

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int

Rational = Fraction
RationalLike = Union[Fraction, int, str]

_LITERAL = re.compile(r"-?[0-9]+(/[0-9]+)?")


def parse_rational(text: str) -> Fraction:
    """Parse ``p`` or ``p/q`` into a canonical Fraction.

    Decimal and exponent notation are rejected on purpose.
    """
    if not isinstance(text, str) or _LITERAL.fullmatch(text) is None:
        raise PatrolError("MALFORMED_NUMBER", f"not a rational literal: {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise PatrolError("ZERO_DENOMINATOR", f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def render(value: Fraction) -> str:
    """Canonical text: ``p/q``, or ``p`` when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise PatrolError("MALFORMED_NUMBER", "floats are not accepted as exact input")
    return Fraction(value)


def rational_lcm(a: Fraction, b: Fraction) -> Fraction:
    """Smallest positive r with r/a and r/b both integers."""
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0:
        raise PatrolError("NONPOSITIVE_INPUT", f"lcm needs positive inputs, got {a}, {b}")
    num = math.lcm(a.numerator, b.numerator)
    den = math.gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def rational_lcm_all(values: Iterable[Fraction]) -> Fraction:
    values = list(values)
    if not values:
        raise PatrolError("NONPOSITIVE_INPUT", "empty list")
    out = Fraction(values[0])
    if out <= 0:
        raise PatrolError("NONPOSITIVE_INPUT", f"nonpositive value {out}")
    for v in values[1:]:
        out = rational_lcm(out, v)
    return out


def _harmonic_pq(lo: int, hi: int) -> tuple[int, int]:
    """Unreduced p/q with p/q = sum of 1/i for i in [lo, hi].

    Binary splitting keeps the partial numerators and denominators balanced,
    which matters once the range has many thousands of terms. gmpy2 is used
    for the big multiplications when it is installed.
    """
    one = _mpz(1)

    def split(a: int, b: int):
        if b - a < 16:
            p, q = _mpz(0), one
            for i in range(a, b):
                p, q = p * i + q, q * i
            return p, q
        m = (a + b) // 2
        p1, q1 = split(a, m)
        p2, q2 = split(m, b)
        return p1 * q2 + p2 * q1, q1 * q2

    p, q = split(lo, hi + 1)
    return int(p), int(q)


def harmonic_range(lo: int, hi: int) -> Fraction:
    """Exact sum of 1/i for i in [lo, hi] (an empty range gives 0)."""
    if hi < lo:
        return Fraction(0)
    if lo < 1:
        raise PatrolError("BAD_PARAMS", "harmonic terms start at 1")
    return Fraction(*_harmonic_pq(lo, hi))


def harmonic_number(n: int) -> Fraction:
    return harmonic_range(1, n)


def harmonic_range_cmp(lo: int, hi: int, bound: Fraction) -> int:
    """Sign of (sum_{i=lo}^{hi} 1/i) - bound, without reducing the sum.

    Reducing p/q for ranges of 10^5 terms costs far more than the sum itself.
    """
    bound = Fraction(bound)
    if hi < lo:
        p, q = 0, 1
    else:
        p, q = _harmonic_pq(lo, hi)
    lhs = p * bound.denominator
    rhs = bound.numerator * q
    return (lhs > rhs) - (lhs < rhs)
