"""Exact integer and rational arithmetic on top of GMP.

Rationals are gmpy2.mpq values, which are always stored reduced with a
positive denominator, so canonical form is free. Helpers here cover the
operations the reductions lean on: powers of ten, digit counts, comparisons
against powers of ten without materializing huge intermediates, power sums
grouped by denominator, and decimal-string (de)serialization.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

from .errors import InputError, ParseError

Int = mpz
Rat = mpq

_RAT_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def to_int(x) -> Int:
    """Coerce an exactly integral value to mpz; rejects proper fractions."""
    if isinstance(x, mpq) and x.denominator != 1:
        raise InputError(f"not an integer: {x}")
    return mpz(x)


def rat(num, den=1) -> Rat:
    """Build a reduced rational; rejects a zero denominator."""
    try:
        return mpq(num, den)
    except ZeroDivisionError:
        raise InputError("zero denominator") from None


def rat_normalize(num, den) -> Rat:
    """Canonical num/den form: reduced, denominator positive."""
    return rat(num, den)


def as_ratio(x) -> tuple[Int, Int]:
    """Numerator and denominator of x in canonical form."""
    q = mpq(x)
    return q.numerator, q.denominator


def is_integer(x) -> bool:
    """True when x is an integral rational."""
    return mpq(x).denominator == 1


@lru_cache(maxsize=8192)
def pow10(e: int) -> Int:
    """10^e for e >= 0."""
    if e < 0:
        raise InputError(f"pow10 wants a nonnegative exponent, got {e}")
    return mpz(10) ** e


def rat_pow(x, e: int) -> Rat:
    """x^e for a natural exponent e; 0^0 is 1."""
    if e < 0:
        raise InputError(f"exponent must be nonnegative, got {e}")
    return mpq(x) ** e


def digits10(x) -> int:
    """Decimal digit count of |x|; 0 has one digit."""
    n = mpz(x)
    if n == 0:
        return 1
    d = gmpy2.num_digits(n, 10)
    # num_digits may overshoot by one on some versions; correct exactly.
    if abs(n) < pow10(d - 1):
        d -= 1
    return d


def rat_digits10(x) -> tuple[int, int]:
    """Digit counts of (numerator, denominator)."""
    num, den = as_ratio(x)
    return digits10(num), digits10(den)


def cmp_pow10(x, e: int) -> int:
    """Compare |x| against 10^e: -1 below, 0 equal, +1 above."""
    num, den = as_ratio(x)
    if num == 0:
        return -1
    # Clear the sign and the negative exponent, then compare integers.
    lhs, rhs = abs(num), den
    if e >= 0:
        rhs = rhs * pow10(e)
        rhs_digits = digits10(den) + e
    else:
        lhs = lhs * pow10(-e)
    lhs_digits = digits10(num) + max(0, -e)
    if e >= 0:
        if lhs_digits != rhs_digits:
            return -1 if lhs_digits < rhs_digits else 1
    if lhs < rhs:
        return -1
    if lhs > rhs:
        return 1
    return 0


def signed_sum(values: Iterable) -> Rat:
    """Exact sum of rationals, grouped by denominator to avoid gcd churn."""
    return power_sum(values, 1)


def abs_sum(values: Iterable) -> Rat:
    """Exact sum of |x| over the values."""
    groups: dict[Int, Int] = {}
    for v in values:
        num, den = as_ratio(v)
        groups[den] = groups.get(den, mpz(0)) + abs(num)
    total = mpq(0)
    for den, num in groups.items():
        total += mpq(num, den)
    return total


def power_sum(values: Iterable, k: int) -> Rat:
    """Exact sum of x^k over the values, for natural k.

    Values sharing a denominator are summed as integers first; the
    construction reuses a handful of denominators across thousands of huge
    values, so this sidesteps per-addition reduction entirely.
    """
    if k < 0:
        raise InputError(f"power_sum wants a nonnegative power, got {k}")
    groups: dict[Int, Int] = {}
    for v in values:
        num, den = as_ratio(v)
        groups[den] = groups.get(den, mpz(0)) + num**k
    if not groups:
        return mpq(0)
    # Combine the groups over one common denominator: a single reduction
    # at the end instead of a gcd per pairwise addition.
    common = mpz(1)
    for den in groups:
        common = gmpy2.lcm(common, den)
    common_k = common**k
    total = mpz(0)
    for den, num in groups.items():
        total += num * (common_k // den**k)
    return mpq(total, common_k)


def common_denominator_ints(values: Sequence) -> tuple[list[Int], Int]:
    """Rescale values to integers over their least common denominator.

    Returns (ints, D) with values[i] == ints[i] / D exactly.
    """
    dens = [as_ratio(v)[1] for v in values]
    d = mpz(1)
    for den in set(dens):
        d = gmpy2.lcm(d, den)
    ints = []
    for v, den in zip(values, dens):
        num = as_ratio(v)[0]
        ints.append(num * (d // den))
    return ints, d


def int_to_str(x) -> str:
    """Decimal string of an integer."""
    return str(mpz(x))


def int_from_str(s: str) -> Int:
    """Parse a decimal integer string."""
    try:
        return mpz(s.strip())
    except ValueError:
        raise ParseError(f"not a decimal integer: {s!r}") from None


def rat_to_str(x) -> str:
    """Canonical decimal serialization: 'num' or 'num/den'."""
    return str(mpq(x))


def rat_from_str(s: str) -> Rat:
    """Parse 'num' or 'num/den'; result is canonical."""
    text = s.strip()
    if not _RAT_RE.match(text):
        raise ParseError(f"not a rational literal: {s!r}")
    # mpz parses signed decimal strings of any length (no CPython
    # string-to-int size limit) and tolerates a leading '+'.
    num, _, den = text.partition("/")
    if den == "":
        return mpq(mpz(num))
    return rat(mpz(num), mpz(den))
