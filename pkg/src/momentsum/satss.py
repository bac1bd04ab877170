"""Exactly-one-in-three SAT instances and the digit gadget to subset sum.

Each variable t gets a pair of decimal numbers: both carry a marker 1 in the
t-th variable digit, and clause digit j counts how often the positive
(respectively negated) literal of t occurs in clause j. Digit columns never
exceed 9 in any subset sum, so the decimal encoding is carry-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from gmpy2 import mpz

from .errors import InputError, ParseError
from .exactnum import pow10

Clause = tuple[int, int, int]
Assignment = tuple[int, ...]

BRUTE_FORCE_VAR_LIMIT = 24


@dataclass(frozen=True)
class SatInstance:
    """An exactly-one SAT formula: clauses of three signed literals."""

    n: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.n < 0:
            raise InputError(f"negative variable count {self.n}")
        for idx, clause in enumerate(self.clauses, start=1):
            if len(clause) != 3:
                raise InputError(f"clause {idx} has {len(clause)} literals, want 3")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n:
                    raise InputError(
                        f"clause {idx}: literal {lit} outside variables 1..{self.n}"
                    )
            if any(-lit in clause for lit in clause):
                raise InputError(
                    f"clause {idx} contains a literal and its negation"
                )

    @property
    def m(self) -> int:
        return len(self.clauses)


def parse_one_in_three(text: str) -> SatInstance:
    """Parse the 'p o13' format; ';' doubles as a line separator."""
    lines: list[str] = []
    for raw in text.replace(";", "\n").split("\n"):
        line = raw.strip()
        if line:
            lines.append(line)
    if not lines:
        raise ParseError("empty input, expected a 'p o13 <n> <m>' header")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "p" or header[1] != "o13":
        raise ParseError(f"line 1: bad header {lines[0]!r}")
    try:
        n, m = int(header[2]), int(header[3])
    except ValueError:
        raise ParseError(f"line 1: bad header counts in {lines[0]!r}") from None
    if n < 0 or m < 0:
        raise ParseError(f"line 1: negative counts in {lines[0]!r}")
    if len(lines) - 1 != m:
        raise ParseError(f"header promises {m} clauses, found {len(lines) - 1}")
    clauses = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token in {line!r}") from None
        if len(nums) != 4 or nums[3] != 0:
            raise ParseError(
                f"line {lineno}: expected three literals terminated by 0"
            )
        lits = tuple(nums[:3])
        for lit in lits:
            if lit == 0 or abs(lit) > n:
                raise ParseError(
                    f"line {lineno}: literal {lit} outside variables 1..{n}"
                )
        if any(-lit in lits for lit in lits):
            raise ParseError(
                f"line {lineno}: clause contains a literal and its negation"
            )
        clauses.append(lits)
    return SatInstance(n, tuple(clauses))


def render_one_in_three(inst: SatInstance) -> str:
    """Inverse of parse_one_in_three."""
    lines = [f"p o13 {inst.n} {inst.m}"]
    for clause in inst.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def eval_exactly_one(inst: SatInstance, z: Sequence[int]) -> bool:
    """True when every clause has exactly one satisfied literal."""
    if len(z) != inst.n:
        raise InputError(f"assignment length {len(z)} != {inst.n} variables")
    if any(bit not in (0, 1) for bit in z):
        raise InputError("assignment entries must be 0 or 1")
    for clause in inst.clauses:
        hits = 0
        for lit in clause:
            value = z[abs(lit) - 1]
            if (lit > 0 and value) or (lit < 0 and not value):
                hits += 1
        if hits != 1:
            return False
    return True


def brute_force_exactly_one(inst: SatInstance, limit: int = BRUTE_FORCE_VAR_LIMIT):
    """All satisfying assignments, by exhaustive enumeration."""
    if inst.n > limit:
        raise InputError(
            f"{inst.n} variables exceeds the brute-force limit {limit}"
        )
    found = set()
    for bits in product((0, 1), repeat=inst.n):
        if eval_exactly_one(inst, bits):
            found.add(bits)
    return found


@dataclass(frozen=True)
class SubsetSumInstance:
    """The paired-number subset-sum form of an exactly-one formula."""

    n: int
    m: int
    a: tuple
    b: tuple
    target: object

    @property
    def numbers(self) -> tuple:
        """All 2n numbers in a_1, b_1, .., a_n, b_n order."""
        out = []
        for at, bt in zip(self.a, self.b):
            out.extend((at, bt))
        return tuple(out)


def gadget_digits(inst: SatInstance, t: int) -> tuple[list[int], list[int]]:
    """Little-endian decimal digits of the pair for variable t.

    Index m - j holds the occurrence count of the literal in clause j
    (clauses numbered from the left), index m + n - t holds the variable
    marker.
    """
    n, m = inst.n, inst.m
    a_digits = [0] * (n + m)
    b_digits = [0] * (n + m)
    for j, clause in enumerate(inst.clauses, start=1):
        a_digits[m - j] = sum(1 for lit in clause if lit == t)
        b_digits[m - j] = sum(1 for lit in clause if lit == -t)
    a_digits[m + n - t] = 1
    b_digits[m + n - t] = 1
    return a_digits, b_digits


def digits_to_int(digits: Iterable[int]):
    """Integer with the given little-endian decimal digits."""
    total = mpz(0)
    for i, d in enumerate(digits):
        if d:
            total += d * pow10(i)
    return total


def target_digits(n: int, m: int) -> list[int]:
    """All-ones target: one per clause digit, one per variable digit."""
    return [1] * (n + m)


def sat_to_subset_sum(inst: SatInstance) -> SubsetSumInstance:
    """The carry-free digit encoding of an exactly-one formula."""
    if inst.m == 0:
        raise InputError(
            "instances with no clauses are rejected: every pair would collide"
        )
    if inst.n == 0:
        raise InputError("instances with no variables are rejected")
    a, b = [], []
    for t in range(1, inst.n + 1):
        a_digits, b_digits = gadget_digits(inst, t)
        a.append(digits_to_int(a_digits))
        b.append(digits_to_int(b_digits))
    numbers = a + b
    if len(set(numbers)) != 2 * inst.n:
        unused = [
            t
            for t in range(1, inst.n + 1)
            if a[t - 1] == b[t - 1]
        ]
        detail = (
            f" (variables {unused} occur in no clause)" if unused else ""
        )
        raise InputError(f"encoded numbers are not distinct{detail}")
    return SubsetSumInstance(
        n=inst.n,
        m=inst.m,
        a=tuple(a),
        b=tuple(b),
        target=digits_to_int(target_digits(inst.n, inst.m)),
    )


def encode_assignment_subset(ss: SubsetSumInstance, z: Sequence[int]):
    """The subset a_t for z_t = 1, b_t for z_t = 0; sums to the target iff
    z satisfies the formula (carry-free column counting)."""
    if len(z) != ss.n:
        raise InputError(f"assignment length {len(z)} != {ss.n} variables")
    return tuple(ss.a[t] if z[t] else ss.b[t] for t in range(ss.n))
