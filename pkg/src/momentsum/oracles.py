"""Brute-force solvers and probes certifying the constructions at desk scale.

Subset enumeration is lexicographic over a canonical element order, so the
first witness is reproducible: descending absolute value (ties by value) for
rational instances, representation order for finite fields. Deciding the
large-magnitude elements first pins the high digits of every moment early,
which makes the exact interval-pruning rule (partial sums bounded by the
extreme continuations of each moment) collapse dead branches near the root;
pruning cannot change any decision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb
from typing import Sequence

from gmpy2 import mpq, mpz

from .errors import BudgetExceededError, InputError
from .exactnum import common_denominator_ints, pow10
from .fields import Rationals


@dataclass(frozen=True)
class SearchBudget:
    """Caps for enumeration and sampling; the seed fixes probe streams."""

    max_subsets: int = 10**6
    max_trials: int = 10**4
    seed: int = 0

    def __post_init__(self):
        if self.max_subsets < 1 or self.max_trials < 1:
            raise InputError("budget caps must be positive")
        if self.seed < 0:
            raise InputError("seed must be nonnegative")


DEFAULT_BUDGET = SearchBudget()


def rational_search_order(elements) -> list:
    """Canonical enumeration order for rational elements: descending
    absolute value, ties by value, then position."""
    return sorted(
        range(len(elements)), key=lambda p: (-abs(elements[p]), elements[p], p)
    )


def _drop_int_scale(inst):
    """Sorted positions, integer-scaled values, and scaled targets for a
    rational instance; enables exact integer pruning."""
    order = rational_search_order(inst.elements)
    values = [inst.elements[p] for p in order]
    ints, den = common_denominator_ints(values)
    targets = []
    for j, t in enumerate(inst.targets, start=1):
        scaled = mpq(t) * mpq(den) ** j
        if scaled.denominator != 1:
            # Non-integral target after clearing: unreachable by any subset.
            return order, ints, None
        targets.append(scaled.numerator)
    return order, ints, targets


def _power_tables(ints: Sequence, d: int):
    """tables[j][i] = prefix sums of the sorted j-th powers of ints[i:].

    Gives O(1) min/max continuation sums: choosing r more elements from
    positions >= i contributes between the first r and the last r entries
    of the sorted power list of that suffix.
    """
    n = len(ints)
    tables = []
    for j in range(1, d + 1):
        powers = [v**j for v in ints]
        suffix = []
        for i in range(n + 1):
            tail = sorted(powers[i:])
            acc = [mpz(0)]
            for v in tail:
                acc.append(acc[-1] + v)
            suffix.append(acc)
        tables.append(suffix)
    return tables


def _search_rational(ints, targets, k: int, d: int):
    """First k-combination (by position order) whose moment sums hit the
    targets; exact interval pruning on every degree."""
    n = len(ints)
    tables = _power_tables(ints, d)
    powers = [[v ** (j + 1) for v in ints] for j in range(d)]
    chosen: list[int] = []
    partial = [mpz(0)] * d

    def feasible(pos: int, need: int) -> bool:
        for j in range(d):
            acc = tables[j][pos]
            lo = partial[j] + acc[need]
            hi = partial[j] + acc[-1] - acc[len(acc) - 1 - need]
            if not lo <= targets[j] <= hi:
                return False
        return True

    def dfs(pos: int, need: int):
        if need == 0:
            if all(partial[j] == targets[j] for j in range(d)):
                return tuple(chosen)
            return None
        if n - pos < need or not feasible(pos, need):
            return None
        chosen.append(pos)
        for j in range(d):
            partial[j] += powers[j][pos]
        hit = dfs(pos + 1, need - 1)
        if hit is not None:
            return hit
        chosen.pop()
        for j in range(d):
            partial[j] -= powers[j][pos]
        return dfs(pos + 1, need)

    return dfs(0, k)


def _search_generic(inst, order):
    """Plain lexicographic scan for finite fields."""
    from itertools import combinations

    field = inst.field
    values = [inst.elements[p] for p in order]
    targets = tuple(inst.targets)
    d = inst.d
    for combo in combinations(range(len(values)), inst.k):
        sums = []
        for j in range(1, d + 1):
            acc = field.zero()
            for c in combo:
                acc = field.add(acc, field.pow(values[c], j))
            sums.append(acc)
        if tuple(sums) == targets:
            return combo
    return None


def brute_force_mss(inst, budget: SearchBudget = DEFAULT_BUDGET):
    """Lexicographically first size-k subset (over the canonical element
    order) meeting all moment targets, as original element positions; None
    if no subset works."""
    total = comb(inst.size, inst.k)
    if total > budget.max_subsets:
        raise BudgetExceededError(
            f"{total} subsets exceed the budget {budget.max_subsets}",
            required=total,
        )
    if isinstance(inst.field, Rationals):
        order, ints, targets = _drop_int_scale(inst)
        if targets is None:
            return None
        hit = _search_rational(ints, targets, inst.k, inst.d)
    else:
        order = sorted(range(inst.size), key=lambda p: inst.field.sort_key(inst.elements[p]))
        hit = _search_generic(inst, order)
    if hit is None:
        return None
    return tuple(sorted(order[c] for c in hit))


def _elementary_of(field, values, d: int):
    """First d elementary symmetric sums of the values."""
    coeffs = [field.one()] + [field.zero()] * d
    for v in values:
        upper = min(d, len(coeffs) - 1)
        for j in range(upper, 0, -1):
            coeffs[j] = field.add(coeffs[j], field.mul(v, coeffs[j - 1]))
    return tuple(coeffs[1 : d + 1])


def brute_force_symss(inst, budget: SearchBudget = DEFAULT_BUDGET):
    """As brute_force_mss but matching elementary symmetric targets."""
    total = comb(inst.size, inst.k)
    if total > budget.max_subsets:
        raise BudgetExceededError(
            f"{total} subsets exceed the budget {budget.max_subsets}",
            required=total,
        )
    from itertools import combinations

    field = inst.field
    if isinstance(field, Rationals):
        order = rational_search_order(inst.elements)
    else:
        order = sorted(
            range(inst.size), key=lambda p: field.sort_key(inst.elements[p])
        )
    values = [inst.elements[p] for p in order]
    targets = tuple(inst.targets)
    for combo in combinations(range(len(values)), inst.k):
        if _elementary_of(field, [values[c] for c in combo], inst.d) == targets:
            return tuple(sorted(order[c] for c in combo))
    return None


@dataclass(frozen=True)
class BimodalityReport:
    """Random-subset evidence for the two-sided sum gap."""

    trials: int
    violations: tuple
    lo_exp: int
    hi_exp: int

    @property
    def ok(self) -> bool:
        return not self.violations


def bimodality_probe(
    values: Sequence,
    lo_exp: int,
    hi_exp: int,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> BimodalityReport:
    """Sample random subsets of the values and flag any subset sum with
    magnitude inside [10^lo_exp, 10^hi_exp].

    Sums are taken exactly after rescaling everything to a common integer
    denominator. Violations record (subset bitmask, unscaled sum).
    """
    ints, den = common_denominator_ints(list(values))
    lo = pow10(lo_exp) * den
    hi = pow10(hi_exp) * den
    rng = random.Random(budget.seed)
    n = len(ints)
    violations = []
    for _ in range(budget.max_trials):
        mask = rng.getrandbits(n) if n else 0
        total = mpz(0)
        m = mask
        pos = 0
        while m:
            if m & 1:
                total += ints[pos]
            m >>= 1
            pos += 1
        mag = abs(total)
        if lo <= mag <= hi:
            violations.append((mask, mpq(total, den)))
    return BimodalityReport(
        trials=budget.max_trials,
        violations=tuple(violations),
        lo_exp=lo_exp,
        hi_exp=hi_exp,
    )
