"""Moment targets to elementary symmetric targets, and onward to
Reed-Solomon bounded-distance decoding instances.

A size-k subset with prescribed elementary symmetric sums corresponds to a
low-degree polynomial agreeing with a target vector on many evaluation
points; the conversion inverts the elements, appends the point 0, and reads
the would-be vanishing polynomial off the targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from gmpy2 import mpq

from .errors import BudgetExceededError, InputError, InternalError
from .fields import Rationals


@dataclass(frozen=True)
class SymSSInstance:
    """Distinct nonzero elements with elementary symmetric targets."""

    field: object
    elements: tuple
    k: int
    targets: tuple

    def __post_init__(self):
        if len(self.targets) < 1:
            raise InputError("need at least one elementary target")
        if not 0 <= self.k <= len(self.elements):
            raise InputError(
                f"subset size {self.k} outside 0..{len(self.elements)}"
            )
        if len(set(self.elements)) != len(self.elements):
            raise InputError("elements are not distinct")
        if any(self.field.is_zero(e) for e in self.elements):
            raise InputError("elements must be nonzero (their inverses are used)")

    @property
    def d(self) -> int:
        return len(self.targets)

    @property
    def size(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class BddInstance:
    """Evaluation points (last one 0), a target vector, and dimension K."""

    field: object
    points: tuple
    targets: tuple
    K: int
    d: int

    def __post_init__(self):
        if len(self.points) != len(self.targets):
            raise InputError("points and targets must have equal length")
        if len(set(self.points)) != len(self.points):
            raise InputError("evaluation points must be distinct")
        if not self.points or not self.field.is_zero(self.points[-1]):
            raise InputError("the last evaluation point must be 0")
        if self.K < 1:
            raise InputError(f"dimension K must be >= 1, got {self.K}")
        if self.d < 1:
            raise InputError(f"degree parameter must be >= 1, got {self.d}")


@dataclass(frozen=True)
class Poly:
    """Coefficients lowest first, no trailing zeros; () is the zero
    polynomial (degree -1)."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def make_poly(coeffs: Sequence, field) -> Poly:
    cs = list(coeffs)
    while cs and field.is_zero(cs[-1]):
        cs.pop()
    return Poly(tuple(cs))


def poly_eval(p: Poly, x, field):
    acc = field.zero()
    for c in reversed(p.coeffs):
        acc = field.add(field.mul(acc, x), c)
    return acc


def _coerce(field, v):
    if isinstance(field, Rationals):
        return mpq(v)
    if isinstance(v, int):
        return field.from_int(v)
    return v


def power_sums_to_elementary(power_sums: Sequence, field) -> tuple:
    """Elementary symmetric targets from moment targets via the Newton
    recurrence j e_j = sum_{i=1..j} (-1)^(i-1) e_{j-i} p_i.

    Needs 1..j invertible, so characteristic 0 or larger than the count.
    """
    j_max = len(power_sums)
    if field.char and field.char <= j_max:
        raise InputError(
            f"characteristic {field.char} too small: need 0 or > {j_max}"
        )
    ps = [_coerce(field, p) for p in power_sums]
    es = [field.one()]
    for j in range(1, j_max + 1):
        acc = field.zero()
        sign = 1
        for i in range(1, j + 1):
            term = field.mul(es[j - i], ps[i - 1])
            acc = field.add(acc, term) if sign == 1 else field.sub(acc, term)
            sign = -sign
        es.append(field.mul(acc, field.inv(field.from_int(j))))
    return tuple(es[1:])


def elementary_to_power_sums(elementary: Sequence, field) -> tuple:
    """Inverse direction of the Newton recurrence; division-free."""
    es = [field.one()] + [_coerce(field, e) for e in elementary]
    j_max = len(elementary)
    ps: list = []
    for k in range(1, j_max + 1):
        acc = field.zero()
        sign = 1
        for i in range(1, k):
            term = field.mul(es[i], ps[k - i - 1])
            acc = field.add(acc, term) if sign == 1 else field.sub(acc, term)
            sign = -sign
        last = field.mul(field.from_int(k), es[k])
        acc = field.add(acc, last) if sign == 1 else field.sub(acc, last)
        ps.append(acc)
    return tuple(ps)


def _det_cofactor(rows, field):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = field.zero()
    for r in range(n):
        if field.is_zero(rows[r][0]):
            continue
        minor = [row[1:] for i, row in enumerate(rows) if i != r]
        term = field.mul(rows[r][0], _det_cofactor(minor, field))
        acc = field.add(acc, term) if r % 2 == 0 else field.sub(acc, term)
    return acc


def elementary_via_determinant(power_sums: Sequence, field) -> tuple:
    """Test oracle: e_j as 1/j! times the banded Newton determinant.

    The j x j matrix carries p_1..p_j down the first column, shifted moment
    values below the diagonal, and 1, 2, .., j-1 on the superdiagonal.
    Evaluated by division-free cofactor expansion; fine for small j.
    """
    import math

    j_max = len(power_sums)
    if field.char and field.char <= j_max:
        raise InputError(
            f"characteristic {field.char} too small: need 0 or > {j_max}"
        )
    ps = [_coerce(field, p) for p in power_sums]
    out = []
    for j in range(1, j_max + 1):
        rows = []
        for r in range(j):
            row = []
            for c in range(j):
                if c <= r:
                    row.append(ps[r - c])
                elif c == r + 1:
                    row.append(field.from_int(r + 1))
                else:
                    row.append(field.zero())
            rows.append(row)
        det = _det_cofactor(rows, field)
        out.append(field.mul(det, field.inv(field.from_int(math.factorial(j)))))
    return tuple(out)


def elementary_symmetric_sums(values: Sequence, d: int, field) -> tuple:
    """First d elementary symmetric sums, via the product polynomial
    prod (x + v) truncated at degree d."""
    coeffs = [field.one()]
    for v in values:
        nxt = [field.zero()] * min(len(coeffs) + 1, d + 1)
        for e, c in enumerate(coeffs):
            if e < len(nxt):
                nxt[e] = field.add(nxt[e], c)
            if e + 1 < len(nxt):
                nxt[e + 1] = field.add(nxt[e + 1], field.mul(c, v))
        coeffs = nxt
    coeffs += [field.zero()] * (d + 1 - len(coeffs))
    return tuple(coeffs[1 : d + 1])


def mss_to_symss(inst) -> SymSSInstance:
    """Convert moment targets to elementary symmetric targets; elements and
    subset size carry over unchanged, so solution subsets are identical."""
    if any(inst.field.is_zero(e) for e in inst.elements):
        raise InputError(
            "zero element present; shift the instance before converting"
        )
    targets = power_sums_to_elementary(inst.targets, inst.field)
    return SymSSInstance(
        field=inst.field, elements=tuple(inst.elements), k=inst.k, targets=targets
    )


def _vanishing_part(inst: SymSSInstance):
    """Coefficients of x^d f(1/x) where f collects the first d-1 targets:
    1, -E_1, +E_2, .., (-1)^(d-1) E_{d-1}."""
    field = inst.field
    out = [field.one()]
    for idx in range(1, inst.d):
        e = inst.targets[idx - 1]
        out.append(field.neg(e) if idx % 2 == 1 else e)
    return out


def symss_to_bdd(inst: SymSSInstance) -> BddInstance:
    """The decoding view: points are inverted elements plus 0, the target
    vector evaluates minus the monic target polynomial, and the dimension
    is k - d + 1."""
    field = inst.field
    if inst.k < inst.d:
        raise InputError(
            f"subset size {inst.k} below degree {inst.d}: dimension would vanish"
        )
    points = [field.inv(a) for a in inst.elements]
    points.append(field.zero())
    if len(set(points)) != len(points):
        raise InternalError("inverted points collide; elements were not distinct?")
    # f(x) = x^d - E_1 x^(d-1) + .. + (-1)^(d-1) E_{d-1} x, no constant term.
    f_coeffs = [field.zero()]
    for idx in range(inst.d - 1, 0, -1):
        e = inst.targets[idx - 1]
        f_coeffs.append(field.neg(e) if idx % 2 == 1 else e)
    f_coeffs.append(field.one())
    f = Poly(tuple(f_coeffs))
    targets = [field.neg(poly_eval(f, a, field)) for a in inst.elements]
    e_d = inst.targets[-1]
    targets.append(field.neg(e_d) if inst.d % 2 == 1 else e_d)
    return BddInstance(
        field=field,
        points=tuple(points),
        targets=tuple(targets),
        K=inst.k - inst.d + 1,
        d=inst.d,
    )


def build_codeword(inst: SymSSInstance, positions: Sequence[int]) -> Poly:
    """The degree <= k-d polynomial certifying a solution subset.

    Reverses the subset's root polynomial, cancels the target part, and
    shifts down by d; the result agrees with at least k+1 of the decoding
    points and takes value (-1)^d E_d at 0.
    """
    field = inst.field
    values = [inst.elements[p] for p in positions]
    if len(positions) != inst.k or len(set(positions)) != len(positions):
        raise InputError(f"need {inst.k} distinct positions")
    subset_elementary = elementary_symmetric_sums(values, inst.d, field)
    if subset_elementary != tuple(inst.targets):
        raise InputError("subset does not solve the instance")
    # Reversed root polynomial: coefficient e is (-1)^e times the e-th
    # elementary symmetric sum of the subset.
    rev_g = [field.one()]
    for v in values:
        nxt = [field.zero()] * (len(rev_g) + 1)
        for e, c in enumerate(rev_g):
            nxt[e] = field.add(nxt[e], c)
            nxt[e + 1] = field.sub(nxt[e + 1], field.mul(c, v))
        rev_g = nxt
    rev_f = _vanishing_part(inst)
    rev_f += [field.zero()] * (len(rev_g) - len(rev_f))
    diff = [field.sub(gc, fc) for gc, fc in zip(rev_g, rev_f)]
    if any(not field.is_zero(c) for c in diff[: inst.d]):
        raise InternalError("numerator not divisible by the degree-d shift")
    return make_poly(diff[inst.d :], field)


def interpolate(points: Sequence[tuple], field) -> Poly:
    """Lagrange interpolation through (x, y) pairs with distinct x."""
    xs = [x for x, _ in points]
    if len(set(xs)) != len(xs):
        raise InputError("interpolation points must have distinct x values")
    acc = [field.zero()] * max(1, len(points))
    for i, (xi, yi) in enumerate(points):
        basis = [field.one()]
        denom = field.one()
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            nxt = [field.zero()] * (len(basis) + 1)
            for e, c in enumerate(basis):
                nxt[e + 1] = field.add(nxt[e + 1], c)
                nxt[e] = field.sub(nxt[e], field.mul(c, xj))
            basis = nxt
            denom = field.mul(denom, field.sub(xi, xj))
        scale = field.mul(yi, field.inv(denom))
        for e, c in enumerate(basis):
            acc[e] = field.add(acc[e], field.mul(scale, c))
    return make_poly(acc, field)


def count_agreements(inst: BddInstance, p: Poly) -> int:
    """Points where p matches the target vector; the decision predicate
    downstream is count >= K + d."""
    if p.degree >= inst.K:
        raise InputError(
            f"degree {p.degree} not below the dimension {inst.K}"
        )
    field = inst.field
    hits = 0
    for x, y in zip(inst.points, inst.targets):
        if poly_eval(p, x, field) == y:
            hits += 1
    return hits


def exhaustive_reconstruct(inst: BddInstance, budget=None):
    """First polynomial (by lexicographic point-subset order) of degree < K
    agreeing with at least K + d points; None when no subset works.

    Complete: a qualifying polynomial is determined by any K of its
    agreement points, so some enumerated subset reproduces it.
    """
    if budget is None:
        from .oracles import DEFAULT_BUDGET

        budget = DEFAULT_BUDGET
    total = comb(len(inst.points), inst.K)
    if total > budget.max_subsets:
        raise BudgetExceededError(
            f"{total} subsets exceed the budget {budget.max_subsets}",
            required=total,
        )
    from itertools import combinations

    need = inst.K + inst.d
    pairs = list(zip(inst.points, inst.targets))
    for combo in combinations(range(len(pairs)), inst.K):
        p = interpolate([pairs[c] for c in combo], inst.field)
        if count_agreements(inst, p) >= need:
            return p
    return None
