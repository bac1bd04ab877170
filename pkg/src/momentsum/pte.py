"""Power-sum balancing machinery: coupling matrices, the single-degree
atomic solver, chained auxiliary-value generation, classical Thue-Morse
witnesses, and a seeded finite-field sampler.

The central object is a pair of sign matrices whose rows combine a scale
vector into two value sets agreeing on all moments below a chosen degree
while hitting a prescribed residual at that degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from gmpy2 import mpq, mpz

from .errors import InputError
from .exactnum import power_sum, rat_pow
from .fields import QQ, ExtField, PrimeField, Rationals, nth_prime_above

MAX_COUPLING_DEGREE = 16


@dataclass(frozen=True)
class CouplingMatrices:
    """Sign matrices of shape 2^(i-1) x i driving the atomic solver."""

    i: int
    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=None)
def coupling_matrices(i: int) -> CouplingMatrices:
    """The recursive sign-matrix pair for degree i.

    Degree 2 is the 2x2 base pair; degree i stacks the previous A over the
    previous B with a +1 column appended, and symmetrically for B. Every
    column of either matrix sums to zero.
    """
    if i < 2:
        raise InputError(f"coupling matrices need degree >= 2, got {i}")
    if i > MAX_COUPLING_DEGREE:
        raise InputError(
            f"degree {i} exceeds the configured maximum {MAX_COUPLING_DEGREE}"
        )
    if i == 2:
        return CouplingMatrices(
            2,
            A=((1, 1), (-1, -1)),
            B=((1, -1), (-1, 1)),
        )
    prev = coupling_matrices(i - 1)
    a_rows = [row + (1,) for row in prev.A] + [row + (-1,) for row in prev.B]
    b_rows = [row + (-1,) for row in prev.A] + [row + (1,) for row in prev.B]
    return CouplingMatrices(i, A=tuple(a_rows), B=tuple(b_rows))


def atomic_solve(i: int, residual, scales: Sequence, field=QQ):
    """Split a degree-i residual across one coupled value pair.

    Given nonzero scales alpha_1..alpha_{i-1}, sets alpha_i so that
    X = A alpha / 2 and Y = B alpha / 2 satisfy sum(X^k) = sum(Y^k) for
    k < i and sum(X^i) - sum(Y^i) = residual. Returns (X, Y, alpha_i).
    """
    if i < 2:
        raise InputError(f"atomic solve needs degree >= 2, got {i}")
    if len(scales) != i - 1:
        raise InputError(f"expected {i - 1} scales for degree {i}, got {len(scales)}")
    if field.char and field.char <= i:
        raise InputError(
            f"degree {i} needs characteristic 0 or > {i}, field has {field.char}"
        )
    if isinstance(field, Rationals):
        residual = mpq(residual)
        scales = [mpq(s) for s in scales]
    else:
        if isinstance(residual, (int, mpz)):
            residual = field.from_int(residual)
        scales = [
            field.from_int(s) if isinstance(s, (int, mpz)) else s for s in scales
        ]
    if any(field.is_zero(s) for s in scales):
        raise InputError("scales must be nonzero")
    denom = field.from_int(math.factorial(i))
    for s in scales:
        denom = field.mul(denom, s)
    alpha_last = field.mul(residual, field.inv(denom))
    alpha = list(scales) + [alpha_last]
    half = field.inv(field.from_int(2))
    mats = coupling_matrices(i)

    def combine(rows):
        out = []
        for row in rows:
            acc = field.zero()
            for sign, value in zip(row, alpha):
                if sign == 1:
                    acc = field.add(acc, value)
                elif sign == -1:
                    acc = field.sub(acc, value)
            out.append(field.mul(half, acc))
        return tuple(out)

    return combine(mats.A), combine(mats.B), alpha_last


@dataclass(frozen=True)
class AlphaVector:
    """A scale vector with the exponent provenance it was built from.

    first_exp is the power-of-ten (or gamma) exponent behind alpha_1, and
    middle_exps those behind alpha_2..alpha_{i-1}; both are None when the
    caller supplied explicit or unit scales. shift is the extra exponent
    applied uniformly inside extension-field transports.
    """

    values: tuple
    first_exp: int | None = None
    middle_exps: tuple[int, ...] | None = None
    shift: int = 0

    @property
    def last(self):
        return self.values[-1]


@dataclass(frozen=True)
class StageRecord:
    """One degree of the chained construction."""

    i: int
    alpha: AlphaVector
    X: tuple
    Y: tuple
    residual: object


@dataclass(frozen=True)
class AuxConstruction:
    """All auxiliary values generated for one variable pair."""

    t: int
    n: int
    d: int
    nu_t: int | None
    a: object
    b: object
    stages: tuple[StageRecord, ...]
    regime_warning: bool

    @property
    def X(self) -> tuple:
        out = []
        for st in self.stages:
            out.extend(st.X)
        return tuple(out)

    @property
    def Y(self) -> tuple:
        out = []
        for st in self.stages:
            out.extend(st.Y)
        return tuple(out)


def _field_power_sum(field, values, k: int):
    if isinstance(field, Rationals):
        return power_sum(values, k)
    acc = field.zero()
    for v in values:
        acc = field.add(acc, field.pow(v, k))
    return acc


def _run_chain(a, b, d: int, scale_provider, field):
    """Shared chain: one atomic solve per degree 2..d, residuals accumulated."""
    stages: list[StageRecord] = []
    xs: list = []
    ys: list = []
    for i in range(2, d + 1):
        gap = field.sub(field.pow(b, i), field.pow(a, i))
        residual = field.add(
            gap,
            field.sub(_field_power_sum(field, ys, i), _field_power_sum(field, xs, i)),
        )
        scales, first_exp, middle_exps, shift = scale_provider(i)
        X_i, Y_i, alpha_last = atomic_solve(i, residual, scales, field)
        alpha = AlphaVector(
            values=tuple(scales) + (alpha_last,),
            first_exp=first_exp,
            middle_exps=middle_exps,
            shift=shift,
        )
        stages.append(StageRecord(i=i, alpha=alpha, X=X_i, Y=Y_i, residual=residual))
        xs.extend(X_i)
        ys.extend(Y_i)
    return stages


def _exponent_schedule(t: int, d: int, i: int, nu_t: int) -> tuple[int, list[int]]:
    """First exponent (i-1)! nu_t, middle exponents (t-1)d^2 + (i-1)i + r."""
    first = math.factorial(i - 1) * nu_t
    middles = [(t - 1) * d * d + (i - 1) * i + r for r in range(2, i)]
    return first, middles


def gen_aux_vars(
    a_t,
    b_t,
    params: tuple[int, int, int],
    *,
    field=QQ,
    exponent_surrogate: int | None = None,
    scale_shift: int = 0,
    unit_scales: bool = False,
) -> AuxConstruction:
    """Auxiliary value sets for one variable pair of the reduction.

    params is (n, d, t). Scales follow the exponent schedule drawn from
    nu_t, the t-th prime above n^4 (or above exponent_surrogate^4 when the
    sound magnitudes are out of reach). Setting unit_scales replaces every
    prescribed scale by 1; the moment identities are scale-independent.
    A regime flag is raised, not an error, when d^2 + d >= n: the exact
    identities hold regardless, only the magnitude-separation guarantees
    lose their backing.
    """
    n, d, t = params
    if d < 2:
        raise InputError(f"auxiliary generation needs d >= 2, got {d}")
    if not 1 <= t <= n:
        raise InputError(f"variable index {t} outside 1..{n}")
    nu_t = None
    if not unit_scales:
        base = exponent_surrogate if exponent_surrogate is not None else n
        nu_t = nth_prime_above(base**4, t)

    rational = isinstance(field, Rationals)

    def scale_provider(i: int):
        if unit_scales:
            return [field.one()] * (i - 1), None, None, 0
        first, middles = _exponent_schedule(t, d, i, nu_t)
        if rational:
            scales = [rat_pow(10, first)] + [rat_pow(10, g) for g in middles]
        else:
            scales = [field.monomial(scale_shift + first)] + [
                field.monomial(scale_shift + g) for g in middles
            ]
        return scales, first, tuple(middles), scale_shift

    if rational:
        a_val, b_val = mpq(a_t), mpq(b_t)
    else:
        a_val, b_val = a_t, b_t
    stages = _run_chain(a_val, b_val, d, scale_provider, field)
    return AuxConstruction(
        t=t,
        n=n,
        d=d,
        nu_t=nu_t,
        a=a_val,
        b=b_val,
        stages=tuple(stages),
        regime_warning=d * d + d >= n,
    )


@dataclass(frozen=True)
class PteWitness:
    """Two value sets agreeing on moments 1..degree, possibly around an
    inhomogeneous pair (a, b) folded into degrees >= 2."""

    X: tuple
    Y: tuple
    degree: int
    a: object = None
    b: object = None
    field: object = QQ


def solve_inhomogeneous_pte(
    a,
    b,
    d: int,
    *,
    n_surrogate: int | None = None,
    t: int = 1,
    unit_scales: bool | None = None,
    field=QQ,
) -> PteWitness:
    """Value sets X, Y with sum X = sum Y and a^i + sum X^i = b^i + sum Y^i
    for i = 2..d, each of size 2^d - 2.

    Without an explicit choice, d <= 3 uses the exponent schedule with the
    smallest regime-safe surrogate (least n with d^2 + d < n) and d >= 4
    uses unit scales: the schedule's top exponent grows like (d-1)! times a
    prime above n^4, which stops being representable long before d = 8.
    """
    if d < 2:
        raise InputError(f"inhomogeneous solving needs d >= 2, got {d}")
    if unit_scales is None:
        unit_scales = n_surrogate is None and d >= 4
    surrogate = n_surrogate if n_surrogate is not None else d * d + d + 1
    rational = isinstance(field, Rationals)
    if rational:
        a, b = mpq(a), mpq(b)
    nu_t = None if unit_scales else nth_prime_above(surrogate**4, t)

    def scale_provider(i: int):
        if unit_scales:
            return [field.one()] * (i - 1), None, None, 0
        first, middles = _exponent_schedule(t, d, i, nu_t)
        if rational:
            scales = [rat_pow(10, first)] + [rat_pow(10, g) for g in middles]
        else:
            scales = [field.monomial(first)] + [field.monomial(g) for g in middles]
        return scales, first, tuple(middles), 0

    stages = _run_chain(a, b, d, scale_provider, field)
    xs: list = []
    ys: list = []
    for st in stages:
        xs.extend(st.X)
        ys.extend(st.Y)
    return PteWitness(X=tuple(xs), Y=tuple(ys), degree=d, a=a, b=b, field=field)


def prouhet_pte(k: int) -> PteWitness:
    """The Thue-Morse split of {0, .., 2^(k+1) - 1}: even binary digit sums
    versus odd. Moments 1..k agree; moment k+1 does not."""
    if k < 1:
        raise InputError(f"need k >= 1, got {k}")
    xs, ys = [], []
    for v in range(2**(k + 1)):
        (xs if bin(v).count("1") % 2 == 0 else ys).append(mpz(v))
    return PteWitness(X=tuple(xs), Y=tuple(ys), degree=k)


@dataclass(frozen=True)
class PteReport:
    """Outcome of checking a witness degree by degree."""

    degree_ok: tuple[tuple[int, bool], ...]
    distinct_ok: bool

    @property
    def ok(self) -> bool:
        return all(flag for _, flag in self.degree_ok)


def verify_pte(w: PteWitness) -> PteReport:
    """Check each moment 1..degree exactly; degree 1 compares the bare value
    sums, higher degrees fold in (a, b) when the witness carries them."""
    field = w.field
    results = []
    for i in range(1, w.degree + 1):
        lhs = _field_power_sum(field, w.X, i)
        rhs = _field_power_sum(field, w.Y, i)
        if i >= 2 and w.a is not None and w.b is not None:
            lhs = field.add(lhs, field.pow(w.a, i))
            rhs = field.add(rhs, field.pow(w.b, i))
        results.append((i, lhs == rhs))
    values = list(w.X) + list(w.Y)
    distinct = len(set(values)) == len(values)
    return PteReport(degree_ok=tuple(results), distinct_ok=distinct)


@dataclass(frozen=True)
class SampleResult:
    """Outcome of the randomized finite-field search."""

    witness: PteWitness | None
    trials: int
    hits: int | None
    seed: int
    s: int

    @property
    def found(self) -> bool:
        return self.witness is not None


_SAMPLE_CHUNK = 4096


def sample_pte_over_fq(
    field,
    residuals: Sequence,
    s: int,
    max_trials: int,
    seed: int = 0,
    *,
    mirror: bool = False,
    count_all: bool = False,
) -> SampleResult:
    """Uniformly sample value tuples until one matches all residuals.

    Each trial draws x_1..x_s and y_1..y_s (y mirrors x under the mirror
    flag) and accepts when sum x^j - sum y^j equals residual j for every
    j = 1..d. The trial stream is a seeded PCG64 generator consumed in a
    fixed chunk size, so results are reproducible. With count_all the scan
    continues past the first hit to count them all; the returned witness is
    always the first.
    """
    if field.order is None:
        raise InputError("sampling needs a finite field")
    d = len(residuals)
    if d < 1:
        raise InputError("need at least one residual")
    if d > field.order:
        raise InputError(f"degree {d} exceeds the field size {field.order}")
    if s < d:
        raise InputError(f"tuple size {s} below degree {d}")
    if max_trials < 0:
        raise InputError("max_trials must be nonnegative")
    residuals = [
        field.from_int(r) if isinstance(r, int) else r for r in residuals
    ]
    rng = np.random.Generator(np.random.PCG64(seed))
    fast = isinstance(field, PrimeField) and field.p < 2**31
    if fast:
        return _sample_prime_fast(
            field, residuals, s, max_trials, seed, rng, mirror, count_all
        )
    return _sample_generic(
        field, residuals, s, max_trials, seed, rng, mirror, count_all
    )


def _sample_prime_fast(field, residuals, s, max_trials, seed, rng, mirror, count_all):
    p = field.p
    d = len(residuals)
    targets = np.asarray([int(r) % p for r in residuals], dtype=np.int64)
    done = 0
    hits = 0
    first: PteWitness | None = None
    first_trial = -1
    while done < max_trials:
        batch = min(_SAMPLE_CHUNK, max_trials - done)
        width = s if mirror else 2 * s
        draws = rng.integers(0, p, size=(batch, width), dtype=np.int64)
        xs = draws[:, :s]
        ys = xs if mirror else draws[:, s:]
        ok = np.ones(batch, dtype=bool)
        px, py = xs, ys
        for j in range(1, d + 1):
            if j > 1:
                px = px * xs % p
                py = py * ys % p
            diff = (px.sum(axis=1) - py.sum(axis=1)) % p
            ok &= diff == targets[j - 1]
        idx = np.nonzero(ok)[0]
        if idx.size:
            hits += int(idx.size)
            if first is None:
                row = int(idx[0])
                first = PteWitness(
                    X=tuple(int(v) for v in xs[row]),
                    Y=tuple(int(v) for v in ys[row]),
                    degree=d,
                    field=field,
                )
                first_trial = done + row + 1
            if not count_all:
                return SampleResult(
                    witness=first, trials=first_trial, hits=hits, seed=seed, s=s
                )
        done += batch
    trials = first_trial if (first is not None and not count_all) else done
    return SampleResult(witness=first, trials=trials, hits=hits, seed=seed, s=s)


def _sample_generic(field, residuals, s, max_trials, seed, rng, mirror, count_all):
    p = field.char
    ell = field.ell if isinstance(field, ExtField) else 1
    if p >= 2**62:
        raise InputError("sampling over characteristic >= 2^62 is unsupported")
    d = len(residuals)
    hits = 0
    first: PteWitness | None = None
    first_trial = -1
    for trial in range(1, max_trials + 1):
        width = s if mirror else 2 * s
        draws = rng.integers(0, p, size=(width, ell), dtype=np.int64)

        def element(row):
            if isinstance(field, ExtField):
                return field.from_coeffs([int(c) for c in row])
            return int(row[0])

        xs = [element(draws[i]) for i in range(s)]
        ys = xs if mirror else [element(draws[s + i]) for i in range(s)]
        good = True
        for j in range(1, d + 1):
            lhs = _field_power_sum(field, xs, j)
            rhs = _field_power_sum(field, ys, j)
            if field.sub(lhs, rhs) != residuals[j - 1]:
                good = False
                break
        if good:
            hits += 1
            if first is None:
                first = PteWitness(
                    X=tuple(xs), Y=tuple(ys), degree=d, field=field
                )
                first_trial = trial
            if not count_all:
                return SampleResult(
                    witness=first, trials=first_trial, hits=hits, seed=seed, s=s
                )
    trials = first_trial if (first is not None and not count_all) else max_trials
    return SampleResult(witness=first, trials=trials, hits=hits, seed=seed, s=s)
