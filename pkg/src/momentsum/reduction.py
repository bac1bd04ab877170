"""From exactly-one SAT to moment subset sum instances, and onward to
finite fields.

The instance elements are the classical digit-gadget pairs scaled by 10^nu
plus, for each variable, the auxiliary value sets that pin down moments 2..d.
Element order is fixed per variable: the pair, then all X rows stage by
stage, then all Y rows, so encoded subsets and origin bookkeeping line up
across rationals, prime fields, and extension fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq, mpz

from .errors import (
    ConstructionError,
    InputError,
    SoundnessViolationError,
)
from .exactnum import (
    abs_sum,
    as_ratio,
    common_denominator_ints,
    digits10,
    is_integer,
    pow10,
    power_sum,
    rat_pow,
)
from .fields import (
    QQ,
    ExtField,
    PrimeField,
    Rationals,
    find_prime_above,
    is_probable_prime,
    make_ext_field,
    nth_prime_above,
)
from .pte import (
    AuxConstruction,
    coupling_matrices,
    gen_aux_vars,
    verify_pte,
    PteWitness,
)
from .satss import SatInstance, eval_exactly_one, gadget_digits, sat_to_subset_sum

import math


@dataclass(frozen=True)
class MssInstance:
    """Distinct elements, a subset size, and one target per moment degree."""

    field: object
    elements: tuple
    k: int
    targets: tuple

    def __post_init__(self):
        if len(self.targets) < 1:
            raise InputError("need at least one moment target")
        if not 0 <= self.k <= len(self.elements):
            raise InputError(
                f"subset size {self.k} outside 0..{len(self.elements)}"
            )
        if len(set(self.elements)) != len(self.elements):
            raise ConstructionError("instance elements are not distinct")

    @property
    def d(self) -> int:
        return len(self.targets)

    @property
    def size(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Origin:
    """Where an instance element came from: the pair or a gadget row."""

    kind: str  # "a", "b", "x", or "y"
    t: int
    i: int | None = None
    j: int | None = None


@dataclass(frozen=True)
class ReductionArtifacts:
    """Everything needed to re-derive, transport, or audit an instance."""

    sat: SatInstance
    d: int
    nu: int
    M: int
    a: tuple
    b: tuple
    aux: tuple[AuxConstruction, ...]
    origins: tuple[Origin, ...]
    instance: MssInstance


def _assemble(a_vals, b_vals, aux_list, d: int):
    """Fixed element order: per variable a, b, X rows, then Y rows."""
    elements = []
    origins = []
    n = len(a_vals)
    for t in range(1, n + 1):
        elements.append(a_vals[t - 1])
        origins.append(Origin("a", t))
        elements.append(b_vals[t - 1])
        origins.append(Origin("b", t))
        if d >= 2:
            aux = aux_list[t - 1]
            for st in aux.stages:
                for j, x in enumerate(st.X, start=1):
                    elements.append(x)
                    origins.append(Origin("x", t, st.i, j))
            for st in aux.stages:
                for j, y in enumerate(st.Y, start=1):
                    elements.append(y)
                    origins.append(Origin("y", t, st.i, j))
    return elements, origins


def sat_to_mss(sat: SatInstance, d: int) -> tuple[MssInstance, ReductionArtifacts]:
    """Build the moment subset sum instance of degree d for a formula.

    d = 1 is the plain digit gadget scaled by 10^nu with no auxiliaries;
    d >= 2 adds the chained auxiliary sets per variable. The first target is
    the scaled all-ones number; higher targets are the power sums of the
    a-side elements plus all X values.
    """
    if d < 1:
        raise InputError(f"degree must be >= 1, got {d}")
    ss = sat_to_subset_sum(sat)
    n, m = sat.n, sat.m
    nu = n * n
    M = m + nu + n + 1
    shift = pow10(nu)
    a_vals = [shift * v for v in ss.a]
    b_vals = [shift * v for v in ss.b]
    aux_list: list[AuxConstruction] = []
    if d >= 2:
        for t in range(1, n + 1):
            aux_list.append(gen_aux_vars(a_vals[t - 1], b_vals[t - 1], (n, d, t)))
    elements, origins = _assemble(a_vals, b_vals, aux_list, d)
    expected = n * (2 ** (d + 1) - 2)
    if len(elements) != expected:
        raise ConstructionError(
            f"element count {len(elements)} != n(2^(d+1)-2) = {expected}"
        )
    if len(set(elements)) != len(elements):
        raise ConstructionError("auxiliary values collide; construction broken")
    targets = [mpq(shift * ss.target)]
    all_x = [x for aux in aux_list for x in aux.X]
    for j in range(2, d + 1):
        tj = power_sum(a_vals, j) + power_sum(all_x, j)
        targets.append(tj)
    inst = MssInstance(
        field=QQ,
        elements=tuple(mpq(e) for e in elements),
        k=expected // 2,
        targets=tuple(targets),
    )
    art = ReductionArtifacts(
        sat=sat,
        d=d,
        nu=nu,
        M=M,
        a=tuple(a_vals),
        b=tuple(b_vals),
        aux=tuple(aux_list),
        origins=tuple(origins),
        instance=inst,
    )
    return inst, art


def subset_moment_sums(inst: MssInstance, positions: Sequence[int]) -> tuple:
    """The d moment sums of the chosen element positions."""
    seen = set()
    for pos in positions:
        if not 0 <= pos < inst.size:
            raise InputError(f"element index {pos} outside 0..{inst.size - 1}")
        if pos in seen:
            raise InputError(f"element index {pos} repeated")
        seen.add(pos)
    values = [inst.elements[pos] for pos in positions]
    field = inst.field
    sums = []
    for j in range(1, inst.d + 1):
        if isinstance(field, Rationals):
            sums.append(power_sum(values, j))
        else:
            acc = field.zero()
            for v in values:
                acc = field.add(acc, field.pow(v, j))
            sums.append(acc)
    return tuple(sums)


def subset_meets_targets(inst: MssInstance, positions: Sequence[int]) -> bool:
    """True when positions form a size-k subset hitting every target."""
    if len(positions) != inst.k:
        return False
    return subset_moment_sums(inst, positions) == tuple(inst.targets)


def encode_assignment(art: ReductionArtifacts, z: Sequence[int]) -> tuple[int, ...]:
    """Element positions selected by an exactly-one assignment.

    Variable t contributes its a element and X rows when z_t = 1, else its
    b element and Y rows.
    """
    if not eval_exactly_one(art.sat, z):
        raise InputError("assignment does not satisfy exactly-one semantics")
    chosen = []
    for pos, origin in enumerate(art.origins):
        on = z[origin.t - 1]
        if origin.kind in ("a", "x"):
            if on:
                chosen.append(pos)
        else:
            if not on:
                chosen.append(pos)
    if len(chosen) != art.instance.k:
        raise ConstructionError(
            f"encoded subset size {len(chosen)} != k = {art.instance.k}"
        )
    return tuple(chosen)


def extract_assignment(art: ReductionArtifacts, positions: Sequence[int], inst=None):
    """Assignment read off a target-meeting subset, or None.

    Returns None when the subset misses any target. When the targets are met
    but the induced assignment is not exactly-one satisfying, raises a
    soundness violation: that cannot happen in the proven parameter regime.

    Pass a transported instance as `inst` to check the subset against its
    field; element order (and hence position meaning) is unchanged by
    transport.
    """
    if inst is None:
        inst = art.instance
    if len(inst.elements) != len(art.origins):
        raise InputError("instance does not match the construction artifacts")
    if not subset_meets_targets(inst, positions):
        return None
    chosen = set(positions)
    a_index = {
        origin.t: pos
        for pos, origin in enumerate(art.origins)
        if origin.kind == "a"
    }
    z = tuple(1 if a_index[t] in chosen else 0 for t in range(1, art.sat.n + 1))
    if not eval_exactly_one(art.sat, z):
        raise SoundnessViolationError(
            f"subset meets all targets but induces invalid assignment {z}"
        )
    return z


@dataclass(frozen=True)
class AuxValueRecord:
    """One auxiliary value split into its dominant power-of-ten part and
    the remainder."""

    value: object
    large_exp: int
    small: object


def collect_aux_records(art: ReductionArtifacts) -> tuple[AuxValueRecord, ...]:
    """Per auxiliary value: the exponent of its half-power-of-ten part and
    the exact small remainder."""
    records = []
    half = mpq(1, 2)
    for aux in art.aux:
        for st in aux.stages:
            f_exp = st.alpha.first_exp
            mats = coupling_matrices(st.i)
            big = half * pow10(f_exp)
            for rows, values in ((mats.A, st.X), (mats.B, st.Y)):
                for row, v in zip(rows, values):
                    large = big if row[0] == 1 else -big
                    records.append(
                        AuxValueRecord(value=v, large_exp=f_exp, small=v - large)
                    )
    return tuple(records)


@dataclass(frozen=True)
class P3Report:
    """Bimodality: deterministic two-sided gap plus randomized probes."""

    applicable: bool
    regime_ok: bool
    small_sum_ok: bool
    exponents_ok: bool
    gap_ok: bool
    probe_trials: int
    probe_violations: int

    @property
    def deterministic_ok(self) -> bool:
        return self.small_sum_ok and self.exponents_ok and self.gap_ok

    @property
    def ok(self) -> bool:
        if not self.applicable:
            return True
        return self.deterministic_ok and self.probe_violations == 0


@dataclass(frozen=True)
class P4Report:
    """Digit-length accounting against the declared polynomial bounds."""

    base_digit_bound: int
    base_max_digits: int
    base_ok: bool
    aux_den_bound: int
    aux_max_den_digits: int
    aux_ok: bool

    @property
    def ok(self) -> bool:
        return self.base_ok and self.aux_ok


@dataclass(frozen=True)
class PropertiesReport:
    p1_ok: bool
    p2_ok: bool
    p3: P3Report
    p4: P4Report

    @property
    def ok(self) -> bool:
        return self.p1_ok and self.p2_ok and self.p3.ok and self.p4.ok


def _probe_thresholds(art: ReductionArtifacts) -> tuple[int, int]:
    n, m = art.sat.n, art.sat.m
    return art.nu, m + 2 * n + art.nu


def verify_properties(
    art: ReductionArtifacts,
    probe_trials: int = 10_000,
    probe_seed: int = 0,
) -> PropertiesReport:
    """Check the four structural properties of the constructed gadgets.

    P1: every variable's X and Y sets sum to zero. P2: the inhomogeneous
    moment identities per variable. P3: subset sums of auxiliary values are
    bimodal; the deterministic decomposition (small parts summed over
    everything stay below 10^nu, every large part is half a power of ten
    with exponent at least n^4, and the implied gap clears the upper
    threshold) is authoritative, with seeded random probes on top. P4: digit
    lengths stay within the declared polynomial bounds.
    """
    n, m, d = art.sat.n, art.sat.m, art.d
    p1_ok = True
    p2_ok = True
    for aux in art.aux:
        xs, ys = aux.X, aux.Y
        if power_sum(xs, 1) != 0 or power_sum(ys, 1) != 0:
            p1_ok = False
        w = PteWitness(X=xs, Y=ys, degree=d, a=aux.a, b=aux.b)
        if not verify_pte(w).ok:
            p2_ok = False

    lo_exp, hi_exp = _probe_thresholds(art)
    if art.aux:
        records = collect_aux_records(art)
        small_total = abs_sum([r.small for r in records])
        small_sum_ok = small_total < pow10(lo_exp)
        n4 = n**4
        exponents_ok = all(r.large_exp >= n4 for r in records)
        gap_ok = mpq(pow10(n4), 2) - small_total > pow10(hi_exp)
        from .oracles import SearchBudget, bimodality_probe

        probe = bimodality_probe(
            [r.value for r in records],
            lo_exp,
            hi_exp,
            SearchBudget(max_trials=probe_trials, seed=probe_seed),
        )
        p3 = P3Report(
            applicable=True,
            regime_ok=d * d + d < n,
            small_sum_ok=small_sum_ok,
            exponents_ok=exponents_ok,
            gap_ok=gap_ok,
            probe_trials=probe.trials,
            probe_violations=len(probe.violations),
        )
    else:
        p3 = P3Report(
            applicable=False,
            regime_ok=d * d + d < n,
            small_sum_ok=True,
            exponents_ok=True,
            gap_ok=True,
            probe_trials=0,
            probe_violations=0,
        )

    base_bound = art.M
    base_values = list(art.a) + list(art.b) + [as_ratio(art.instance.targets[0])[0]]
    base_max = max(digits10(v) for v in base_values)
    base_ok = base_max <= base_bound
    aux_ok = True
    aux_max_den = 0
    aux_den_bound = 0
    for aux in art.aux:
        for st in aux.stages:
            den_bound = math.factorial(st.i) ** 2 * n**6
            num_bound = (st.alpha.first_exp or 0) + 1 + den_bound
            aux_den_bound = max(aux_den_bound, den_bound)
            for v in list(st.X) + list(st.Y):
                num, den = as_ratio(v)
                dd = digits10(den)
                aux_max_den = max(aux_max_den, dd)
                if dd > den_bound or digits10(num) > num_bound:
                    aux_ok = False
    p4 = P4Report(
        base_digit_bound=base_bound,
        base_max_digits=base_max,
        base_ok=base_ok,
        aux_den_bound=aux_den_bound,
        aux_max_den_digits=aux_max_den,
        aux_ok=aux_ok,
    )
    return PropertiesReport(p1_ok=p1_ok, p2_ok=p2_ok, p3=p3, p4=p4)


def scale_instance(inst: MssInstance, lam) -> MssInstance:
    """Multiply every element by lam and target j by lam^j; solutions map
    one-to-one through the same positions."""
    field = inst.field
    if isinstance(field, Rationals):
        lam = mpq(lam)
    if field.is_zero(lam):
        raise InputError("scale factor must be nonzero")
    elements = tuple(field.mul(lam, e) for e in inst.elements)
    targets = tuple(
        field.mul(field.pow(lam, j), t) for j, t in enumerate(inst.targets, start=1)
    )
    return MssInstance(field=field, elements=elements, k=inst.k, targets=targets)


@dataclass(frozen=True)
class PrimeTransportRecord:
    """How a rational instance landed in F_p."""

    p: int
    denominator_scale: object
    sound_bound: object
    is_sound: bool


def _check_art_matches(inst: MssInstance, art: ReductionArtifacts | None):
    if art is not None and art.instance.elements != inst.elements:
        raise InputError("artifacts do not describe this instance")


def transport_to_prime_field(
    inst: MssInstance,
    art: ReductionArtifacts | None = None,
    *,
    prime: int | None = None,
    fast_bits: int | None = None,
) -> tuple[MssInstance, PrimeTransportRecord]:
    """Reduce a rational instance modulo a prime, preserving solutions.

    Denominators are cleared first by the global least common denominator
    (a valid rescaling). By default the prime is the least one above
    2(N+1) max|a|^d, which makes every moment identity and non-identity
    transport faithfully. An explicit prime skips the bound (completeness
    still transports; soundness may not); fast_bits picks the first prime
    above 2^fast_bits whose residues stay distinct.
    """
    if not isinstance(inst.field, Rationals):
        raise InputError("prime transport starts from a rational instance")
    _check_art_matches(inst, art)
    d = inst.d
    ints, den_scale = common_denominator_ints(inst.elements)
    n_el = len(ints)
    max_abs = max(abs(v) for v in ints) if ints else mpz(1)
    bound = 2 * (n_el + 1) * max_abs**d
    if prime is not None:
        p = int(prime)
        if not is_probable_prime(p):
            raise InputError(f"{p} is not prime")
        if p <= d:
            raise InputError(f"prime {p} must exceed the degree {d}")
        images = tuple(int(v % p) for v in ints)
        if len(set(images)) != len(images):
            raise ConstructionError(
                f"residues collide under the supplied prime {p}"
            )
    elif fast_bits is not None:
        p = find_prime_above(max(2**fast_bits, d))
        while True:
            images = tuple(int(v % p) for v in ints)
            if len(set(images)) == len(images):
                break
            p = find_prime_above(p)
    else:
        p = find_prime_above(max(bound, d))
        images = tuple(int(v % p) for v in ints)
    field = PrimeField(p)
    targets = []
    for j, t in enumerate(inst.targets, start=1):
        scaled = t * rat_pow(den_scale, j)
        if not is_integer(scaled):
            raise ConstructionError("cleared target is not integral")
        targets.append(field.from_int(as_ratio(scaled)[0]))
    inst_p = MssInstance(
        field=field, elements=images, k=inst.k, targets=tuple(targets)
    )
    record = PrimeTransportRecord(
        p=p,
        denominator_scale=den_scale,
        sound_bound=bound,
        is_sound=p > bound,
    )
    return inst_p, record


@dataclass(frozen=True)
class ExtTransportRecord:
    """How a reduction was rebuilt inside F_{p^ell}."""

    p: int
    ell: int
    ell_min: int
    h: int
    exponent_base: int
    nu_exponents: tuple[int, ...]
    modulus: tuple[int, ...]


def ext_schedule(
    art: ReductionArtifacts, exponent_surrogate: int | None = None
) -> tuple[int, int, tuple[int, ...]]:
    """(h, ell_min, per-variable first exponents) for an extension-field
    rebuild of this reduction.

    h is the uniform shift making every last-scale division a pure
    coefficient shift; ell_min leaves room for d-th powers of the largest
    magnitude index on top of it.
    """
    sat, d, nu = art.sat, art.d, art.nu
    n, m = sat.n, sat.m
    base = exponent_surrogate if exponent_surrogate is not None else n
    nu_list = tuple(nth_prime_above(base**4, t) for t in range(1, n + 1))
    base_top = nu + m + n - 1
    if d == 1:
        return 0, base_top + 1, nu_list
    h = 0
    max_f = 0
    for t in range(1, n + 1):
        for i in range(2, d + 1):
            f = math.factorial(i - 1) * nu_list[t - 1]
            gs = [(t - 1) * d * d + (i - 1) * i + r for r in range(2, i)]
            h = max(h, f + sum(gs))
            max_f = max(max_f, f)
    max_idx = h + max(max_f, base_top)
    ell_min = h + d * max_idx + 1
    return h, ell_min, nu_list


def embed_digits(field: ExtField, digits: Sequence[int], offset: int):
    """Decimal digits placed on the gamma-power basis starting at offset."""
    if offset + len(digits) > field.ell:
        raise InputError(
            f"digit block [{offset}, {offset + len(digits)}) exceeds degree {field.ell}"
        )
    coeffs = [0] * field.ell
    for pos, digit in enumerate(digits):
        coeffs[offset + pos] = digit
    return field.from_coeffs(coeffs)


def transport_to_ext_field(
    inst: MssInstance,
    art: ReductionArtifacts,
    p: int,
    ell: int,
    *,
    exponent_surrogate: int | None = None,
) -> tuple[MssInstance, ExtTransportRecord]:
    """Rebuild the reduction natively inside F_{p^ell}.

    Digit-gadget numbers become coefficient vectors (the radix ten turns
    into the adjoined root gamma), the auxiliary chain is re-run in the
    field with gamma-power scales shifted by h, and the targets are
    recomputed there. The characteristic must exceed the degree so the
    factorial divisions exist; ell must reach the computed minimum.
    """
    if not isinstance(inst.field, Rationals):
        raise InputError("extension transport starts from a rational instance")
    if art is None:
        raise InputError("extension transport needs the reduction artifacts")
    _check_art_matches(inst, art)
    d = art.d
    p = int(p)
    if not is_probable_prime(p):
        raise InputError(f"{p} is not prime")
    if p <= d:
        raise InputError(
            f"characteristic {p} must exceed the degree {d} for factorial inverses"
        )
    h, ell_min, nu_list = ext_schedule(art, exponent_surrogate)
    if ell < ell_min:
        raise InputError(
            f"degree {ell} too small for this reduction: need ell >= {ell_min}"
        )
    field = make_ext_field(p, ell)
    sat = art.sat
    n, m, nu = sat.n, sat.m, art.nu
    a_vals, b_vals, aux_list = [], [], []
    for t in range(1, n + 1):
        a_digits, b_digits = gadget_digits(sat, t)
        a_h = embed_digits(field, a_digits, h + nu)
        b_h = embed_digits(field, b_digits, h + nu)
        a_vals.append(a_h)
        b_vals.append(b_h)
        if d >= 2:
            aux_list.append(
                gen_aux_vars(
                    a_h,
                    b_h,
                    (n, d, t),
                    field=field,
                    exponent_surrogate=exponent_surrogate,
                    scale_shift=h,
                )
            )
    elements, origins = _assemble(a_vals, b_vals, aux_list, d)
    if origins != list(art.origins):
        raise ConstructionError("element order diverged from the rational build")
    if len(set(elements)) != len(elements):
        raise ConstructionError("embedded elements collide")
    targets = [embed_digits(field, [1] * (m + n), h + nu)]
    all_x = [x for aux in aux_list for x in aux.X]
    for j in range(2, d + 1):
        acc = field.zero()
        for v in a_vals + all_x:
            acc = field.add(acc, field.pow(v, j))
        targets.append(acc)
    inst_q = MssInstance(
        field=field, elements=tuple(elements), k=inst.k, targets=tuple(targets)
    )
    record = ExtTransportRecord(
        p=p,
        ell=ell,
        ell_min=ell_min,
        h=h,
        exponent_base=exponent_surrogate if exponent_surrogate is not None else n,
        nu_exponents=nu_list,
        modulus=field.modulus,
    )
    return inst_q, record
