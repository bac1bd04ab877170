"""Tests for the coupled-pair moment construction and its verifiers."""

import math
import random

import pytest
from gmpy2 import mpq, mpz

from momentsum.errors import InputError
from momentsum.exactnum import power_sum, rat
from momentsum.fields import (
    QQ,
    PrimeField,
    find_prime_above,
    make_ext_field,
    nth_prime_above,
)
from momentsum.pte import (
    MAX_COUPLING_DEGREE,
    PteWitness,
    atomic_solve,
    coupling_matrices,
    gen_aux_vars,
    prouhet_pte,
    sample_pte_over_fq,
    solve_inhomogeneous_pte,
    verify_pte,
)


def _field_power_sum(field, values, k):
    acc = field.zero()
    for v in values:
        acc = field.add(acc, field.pow(v, k))
    return acc


# --------------------------------------------------------------------------
# coupling matrices


def test_coupling_base_pair_frozen():
    m = coupling_matrices(2)
    assert m.A == ((1, 1), (-1, -1))
    assert m.B == ((1, -1), (-1, 1))


def test_coupling_recursion_frozen_degree_three():
    m = coupling_matrices(3)
    assert m.A == ((1, 1, 1), (-1, -1, 1), (1, -1, -1), (-1, 1, -1))
    assert m.B == ((1, 1, -1), (-1, -1, -1), (1, -1, 1), (-1, 1, 1))


@pytest.mark.parametrize("i", range(2, 8))
def test_coupling_structure(i):
    m = coupling_matrices(i)
    for mat in (m.A, m.B):
        assert len(mat) == 2 ** (i - 1)
        for row in mat:
            assert len(row) == i
            assert all(s in (-1, 1) for s in row)
        for col in range(i):
            assert sum(row[col] for row in mat) == 0
    if i > 2:
        prev = coupling_matrices(i - 1)
        assert m.A == tuple(
            [r + (1,) for r in prev.A] + [r + (-1,) for r in prev.B]
        )
        assert m.B == tuple(
            [r + (-1,) for r in prev.A] + [r + (1,) for r in prev.B]
        )


def test_coupling_rejects_bad_degree():
    with pytest.raises(InputError):
        coupling_matrices(1)
    with pytest.raises(InputError):
        coupling_matrices(MAX_COUPLING_DEGREE + 1)


# --------------------------------------------------------------------------
# atomic solve


def _random_rationals(rng, count, *, nonzero=False):
    out = []
    while len(out) < count:
        v = rat(rng.randint(-50, 50), rng.randint(1, 9))
        if nonzero and v == 0:
            continue
        out.append(v)
    return out


@pytest.mark.parametrize("i", range(2, 7))
def test_atomic_solve_rational_identities(i):
    rng = random.Random(100 + i)
    for _ in range(10):
        scales = _random_rationals(rng, i - 1, nonzero=True)
        residual = _random_rationals(rng, 1)[0]
        X, Y, alpha_last = atomic_solve(i, residual, scales)
        assert len(X) == len(Y) == 2 ** (i - 1)
        for k in range(1, i):
            assert power_sum(X, k) == power_sum(Y, k)
        assert power_sum(X, i) - power_sum(Y, i) == residual
        denom = mpq(math.factorial(i))
        for s in scales:
            denom *= s
        assert alpha_last == residual / denom


@pytest.mark.parametrize("i", [2, 3, 4])
def test_atomic_solve_returns_final_scale_when_residual_matches(i):
    # feeding back residual = i! * prod(alpha) must reproduce alpha_i
    alpha = [rat(j + 2, 3) for j in range(i)]
    residual = mpq(math.factorial(i))
    for a in alpha:
        residual *= a
    _, _, alpha_last = atomic_solve(i, residual, alpha[:-1])
    assert alpha_last == alpha[-1]


def test_atomic_solve_degree_two_closed_form():
    a1, a2 = mpq(6), mpq(10)
    X, Y, alpha_last = atomic_solve(2, mpq(2) * a1 * a2, [a1])
    assert alpha_last == a2
    half_sum = (a1 + a2) / 2
    half_diff = (a1 - a2) / 2
    assert X == (half_sum, -half_sum)
    assert Y == (half_diff, -half_diff)


@pytest.mark.parametrize(
    "field", [PrimeField(101), make_ext_field(5, 2)], ids=["F101", "F25"]
)
@pytest.mark.parametrize("i", [2, 3, 4])
def test_atomic_solve_finite_field_identities(field, i):
    rng = random.Random(7 * i)
    for _ in range(5):
        scales = [
            field.from_int(rng.randrange(1, field.char)) for _ in range(i - 1)
        ]
        residual = field.from_int(rng.randrange(field.char))
        X, Y, _ = atomic_solve(i, residual, scales, field=field)
        for k in range(1, i):
            assert _field_power_sum(field, X, k) == _field_power_sum(field, Y, k)
        diff = field.sub(
            _field_power_sum(field, X, i), _field_power_sum(field, Y, i)
        )
        assert diff == residual


def test_atomic_solve_characteristic_guard():
    with pytest.raises(InputError):
        atomic_solve(2, 1, [1], field=PrimeField(2))
    with pytest.raises(InputError):
        atomic_solve(3, 1, [1, 1], field=PrimeField(3))
    # char 5 > 4 is fine
    atomic_solve(4, 1, [1, 1, 1], field=PrimeField(5))


def test_atomic_solve_rejects_bad_scales():
    with pytest.raises(InputError):
        atomic_solve(3, 1, [1, 0])
    with pytest.raises(InputError):
        atomic_solve(3, 1, [1])
    with pytest.raises(InputError):
        atomic_solve(1, 1, [])


# --------------------------------------------------------------------------
# auxiliary generation for one variable pair


def test_gen_aux_sizes_and_identities():
    aux = gen_aux_vars(mpq(3), mpq(5), (13, 3, 2))
    assert len(aux.stages) == 2
    assert [len(st.X) for st in aux.stages] == [2, 4]
    assert len(aux.X) == len(aux.Y) == 2**3 - 2
    assert power_sum(aux.X, 1) == power_sum(aux.Y, 1)
    for i in range(2, 4):
        lhs = aux.a**i + power_sum(aux.X, i)
        rhs = aux.b**i + power_sum(aux.Y, i)
        assert lhs == rhs
    assert aux.nu_t == nth_prime_above(13**4, 2)
    assert aux.regime_warning is False  # 3^2 + 3 < 13


def test_gen_aux_regime_flag():
    assert gen_aux_vars(1, 2, (5, 2, 1), unit_scales=True).regime_warning is True
    assert gen_aux_vars(1, 2, (7, 2, 1), unit_scales=True).regime_warning is False


def test_gen_aux_exponent_schedule_with_surrogate():
    aux = gen_aux_vars(mpq(1), mpq(4), (5, 3, 2), exponent_surrogate=2)
    nu = nth_prime_above(2**4, 2)
    assert aux.nu_t == nu
    for st in aux.stages:
        i = st.i
        assert st.alpha.first_exp == math.factorial(i - 1) * nu
        assert st.alpha.middle_exps == tuple(
            (2 - 1) * 9 + (i - 1) * i + r for r in range(2, i)
        )
        assert st.alpha.values[0] == mpq(10) ** st.alpha.first_exp
        for g, v in zip(st.alpha.middle_exps, st.alpha.values[1:-1]):
            assert v == mpq(10) ** g


def test_gen_aux_unit_scales():
    aux = gen_aux_vars(mpq(2), mpq(7), (4, 3, 1), unit_scales=True)
    assert aux.nu_t is None
    for st in aux.stages:
        assert st.alpha.first_exp is None
        assert all(v == 1 for v in st.alpha.values[:-1])
    for i in range(2, 4):
        assert mpq(2) ** i + power_sum(aux.X, i) == mpq(7) ** i + power_sum(
            aux.Y, i
        )


def test_gen_aux_rejects_bad_params():
    with pytest.raises(InputError):
        gen_aux_vars(1, 2, (5, 1, 1))
    with pytest.raises(InputError):
        gen_aux_vars(1, 2, (5, 2, 0))
    with pytest.raises(InputError):
        gen_aux_vars(1, 2, (5, 2, 6))


# --------------------------------------------------------------------------
# classical equal-moment partitions


def test_prouhet_frozen_k2():
    w = prouhet_pte(2)
    assert w.X == (0, 3, 5, 6)
    assert w.Y == (1, 2, 4, 7)


@pytest.mark.parametrize("k", range(1, 7))
def test_prouhet_partition_properties(k):
    w = prouhet_pte(k)
    assert len(w.X) == len(w.Y) == 2**k
    assert sorted(w.X + w.Y) == list(range(2 ** (k + 1)))
    for j in range(1, k + 1):
        assert power_sum(w.X, j) == power_sum(w.Y, j)
    assert power_sum(w.X, k + 1) != power_sum(w.Y, k + 1)


def test_prouhet_rejects_k0():
    with pytest.raises(InputError):
        prouhet_pte(0)


# --------------------------------------------------------------------------
# witness verification


def test_verify_pte_accepts_valid_witness():
    rep = verify_pte(prouhet_pte(3))
    assert rep.ok
    assert rep.distinct_ok
    assert rep.degree_ok == ((1, True), (2, True), (3, True))


def test_verify_pte_flags_broken_moment():
    rep = verify_pte(PteWitness(X=(mpz(1), mpz(2)), Y=(mpz(1), mpz(4)), degree=2))
    assert not rep.ok
    assert rep.degree_ok[0] == (1, False)


def test_verify_pte_flags_repeated_values():
    w = PteWitness(X=(mpz(1), mpz(-1)), Y=(mpz(1), mpz(-1)), degree=1)
    rep = verify_pte(w)
    assert rep.degree_ok == ((1, True),)
    assert not rep.distinct_ok


def test_verify_pte_folds_endpoint_pair():
    w = solve_inhomogeneous_pte(3, 5, 3)
    rep = verify_pte(w)
    assert rep.ok and rep.distinct_ok
    # moment 1 must balance without the endpoints...
    assert power_sum(w.X, 1) == power_sum(w.Y, 1)
    # ...and would not balance with them folded in
    assert mpq(3) + power_sum(w.X, 1) != mpq(5) + power_sum(w.Y, 1)


# --------------------------------------------------------------------------
# inhomogeneous solving


@pytest.mark.parametrize("d", range(2, 9))
def test_solve_inhomogeneous_all_degrees(d):
    w = solve_inhomogeneous_pte(3, 5, d)
    assert w.degree == d
    assert len(w.X) == len(w.Y) == 2**d - 2
    assert verify_pte(w).ok


def test_solve_inhomogeneous_default_scale_policy():
    # degree 3 keeps the graded power-of-ten scales: values are astronomical
    big = solve_inhomogeneous_pte(3, 5, 3)
    assert max(abs(v) for v in big.X) > mpq(10) ** 1000
    # degree >= 4 falls back to unit scales: values stay tiny
    small = solve_inhomogeneous_pte(3, 5, 4)
    assert max(abs(v) for v in small.X) < 10**6


def test_solve_inhomogeneous_explicit_surrogate():
    w = solve_inhomogeneous_pte(1, 2, 2, n_surrogate=2)
    nu = nth_prime_above(2**4, 1)
    assert verify_pte(w).ok
    assert max(abs(v) for v in w.X) >= mpq(10) ** nu / 2


def test_solve_inhomogeneous_over_prime_field():
    field = PrimeField(10007)
    a, b = field.from_int(3), field.from_int(5)
    w = solve_inhomogeneous_pte(a, b, 3, field=field, unit_scales=True)
    assert verify_pte(w).ok


def test_solve_inhomogeneous_rejects_degree_one():
    with pytest.raises(InputError):
        solve_inhomogeneous_pte(3, 5, 1)


# --------------------------------------------------------------------------
# randomized finite-field search


def test_sample_deterministic_and_valid():
    field = PrimeField(101)
    residuals = (5, 17)
    r1 = sample_pte_over_fq(field, residuals, s=4, max_trials=50000, seed=1)
    r2 = sample_pte_over_fq(field, residuals, s=4, max_trials=50000, seed=1)
    assert r1 == r2
    assert r1.found
    w = r1.witness
    assert len(w.X) == len(w.Y) == 4
    for j, target in enumerate(residuals, start=1):
        diff = field.sub(
            _field_power_sum(field, w.X, j), _field_power_sum(field, w.Y, j)
        )
        assert diff == field.from_int(target)


def test_sample_seed_changes_stream():
    field = PrimeField(101)
    r1 = sample_pte_over_fq(field, (5,), s=2, max_trials=1000, seed=1)
    r2 = sample_pte_over_fq(field, (5,), s=2, max_trials=1000, seed=2)
    assert r1.found and r2.found
    assert r1.witness != r2.witness or r1.trials != r2.trials


def test_sample_count_all_scans_every_trial():
    field = PrimeField(13)
    res = sample_pte_over_fq(
        field, (0,), s=1, max_trials=2000, seed=3, count_all=True
    )
    assert res.trials == 2000
    # zero difference at s=1 means x == y: expected rate 1/13
    assert 80 <= res.hits <= 240
    first = sample_pte_over_fq(field, (0,), s=1, max_trials=2000, seed=3)
    assert first.witness == res.witness
    assert first.trials < 2000


def test_sample_mirror_mode():
    field = PrimeField(101)
    res = sample_pte_over_fq(
        field, (0, 0), s=3, max_trials=10, seed=0, mirror=True
    )
    # mirrored tuples satisfy zero residuals on the first draw
    assert res.found and res.trials == 1
    assert res.witness.X == res.witness.Y


def test_sample_generic_path_over_extension_field():
    field = make_ext_field(5, 2)
    res = sample_pte_over_fq(
        field, (field.zero(),), s=2, max_trials=5, seed=0, mirror=True
    )
    assert res.found and res.witness.X == res.witness.Y


def test_sample_miss_returns_no_witness():
    field = PrimeField(101)
    res = sample_pte_over_fq(field, (1, 2, 3, 4), s=4, max_trials=5, seed=0)
    assert not res.found
    assert res.witness is None
    assert res.hits == 0


def test_sample_input_validation():
    field = PrimeField(101)
    with pytest.raises(InputError):
        sample_pte_over_fq(QQ, (1,), s=2, max_trials=10)
    with pytest.raises(InputError):
        sample_pte_over_fq(field, (), s=2, max_trials=10)
    with pytest.raises(InputError):
        sample_pte_over_fq(field, (1, 2, 3), s=2, max_trials=10)
    with pytest.raises(InputError):
        sample_pte_over_fq(field, (1,), s=2, max_trials=-1)
    huge = PrimeField(find_prime_above(2**62))
    with pytest.raises(InputError):
        sample_pte_over_fq(huge, (1,), s=2, max_trials=10)
