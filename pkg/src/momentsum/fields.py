"""Field descriptors: rationals, prime fields, and extension fields F_{p^ell}.

Each descriptor exposes the same small arithmetic protocol (zero, one,
from_int, add, sub, mul, div, inv, neg, pow, to_str, from_str, sort_key) so
the reductions and decoders stay field-generic. Extension-field elements are
coefficient tuples, lowest power first; index i holds the coefficient of
gamma^i, the adjoined root standing in for the radix ten.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpq, mpz

from .errors import InputError, InternalError, ParseError

# Primality: BPSW plus fixed Miller-Rabin rounds, a deterministic procedure
# with no known composite passing it anywhere near the sizes used here.


def is_probable_prime(n) -> bool:
    """Primality check adequate for every magnitude this package produces."""
    return bool(gmpy2.is_prime(mpz(n), 40))


def find_prime_above(bound) -> int:
    """Least prime strictly greater than bound."""
    return int(gmpy2.next_prime(mpz(bound)))


def nth_prime_above(bound, t: int) -> int:
    """The t-th prime strictly greater than bound, t >= 1."""
    if t < 1:
        raise InputError(f"t must be >= 1, got {t}")
    p = mpz(bound)
    for _ in range(t):
        p = gmpy2.next_prime(p)
    return int(p)


class Rationals:
    """The field of exact rationals."""

    kind = "rational"
    char = 0
    order = None

    def zero(self):
        return mpq(0)

    def one(self):
        return mpq(1)

    def from_int(self, n):
        return mpq(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise InputError("inverse of zero")
        return 1 / mpq(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return self.inv(a) ** (-e)
        return mpq(a) ** e

    def is_zero(self, a) -> bool:
        return a == 0

    def sort_key(self, a):
        return mpq(a)

    def to_str(self, a) -> str:
        return str(mpq(a))

    def from_str(self, s: str):
        from .exactnum import rat_from_str

        return rat_from_str(s)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("rational")

    def __repr__(self):
        return "Rationals()"


QQ = Rationals()


class PrimeField:
    """F_p with elements stored as canonical ints in [0, p)."""

    kind = "prime"

    def __init__(self, p):
        p = int(p)
        if p < 2 or not is_probable_prime(p):
            raise InputError(f"modulus is not prime: {p}")
        self.p = p
        self.char = p
        self.order = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return int(mpz(n) % self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise InputError("inverse of zero")
        return int(gmpy2.invert(mpz(a), mpz(self.p)))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(int(a), e, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def sort_key(self, a):
        return int(a)

    def element_from_index(self, i: int):
        if not 0 <= i < self.p:
            raise InputError(f"index {i} outside field of order {self.p}")
        return i

    def to_str(self, a) -> str:
        return str(int(a))

    def from_str(self, s: str):
        from .exactnum import int_from_str

        return self.from_int(int_from_str(s))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


# Polynomial helpers over F_p. Polynomials are lists of ints, lowest power
# first, with no trailing zeros (the zero polynomial is the empty list).


def _ptrim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmul(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] = (out[i + j] + fi * gj) % p
    return _ptrim(out)


def _pmod(f: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    f = _ptrim(list(f))
    dm = len(m) - 1
    if dm == 0:
        return []  # any polynomial is 0 modulo a nonzero constant
    lead_inv = int(gmpy2.invert(mpz(m[-1]), mpz(p)))
    while len(f) > dm:
        shift = len(f) - 1 - dm
        q = f[-1] * lead_inv % p
        for i, mi in enumerate(m):
            f[shift + i] = (f[shift + i] - q * mi) % p
        _ptrim(f)
    return f


def _pmulmod(f, g, m, p):
    return _pmod(_pmul(f, g, p), m, p)


def _ppow_pth(f, m, p):
    """Frobenius: f^p mod m by square and multiply."""
    result = [1]
    base = list(f)
    e = p
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    a, b = list(f), list(g)
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = int(gmpy2.invert(mpz(a[-1]), mpz(p)))
        a = [c * inv % p for c in a]
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p, lowest power first."""
    m = list(coeffs)
    ell = len(m) - 1
    if ell < 1 or m[-1] != 1:
        raise InputError("irreducibility test wants a monic polynomial")
    if ell == 1:
        return True
    x = [0, 1]
    # x^(p^k) mod m via k Frobenius steps; reuse partial towers.
    powers = {0: x}

    def frob_tower(k: int):
        if k in powers:
            return powers[k]
        prev = frob_tower(k - 1)
        cur = _ppow_pth(prev, m, p)
        powers[k] = cur
        return cur

    for r in _prime_factors(ell):
        h = frob_tower(ell // r)
        diff = list(h)
        while len(diff) < 2:
            diff.append(0)
        diff[1] = (diff[1] - 1) % p
        if _pgcd(diff, m, p) != [1]:
            return False
    top = frob_tower(ell)
    diff = list(top)
    while len(diff) < 2:
        diff.append(0)
    diff[1] = (diff[1] - 1) % p
    return not _ptrim(diff)


def least_primitive_root(p: int) -> int:
    """Smallest generator of F_p^*; p must be a modest prime."""
    if p == 2:
        return 1
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in factors):
            return g
    raise InternalError(f"no primitive root below {p}")


_LEX_SCAN_LIMIT = 64


def _lex_first_modulus(p: int, ell: int) -> list[int]:
    """First irreducible monic modulus in base-p counter order.

    Coefficient vectors (c_0, .., c_{ell-1}) are ordered by the integer
    sum c_i p^i; c_0 = 0 is skipped since such polynomials are divisible
    by x. The scan is deterministic.
    """
    if ell == 1:
        return [1, 1] if p > 1 else [1, 1]
    v = 1
    limit = p**ell
    while v < limit:
        if v % p != 0:
            coeffs = []
            rest = v
            for _ in range(ell):
                coeffs.append(rest % p)
                rest //= p
            candidate = coeffs + [1]
            if is_irreducible(candidate, p):
                return candidate
        v += 1
    raise InternalError(f"no irreducible polynomial of degree {ell} over F_{p}")


def _binomial_modulus(p: int, ell: int) -> list[int]:
    """Certified irreducible x^ell - c for ell a power of two, p = 1 mod 4.

    With c a generator of F_p^*, x^ell - c is irreducible exactly when every
    prime factor of ell divides ord(c) = p - 1, gcd(ell, (p-1)/ord(c)) = 1,
    and p = 1 mod 4 whenever 4 | ell. All three hold by choice of c and the
    checks below.
    """
    if ell & (ell - 1) != 0:
        raise InputError(
            f"degree {ell} exceeds the scan limit {_LEX_SCAN_LIMIT} and is "
            "not a power of two; only power-of-two degrees are supported there"
        )
    if p % 4 != 1:
        raise InputError(
            f"degree {ell} exceeds the scan limit and needs p = 1 mod 4, got p = {p}"
        )
    if p > 10**6:
        raise InputError("large characteristic with large degree is unsupported")
    c = least_primitive_root(p)
    return [(-c) % p] + [0] * (ell - 1) + [1]


class ExtField:
    """F_{p^ell} as F_p[x] mod an irreducible monic modulus.

    Elements are tuples of length ell of ints in [0, p), lowest power first.
    """

    kind = "ext"

    def __init__(self, p, ell: int, modulus: Sequence[int], validate: bool = True):
        p = int(p)
        if not is_probable_prime(p):
            raise InputError(f"characteristic is not prime: {p}")
        if ell < 1:
            raise InputError(f"degree must be >= 1, got {ell}")
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != ell + 1 or modulus[-1] != 1:
            raise InputError("modulus must be monic of degree ell")
        self.p = p
        self.ell = ell
        self.modulus = tuple(modulus)
        self.char = p
        self.order = p**ell
        self._zero = (0,) * ell
        one = [0] * ell
        one[0] = 1
        self._one = tuple(one)
        # x^ell - c form enables O(1) wraparound and monomial inverses.
        body = modulus[1:-1]
        self._wrap = (-modulus[0]) % p if not any(body) else None
        self._np_ok = ell * (p - 1) ** 2 < 2**62
        if validate:
            self._validate_modulus()

    def _validate_modulus(self):
        if self.ell <= _LEX_SCAN_LIMIT:
            if not is_irreducible(list(self.modulus), self.p):
                raise InputError("modulus is reducible")
        elif self._wrap is not None:
            # Binomial criterion; ord(wrap) must be divisible by every prime
            # factor of ell with coprime cofactor.
            c = self._wrap
            e = self._element_order_base(c)
            for r in _prime_factors(self.ell):
                if e % r != 0:
                    raise InputError("modulus is reducible (order test)")
            if gmpy2.gcd(mpz(self.ell), mpz((self.p - 1) // e)) != 1:
                raise InputError("modulus is reducible (cofactor test)")
            if self.ell % 4 == 0 and self.p % 4 != 1:
                raise InputError("modulus is reducible (p mod 4 test)")
        # Large non-binomial moduli are accepted as stated; only this
        # package's own serializer produces them, and it never does.

    def _element_order_base(self, c: int) -> int:
        e = self.p - 1
        for r in _prime_factors(self.p - 1):
            while e % r == 0 and pow(c, e // r, self.p) == 1:
                e //= r
        return e

    # Element constructors.

    def zero(self):
        return self._zero

    def one(self):
        return self._one

    def from_int(self, n):
        out = [0] * self.ell
        out[0] = int(mpz(n) % self.p)
        return tuple(out)

    def from_coeffs(self, coeffs: Iterable[int]):
        cs = [int(c) % self.p for c in coeffs]
        if len(cs) > self.ell:
            if any(cs[self.ell :]):
                raise InputError(
                    f"coefficient vector of length {len(cs)} exceeds degree {self.ell}"
                )
            cs = cs[: self.ell]
        cs.extend([0] * (self.ell - len(cs)))
        return tuple(cs)

    def gamma(self):
        """The adjoined root playing the role of the radix."""
        return self.monomial(1)

    def monomial(self, e: int, c: int = 1):
        if not 0 <= e < self.ell:
            raise InputError(f"monomial exponent {e} outside [0, {self.ell})")
        out = [0] * self.ell
        out[e] = int(c) % self.p
        return tuple(out)

    # Arithmetic.

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def mul(self, a, b):
        if self._np_ok:
            return self._mul_np(a, b)
        prod = _pmul(list(a), list(b), self.p)
        return self.from_coeffs(_pmod(prod, list(self.modulus), self.p))

    _FFT_MIN = 256

    def _mul_np(self, a, b):
        av = np.asarray(a, dtype=np.int64)
        bv = np.asarray(b, dtype=np.int64)
        n = self.ell
        if n >= self._FFT_MIN:
            size = 2 * n - 1
            nfft = 1 << (size - 1).bit_length()
            # Conservative rounding-error bound for exact recovery.
            max_coeff = float(n) * (self.p - 1) ** 2
            if max_coeff * nfft * 2.0**-52 < 0.25:
                fa = np.fft.rfft(av, nfft)
                fb = np.fft.rfft(bv, nfft)
                conv = np.rint(np.fft.irfft(fa * fb, nfft))[:size].astype(np.int64)
            else:
                conv = np.convolve(av, bv)
        else:
            conv = np.convolve(av, bv)
        conv %= self.p
        if self._wrap is not None:
            low = conv[:n].copy()
            high = conv[n:]
            low[: high.size] = (low[: high.size] + self._wrap * high) % self.p
            return tuple(int(x) for x in low)
        reduced = _pmod([int(x) for x in conv], list(self.modulus), self.p)
        return self.from_coeffs(reduced)

    def mul_shift(self, a, e: int):
        """a times gamma^e; cheap coefficient rotation under a binomial modulus."""
        if e < 0:
            raise InputError(f"shift exponent must be nonnegative, got {e}")
        if e == 0:
            return tuple(a)
        if self._wrap is None:
            return self.mul(a, self.pow(self.monomial(1), e))
        q, r = divmod(e, self.ell)
        out = tuple(a)
        w = self._wrap
        for _ in range(q):
            out = tuple((x * w) % self.p for x in out)
        if r:
            rotated = out[-r:] + out[:-r]
            head = tuple((x * w) % self.p for x in rotated[:r])
            out = head + rotated[r:]
        return out

    def shift_down(self, a, e: int):
        """Exact division by gamma^e for elements supported on indices >= e."""
        if e == 0:
            return tuple(a)
        if any(a[:e]):
            raise InternalError(
                f"shift_down({e}) on an element with support below {e}"
            )
        return tuple(a[e:]) + (0,) * e

    def inv(self, a):
        if not any(a):
            raise InputError("inverse of zero")
        if self._wrap is not None:
            nz = [i for i, c in enumerate(a) if c]
            if len(nz) == 1:
                # (c gamma^e)^-1 = c^-1 wrap^-1 gamma^(ell-e) for e > 0.
                e, c = nz[0], a[nz[0]]
                cinv = int(gmpy2.invert(mpz(c), mpz(self.p)))
                if e == 0:
                    return self.monomial(0, cinv)
                winv = int(gmpy2.invert(mpz(self._wrap), mpz(self.p)))
                return self.monomial(self.ell - e, cinv * winv % self.p)
        # Extended Euclid in F_p[x].
        p = self.p
        r0, r1 = list(self.modulus), _ptrim(list(a))
        s0, s1 = [], [1]
        while r1:
            q_coeffs = self._pdivq(r0, r1, p)
            r0, r1 = r1, self._psub(r0, _pmul(q_coeffs, r1, p), p)
            s0, s1 = s1, self._psub(s0, _pmul(q_coeffs, s1, p), p)
        if len(r0) != 1:
            raise InternalError("element not invertible; modulus reducible?")
        scale = int(gmpy2.invert(mpz(r0[0]), mpz(p)))
        return self.from_coeffs([c * scale % p for c in s0])

    @staticmethod
    def _psub(f, g, p):
        out = [0] * max(len(f), len(g))
        for i, c in enumerate(f):
            out[i] = c
        for i, c in enumerate(g):
            out[i] = (out[i] - c) % p
        return _ptrim(out)

    @staticmethod
    def _pdivq(f, g, p):
        f = list(f)
        q = [0] * max(1, len(f) - len(g) + 1)
        inv_lead = int(gmpy2.invert(mpz(g[-1]), mpz(p)))
        while len(f) >= len(g) and _ptrim(f):
            shift = len(f) - len(g)
            coeff = f[-1] * inv_lead % p
            q[shift] = coeff
            for i, gi in enumerate(g):
                f[shift + i] = (f[shift + i] - coeff * gi) % p
            _ptrim(f)
        return _ptrim(q)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self._one
        base = tuple(a)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a) -> bool:
        return not any(a)

    def sort_key(self, a):
        return tuple(reversed(a))

    def element_from_index(self, i: int):
        if not 0 <= i < self.order:
            raise InputError(f"index {i} outside field of order {self.order}")
        out = []
        for _ in range(self.ell):
            out.append(i % self.p)
            i //= self.p
        return tuple(out)

    def to_str(self, a) -> str:
        return ",".join(str(c) for c in a)

    def from_str(self, s: str):
        try:
            coeffs = [int(c) for c in s.strip().split(",")]
        except ValueError:
            raise ParseError(f"not an extension-field element: {s!r}") from None
        if len(coeffs) != self.ell:
            raise ParseError(
                f"expected {self.ell} coefficients, got {len(coeffs)}"
            )
        return self.from_coeffs(coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and other.p == self.p
            and other.ell == self.ell
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("ext", self.p, self.ell, self.modulus))

    def __repr__(self):
        return f"ExtField(p={self.p}, ell={self.ell})"


def make_ext_field(p, ell: int) -> ExtField:
    """Construct F_{p^ell} with a deterministic modulus choice.

    Up to degree 64 the modulus is the first irreducible monic polynomial in
    base-p counter order over (c_0, .., c_{ell-1}); beyond that it is the
    certified binomial x^ell - c described in _binomial_modulus.
    """
    p = int(p)
    if not is_probable_prime(p):
        raise InputError(f"characteristic is not prime: {p}")
    if ell < 1:
        raise InputError(f"degree must be >= 1, got {ell}")
    if ell <= _LEX_SCAN_LIMIT:
        modulus = _lex_first_modulus(p, ell)
    else:
        modulus = _binomial_modulus(p, ell)
    return ExtField(p, ell, modulus)


def ext_magnitude(a) -> int | None:
    """Largest index with a nonzero coefficient; None for the zero element."""
    mag = None
    for i, c in enumerate(a):
        if c:
            mag = i
    return mag
