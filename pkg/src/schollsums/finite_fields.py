"""Exact arithmetic in small finite fields F_(p^f).

A field is a polynomial quotient F_p[X]/(h) for a monic irreducible h.  An
element is encoded as the integer sum(c_i * p^i) of its coefficient vector
(c_0, ..., c_(f-1)), so 0 and 1 encode the field's zero and one.  Each field
carries a fixed generator g of the multiplicative group; for q <= TABLE_CAP a
full discrete-log table is materialized on first use, which makes
multiplicative characters O(1) per evaluation.  Above the cap, discrete logs
fall back to baby-step/giant-step and character evaluation to
square-and-multiply exponentiation.

Also here: factorization of cyclotomic polynomials mod p into their
equal-degree irreducible factors (Cantor-Zassenhaus splitting with a
deterministic seed), which is how places of Q(zeta_n) are realized.
"""

from __future__ import annotations

import random
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .cyclotomic import cyclotomic_polynomial, euler_phi
from .errors import CapacityError, ConsistencyError, DomainError

#: Largest q for which exp/dlog tables are materialized.
TABLE_CAP = 2**24
#: Hard cap on any field cardinality in the system.
FIELD_CAP = 2**32

_SEED_SALT = 0x5C0117


def _seed(*parts: int) -> int:
    # deterministic seed mixing, stable across processes
    acc = _SEED_SALT
    for x in parts:
        acc = (acc * 1000003 + x) % (2**61 - 1)
    return acc


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n below 3.3 * 10^24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n < 2^64 desk scale)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# dense polynomials over F_p: tuples of ints in [0, p), constant term first,
# no trailing zeros (the zero polynomial is the empty tuple)
# ---------------------------------------------------------------------------


def poly_trim(c) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_sub(a, b, p) -> tuple[int, ...]:
    width = max(len(a), len(b))
    a = tuple(a) + (0,) * (width - len(a))
    b = tuple(b) + (0,) * (width - len(b))
    return poly_trim([(x - y) % p for x, y in zip(a, b)])


def poly_mul(a, b, p) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return poly_trim(out)


def poly_rem(a, mod, p) -> tuple[int, ...]:
    # mod need not be monic; we divide by its (inverted) leading coefficient
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p) if mod[-1] != 1 else 1
    for k in range(len(a) - 1 - dm, -1, -1):
        c = a[k + dm] * inv_lead % p
        if c:
            for j in range(dm + 1):
                a[k + j] = (a[k + j] - c * mod[j]) % p
    return poly_trim(a[:dm])


def poly_gcd(a, b, p) -> tuple[int, ...]:
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_rem(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = tuple(c * inv % p for c in a)
    return a


def poly_powmod(base, e: int, mod, p) -> tuple[int, ...]:
    result = (1,)
    base = poly_rem(base, mod, p)
    while e:
        if e & 1:
            result = poly_rem(poly_mul(result, base, p), mod, p)
        base = poly_rem(poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def _poly_x() -> tuple[int, ...]:
    return (0, 1)


def is_irreducible(h, p: int) -> bool:
    """Rabin's irreducibility test for monic h over F_p."""
    h = poly_trim(h)
    d = len(h) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    x = _poly_x()
    if poly_sub(poly_powmod(x, p**d, h, p), x, p) != ():
        return False
    for ell in factorize(d):
        diff = poly_sub(poly_powmod(x, p ** (d // ell), h, p), x, p)
        if len(poly_gcd(diff, h, p)) > 1:
            return False
    return True


def _equal_degree_split(h, d: int, p: int, rng: random.Random) -> list[tuple[int, ...]]:
    # h = product of distinct monic irreducibles, all of degree d
    h = poly_trim(h)
    if len(h) - 1 == d:
        return [h]
    deg = len(h) - 1
    while True:
        r = poly_trim([rng.randrange(p) for _ in range(deg)])
        if len(r) <= 1:
            continue
        g = poly_gcd(r, h, p)
        if 1 < len(g) < len(h):
            break
        if p == 2:
            # trace map r + r^2 + ... + r^(2^(d-1))
            s, t = r, r
            for _ in range(d - 1):
                t = poly_rem(poly_mul(t, t, p), h, p)
                s = poly_trim([(a + b) % p for a, b in
                               zip(s + (0,) * len(t), t + (0,) * len(s))])
        else:
            s = list(poly_powmod(r, (p**d - 1) // 2, h, p))
            while len(s) < 1:
                s.append(0)
            s = list(s) + [0]
            s[0] = (s[0] - 1) % p
            s = poly_trim(s)
        g = poly_gcd(s, h, p)
        if 1 < len(g) < len(h):
            break
    other = _poly_quotient_exact(h, g, p)
    return _equal_degree_split(g, d, p, rng) + _equal_degree_split(other, d, p, rng)


def _poly_quotient_exact(a, b, p) -> tuple[int, ...]:
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], p - 2, p)
    out = [0] * (len(a) - db)
    for k in range(len(out) - 1, -1, -1):
        c = a[k + db] * inv % p
        out[k] = c
        if c:
            for j in range(db + 1):
                a[k + j] = (a[k + j] - c * b[j]) % p
    return poly_trim(out)


def _find_nontrivial_factor(h, p: int) -> tuple[int, ...]:
    # used only to name a witness in error messages for reducible moduli
    h = poly_trim(h)
    x = _poly_x()
    for d in range(1, len(h) - 1):
        diff = poly_sub(poly_powmod(x, p**d, h, p), x, p)
        g = poly_gcd(diff, h, p)
        if 1 < len(g) < len(h):
            if len(g) - 1 > d:
                return _equal_degree_split(g, d, p, random.Random(_SEED_SALT ^ p))[0]
            return g
        if len(g) == len(h) and d == 1:
            # h splits into linear factors entirely
            return _equal_degree_split(h, 1, p, random.Random(_SEED_SALT ^ p))[0]
    raise ConsistencyError("no factor found for a polynomial that failed "
                           "the irreducibility test")


def poly_str(c) -> str:
    if not c:
        return "0"
    parts = []
    for k, a in enumerate(c):
        if a == 0:
            continue
        if k == 0:
            parts.append(str(a))
        elif k == 1:
            parts.append("X" if a == 1 else f"{a}*X")
        else:
            parts.append(f"X^{k}" if a == 1 else f"{a}*X^{k}")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# field contexts
# ---------------------------------------------------------------------------


class FieldCtx:
    """Immutable context for F_(p^f) = F_p[X]/(modulus).

    Construction is single-threaded; after it, the context (including its
    lazily built tables) is read-only and safe to share between threads.
    """

    def __init__(self, p: int, modulus: tuple[int, ...], generator: int):
        self.p = p
        self.modulus = poly_trim(modulus)
        self.f = len(self.modulus) - 1
        self.q = p**self.f
        self.g = generator
        self._exp = None
        self._dlog = None
        self._one_minus = None
        self._trace_vec = None
        self._bsgs = None

    # -- element plumbing ---------------------------------------------------

    def encode(self, coeffs) -> int:
        v, w = 0, 1
        for c in coeffs:
            v += (c % self.p) * w
            w *= self.p
        return v

    def decode(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.f):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    @property
    def minus_one(self) -> int:
        return self.p - 1

    # -- scalar arithmetic on encoded elements ------------------------------

    def add(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a + b) % self.p
        return self.encode(x + y for x, y in zip(self.decode(a), self.decode(b)))

    def sub(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a - b) % self.p
        return self.encode(x - y for x, y in zip(self.decode(a), self.decode(b)))

    def neg(self, a: int) -> int:
        if self.f == 1:
            return (-a) % self.p
        return self.encode(-x for x in self.decode(a))

    def mul(self, a: int, b: int) -> int:
        if self.f == 1:
            return a * b % self.p
        prod = poly_mul(self.decode(a), self.decode(b), self.p)
        return self.encode(poly_rem(prod, self.modulus, self.p))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("zero is not invertible")
        return self.pow(a, self.q - 2)

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise DomainError("zero has no multiplicative order")
        order = self.q - 1
        for ell in factorize(self.q - 1):
            while order % ell == 0 and self.pow(a, order // ell) == 1:
                order //= ell
        return order

    # -- tables --------------------------------------------------------------

    def exp_table(self) -> np.ndarray:
        """exp_table()[e] = g^e (encoded) for 0 <= e < q-1."""
        if self._exp is None:
            if self.q > TABLE_CAP:
                raise CapacityError(
                    f"q = {self.q} exceeds the table cap {TABLE_CAP}")
            m = self.q - 1
            arr = np.empty(m, dtype=np.int64)
            arr[0] = 1
            L = 1
            while L < m:
                cnt = min(L, m - L)
                gl = self.pow(self.g, L)
                if self.f == 1:
                    arr[L:L + cnt] = arr[:cnt] * gl % self.p
                else:
                    mat = self.mul_matrix(gl)
                    block = self._decode_array(arr[:cnt])
                    arr[L:L + cnt] = self._encode_array(block @ mat % self.p)
                L += cnt
            self._exp = arr
        return self._exp

    def dlog_table(self) -> np.ndarray:
        """dlog_table()[a] = e with g^e = a, and -1 at a = 0."""
        if self._dlog is None:
            m = self.q - 1
            exp = self.exp_table()
            dlog = np.full(self.q, -1, dtype=np.int64)
            dlog[exp] = np.arange(m, dtype=np.int64)
            self._dlog = dlog
        return self._dlog

    def one_minus_table(self) -> np.ndarray:
        """one_minus_table()[a] = encoding of 1 - a."""
        if self._one_minus is None:
            v = np.arange(self.q, dtype=np.int64)
            if self.f == 1:
                self._one_minus = (1 - v) % self.p
            else:
                acc = np.zeros(self.q, dtype=np.int64)
                w = 1
                for k in range(self.f):
                    digit = (v // w) % self.p
                    digit = (1 - digit) % self.p if k == 0 else (-digit) % self.p
                    acc += digit * w
                    w *= self.p
                self._one_minus = acc
        return self._one_minus

    def _decode_array(self, arr: np.ndarray) -> np.ndarray:
        out = np.empty((arr.shape[0], self.f), dtype=np.int64)
        v = arr.copy()
        for k in range(self.f):
            v, out[:, k] = np.divmod(v, self.p)
        return out

    def _encode_array(self, mat: np.ndarray) -> np.ndarray:
        weights = self.p ** np.arange(self.f, dtype=np.int64)
        return mat @ weights

    def mul_matrix(self, a: int) -> np.ndarray:
        """f x f matrix M with (row vector of x) @ M = coefficients of x*a."""
        mat = np.zeros((self.f, self.f), dtype=np.int64)
        for i in range(self.f):
            basis = tuple(1 if j == i else 0 for j in range(self.f))
            prod = poly_rem(poly_mul(basis, self.decode(a), self.p),
                            self.modulus, self.p)
            for j, c in enumerate(prod):
                mat[i, j] = c
        return mat

    def trace_vector(self) -> tuple[int, ...]:
        """t with additive trace Tr(x) = dot(coeffs(x), t) mod p."""
        if self._trace_vec is None:
            frob = np.zeros((self.f, self.f), dtype=np.int64)
            x_p = poly_powmod(_poly_x(), self.p, self.modulus, self.p)
            powed = (1,)
            for i in range(self.f):
                for j, c in enumerate(powed):
                    frob[i, j] = c
                powed = poly_rem(poly_mul(powed, x_p, self.p), self.modulus, self.p)
            total = np.eye(self.f, dtype=np.int64)
            acc = np.eye(self.f, dtype=np.int64)
            for _ in range(self.f - 1):
                acc = acc @ frob % self.p
                total = (total + acc) % self.p
            self._trace_vec = tuple(int(c) for c in total[:, 0] % self.p)
        return self._trace_vec

    def dlog(self, a: int) -> int:
        """Discrete log of a base g; table lookup under the cap, BSGS above."""
        if a == 0:
            raise DomainError("dlog(0) is undefined")
        if self.q <= TABLE_CAP:
            return int(self.dlog_table()[a])
        m = self.q - 1
        s = isqrt(m) + 1
        if self._bsgs is None:
            baby = {}
            cur = 1
            for j in range(s):
                baby.setdefault(cur, j)
                cur = self.mul(cur, self.g)
            self._bsgs = (baby, self.inv(self.pow(self.g, s)))
        baby, giant = self._bsgs
        cur = a
        for k in range(s + 1):
            if cur in baby:
                return (k * s + baby[cur]) % m
            cur = self.mul(cur, giant)
        raise ConsistencyError("BSGS failed; generator order is wrong")

    def __repr__(self):
        return f"FieldCtx(p={self.p}, f={self.f}, q={self.q})"


def _find_generator(p: int, modulus, rng: random.Random) -> int:
    ctx = FieldCtx(p, modulus, 1)
    m = ctx.q - 1
    if m == 0:
        raise DomainError("trivial field")
    fac = factorize(m) if m > 1 else {}

    def has_full_order(a):
        return all(ctx.pow(a, m // ell) != 1 for ell in fac)

    if ctx.f == 1:
        for cand in range(1 if p == 2 else 2, p):
            if has_full_order(cand):
                return cand
        raise ConsistencyError(f"no primitive root mod {p}")
    while True:
        cand = rng.randrange(2, ctx.q)
        if has_full_order(cand):
            return cand


@lru_cache(maxsize=None)
def build_prime_field(p: int) -> FieldCtx:
    """F_p with the smallest primitive root as generator and a full table."""
    if not is_prime(p):
        raise DomainError(f"p = {p} failed the primality test")
    g = _find_generator(p, (0, 1), random.Random(_SEED_SALT ^ p))
    return FieldCtx(p, (0, 1), g)


@lru_cache(maxsize=None)
def build_extension(p: int, modulus: tuple[int, ...]) -> FieldCtx:
    """F_p[X]/(modulus) for a monic irreducible modulus.

    The generator is found by seeded random search with an exact order check
    against the factorization of q - 1.  Fields larger than FIELD_CAP are
    refused; discrete-log tables are only materialized up to TABLE_CAP, with
    square-and-multiply fallbacks above.
    """
    if not is_prime(p):
        raise DomainError(f"p = {p} failed the primality test")
    modulus = poly_trim(modulus)
    if not modulus or modulus[-1] != 1:
        raise DomainError("modulus must be monic")
    f = len(modulus) - 1
    if f < 1:
        raise DomainError("modulus must have degree >= 1")
    if p**f > FIELD_CAP:
        raise CapacityError(f"q = p^{f} exceeds the field cap {FIELD_CAP}")
    if not is_irreducible(modulus, p):
        factor = _find_nontrivial_factor(modulus, p)
        raise DomainError(
            f"modulus {poly_str(modulus)} is reducible mod {p}: "
            f"divisible by {poly_str(factor)}")
    rng = random.Random(_seed(p, *modulus))
    g = _find_generator(p, modulus, rng)
    return FieldCtx(p, modulus, g)


@lru_cache(maxsize=None)
def factor_cyclotomic(n: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Monic irreducible factors of the n-th cyclotomic polynomial mod p.

    For p coprime to n the factors all have degree f = ord of p mod n and
    there are phi(n)/f of them.  Splitting is randomized Cantor-Zassenhaus
    (trace-map splitting for p = 2) under a seed derived from (n, p), and the
    factors are sorted lexicographically by coefficient vector so that place
    enumeration is deterministic.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    if not is_prime(p):
        raise DomainError(f"p = {p} failed the primality test")
    if n % p == 0:
        raise DomainError(f"p = {p} divides n = {n}")
    phi_n = tuple(c % p for c in cyclotomic_polynomial(n))
    f = 1
    while pow(p, f, n) != 1:
        f += 1
    rng = random.Random(_seed(n, p))
    factors = sorted(_equal_degree_split(phi_n, f, p, rng))
    total = euler_phi(n)
    if len(factors) * f != total:
        raise ConsistencyError("equal-degree split returned a wrong factor count")
    prod = (1,)
    for h in factors:
        prod = poly_mul(prod, h, p)
    if prod != poly_trim(phi_n):
        raise ConsistencyError("product of factors does not reproduce Phi_n mod p")
    return tuple(factors)


def dlog(ctx: FieldCtx, a: int) -> int:
    """Exponent e in [0, q-1) with g^e = a; error for a = 0."""
    return ctx.dlog(a)
