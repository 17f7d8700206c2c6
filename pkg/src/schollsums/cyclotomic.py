"""Exact arithmetic in rings of cyclotomic integers Z[zeta_n].

An element is stored in the power basis 1, zeta, ..., zeta^(phi(n)-1) with
arbitrary-precision integer coefficients, fully reduced modulo the n-th
cyclotomic polynomial.  The representation is canonical, so equality of
values is equality of coefficient vectors.

Also provided: Galois conjugation zeta -> zeta^j, complex embeddings for
absolute-value checks, and the exact product of a Galois orbit of quadratic
polynomials down to an integer polynomial.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .errors import ConsistencyError, DomainError

#: Relative tolerance for all floating-point absolute-value checks.
DEFAULT_TOL = 1e-6


def euler_phi(n: int) -> int:
    """Euler totient of n >= 1."""
    result, m, d = 1, n, 2
    while d * d <= m:
        if m % d == 0:
            result *= d - 1
            m //= d
            while m % d == 0:
                result *= d
                m //= d
        d += 1
    if m > 1:
        result *= m - 1
    return result


def _int_poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # Exact division of integer polynomials, den monic; constant term first.
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + dn]
        out[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    if any(num[:dn]):
        raise ConsistencyError("polynomial division was not exact")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, constant term first.

    Computed over Z by dividing x^n - 1 by the cyclotomic polynomials of the
    proper divisors of n (the Moebius-product recursion, done bottom-up).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _int_poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    # zeta^k in the power basis for 0 <= k < 2*phi(n)-1 (enough for products
    # of reduced elements); row k is the reduction of x^k mod Phi_n.
    phi = euler_phi(n)
    mod = cyclotomic_polynomial(n)
    rows = []
    cur = [1] + [0] * (phi - 1)
    for _ in range(max(2 * phi - 1, n + 1)):
        rows.append(tuple(cur))
        # multiply by x, reduce the overflow coefficient against Phi_n
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(phi):
                cur[j] -= top * mod[j]
    return tuple(rows)


def cyc_reduce(n: int, raw) -> "CycInt":
    """Reduce an integer vector indexed by powers of zeta_n to a CycInt.

    ``raw`` may have any length; entry k is the coefficient of zeta_n^k.
    """
    phi = euler_phi(n)
    table = _power_table(n)
    coeffs = [0] * phi
    for k, c in enumerate(raw):
        if not c:
            continue
        row = table[k] if k < len(table) else None
        if row is None:
            # fold exponent using zeta^n = 1 first, then the table
            row = table[k % n]
        for j in range(phi):
            if row[j]:
                coeffs[j] += c * row[j]
    return CycInt(n, tuple(coeffs))


@dataclass(frozen=True)
class CycInt:
    """A cyclotomic integer in reduced power-basis form."""

    n: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        phi = euler_phi(self.n)
        if len(self.coeffs) != phi:
            raise DomainError(
                f"coefficient vector must have length phi({self.n}) = {phi}"
            )

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n: int) -> "CycInt":
        return CycInt(n, (0,) * euler_phi(n))

    @staticmethod
    def from_int(n: int, c: int) -> "CycInt":
        return CycInt(n, (c,) + (0,) * (euler_phi(n) - 1))

    @staticmethod
    def zeta_power(n: int, k: int) -> "CycInt":
        raw = [0] * n
        raw[k % n] = 1
        return cyc_reduce(n, raw)

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "CycInt"):
        if self.n != other.n:
            raise DomainError("mixed cyclotomic conductors")

    def __add__(self, other):
        if isinstance(other, int):
            other = CycInt.from_int(self.n, other)
        self._check(other)
        return CycInt(self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = CycInt.from_int(self.n, other)
        self._check(other)
        return CycInt(self.n, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return CycInt(self.n, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.n, tuple(a * other for a in self.coeffs))
        self._check(other)
        raw = [0] * (2 * len(self.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        raw[i + j] += a * b
        return cyc_reduce(self.n, raw)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise DomainError("negative powers are not defined in Z[zeta_n]")
        result = CycInt.from_int(self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_int(self) -> int:
        if not self.is_rational():
            raise ConsistencyError(f"{self!r} is not a rational integer")
        return self.coeffs[0]

    def divexact_by_2(self) -> "CycInt":
        if any(c % 2 for c in self.coeffs):
            raise ConsistencyError("division by 2 is not exact")
        return CycInt(self.n, tuple(c // 2 for c in self.coeffs))

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": list(self.coeffs)}

    @staticmethod
    def from_json(obj: dict) -> "CycInt":
        return cyc_reduce(int(obj["n"]), [int(c) for c in obj["coeffs"]])

    def __repr__(self):
        if self.is_zero():
            return f"CycInt({self.n}, 0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                z = f"z{self.n}" if k == 1 else f"z{self.n}^{k}"
                terms.append(f"{c}*{z}" if abs(c) != 1 else ("-" + z if c < 0 else z))
        return f"CycInt({self.n}, {' + '.join(terms)})"


def galois_conjugate(z: CycInt, j: int) -> CycInt:
    """Image of z under the ring automorphism zeta_n -> zeta_n^j, gcd(j,n)=1."""
    if gcd(j, z.n) != 1:
        raise DomainError(f"j={j} is not coprime to n={z.n}")
    raw = [0] * z.n
    for k, c in enumerate(z.coeffs):
        if c:
            raw[(j * k) % z.n] += c
    return cyc_reduce(z.n, raw)


def complex_embed(z: CycInt, j: int = 1) -> complex:
    """The complex number sum_k c_k e^(2*pi*i*j*k/n); requires gcd(j,n)=1."""
    if gcd(j, z.n) != 1:
        raise DomainError(f"j={j} is not coprime to n={z.n}")
    return sum(
        c * cmath.exp(2j * cmath.pi * j * k / z.n)
        for k, c in enumerate(z.coeffs)
        if c
    )


def abs_embeddings(z: CycInt) -> list[float]:
    """Absolute values of z under every complex embedding of Q(zeta_n)."""
    return [abs(complex_embed(z, j)) for j in range(1, z.n + 1) if gcd(j, z.n) == 1]


def embed_into(z: CycInt, bigger_n: int) -> CycInt:
    """Natural inclusion Z[zeta_n] -> Z[zeta_N] via zeta_n = zeta_N^(N/n)."""
    if bigger_n % z.n != 0:
        raise DomainError(f"{z.n} does not divide {bigger_n}")
    step = bigger_n // z.n
    raw = [0] * bigger_n
    for k, c in enumerate(z.coeffs):
        if c:
            raw[(k * step) % bigger_n] += c
    return cyc_reduce(bigger_n, raw)


@dataclass(frozen=True)
class QuadraticFactor:
    """A monic quadratic X^2 - T*X + D with coefficients in Z[zeta_n]."""

    T: CycInt
    D: CycInt

    def __post_init__(self):
        if self.T.n != self.D.n:
            raise DomainError("trace and determinant live in different rings")

    @property
    def n(self) -> int:
        return self.T.n

    def conjugate(self, j: int) -> "QuadraticFactor":
        return QuadraticFactor(galois_conjugate(self.T, j), galois_conjugate(self.D, j))

    def to_json(self) -> dict:
        return {"T": self.T.to_json(), "D": self.D.to_json()}


def induce_to_integers(factors: list[QuadraticFactor]) -> tuple[int, ...]:
    """Exact product of quadratics X^2 - T_j X + D_j as an integer polynomial.

    Expects one factor per unit class of (Z/nZ)^x, i.e. phi(n) of them, and
    returns the degree-2*phi(n) coefficient vector, constant term first.  The
    product is formed by exact polynomial multiplication over Z[zeta_n]; a
    cyclotomic component surviving in any coefficient means the input was not
    stable under the full Galois orbit, which is reported as an error.
    """
    if not factors:
        raise DomainError("need at least one quadratic factor")
    n = factors[0].n
    phi = euler_phi(n)
    if len(factors) != phi:
        raise DomainError(f"expected phi({n}) = {phi} factors, got {len(factors)}")
    one = CycInt.from_int(n, 1)
    poly = [one]  # coefficients in Z[zeta_n], constant first
    for f in factors:
        if f.n != n:
            raise DomainError("mixed conductors among factors")
        quad = [f.D, -f.T, one]
        new = [CycInt.zero(n) for _ in range(len(poly) + 2)]
        for i, a in enumerate(poly):
            for j, b in enumerate(quad):
                new[i + j] = new[i + j] + a * b
        poly = new
    out = []
    for k, c in enumerate(poly):
        if not c.is_rational():
            raise ConsistencyError(
                f"coefficient of X^{k} is not a rational integer: {c!r}"
            )
        out.append(c.to_int())
    return tuple(out)
