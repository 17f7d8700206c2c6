"""Places of Q(zeta_n) above a rational prime p and power residue symbols.

A place is realized as an irreducible factor h of the n-th cyclotomic
polynomial mod p together with the residue field F_p[X]/(h); the class of X
is the distinguished image omega of zeta_n.  The n-th power residue symbol
at the place sends a nonzero residue a to the unique n-th root of unity
congruent to a^((Np-1)/n), read off in powers of omega and returned as an
exact cyclotomic integer; it is extended by 0 at 0.

The symbol value does not depend on which root of h plays the role of omega:
renaming omega to omega^p is a field automorphism that permutes the summands
of every sum computed here, which is the tested well-definedness invariant.

Extension places (the residue fields of the quadratic and cubic extensions
used for determinants and Newton checks) are built as plain extensions of
F_p of degree k*f with omega re-located as a root of the same factor h, so
the symbol restricted to the base field is the k-th power of the base
symbol.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

from .cyclotomic import CycInt
from .errors import ConsistencyError, DomainError
from .finite_fields import (FIELD_CAP, FieldCtx, _seed, build_extension,
                            factor_cyclotomic, is_irreducible, poly_trim)


@dataclass(eq=False)
class Place(object):
    """A prime of Q(zeta_n) above p, pinned to a factor of Phi_n mod p.

    ``u`` is the exponent with g^((Np-1)/n) = omega^u, precomputed once so a
    symbol evaluation costs one discrete log: the symbol of g^e is
    zeta_n^(u*e mod n).  ``degree`` is 1 for the places produced by
    enumerate_places and k for the degree-k extension places built on top of
    them; Np is always the cardinality of the residue field carried here.
    """

    n: int
    p: int
    index: int
    factor: tuple[int, ...]
    ctx: FieldCtx
    omega: int
    Np: int
    u: int
    degree: int = 1
    _omega_pows: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._omega_pows:
            acc = 1
            for k in range(self.n):
                self._omega_pows[acc] = k
                acc = self.ctx.mul(acc, self.omega)
            if acc != 1 or len(self._omega_pows) != self.n:
                raise ConsistencyError("omega does not have exact order n")

    def omega_log(self, a: int) -> int:
        """k with omega^k = a, for a in the order-n subgroup."""
        try:
            return self._omega_pows[a]
        except KeyError:
            raise ConsistencyError("element is not an n-th root of unity") from None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "factor": list(self.factor),
            "Np": self.Np,
            "index": self.index,
            "degree": self.degree,
        }


def _symbol_unit(pl_ctx: FieldCtx, n: int, omega_pows: dict) -> int:
    # u with g^((q-1)/n) = omega^u; u is a unit mod n because g generates
    t = pl_ctx.pow(pl_ctx.g, (pl_ctx.q - 1) // n)
    u = omega_pows.get(t)
    if u is None or gcd(u, n) != 1:
        raise ConsistencyError("generator does not map to a primitive root of unity")
    return u


def _make_place(n: int, p: int, index: int, factor, ctx: FieldCtx, omega: int,
                degree: int = 1) -> Place:
    pows, acc = {}, 1
    for k in range(n):
        pows[acc] = k
        acc = ctx.mul(acc, omega)
    if acc != 1 or len(pows) != n:
        raise ConsistencyError("omega does not have exact order n")
    u = _symbol_unit(ctx, n, pows)
    return Place(n=n, p=p, index=index, factor=poly_trim(factor), ctx=ctx,
                 omega=omega, Np=ctx.q, u=u, degree=degree, _omega_pows=pows)


@lru_cache(maxsize=None)
def enumerate_places(n: int, p: int) -> tuple[Place, ...]:
    """All places of Q(zeta_n) above p (p prime, p not dividing n).

    One place per irreducible factor of Phi_n mod p, in the deterministic
    lexicographic factor order; all residue fields have degree f = ord of p
    mod n, and omega is the class of X in F_p[X]/(factor).
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    factors = factor_cyclotomic(n, p)  # validates p prime, p coprime to n
    places = []
    for idx, h in enumerate(factors):
        ctx = build_extension(p, h)
        omega = (-h[0]) % p if len(h) == 2 else ctx.encode((0, 1))
        places.append(_make_place(n, p, idx, h, ctx, omega))
    return tuple(places)


def residue_symbol(pl: Place, a: int) -> CycInt:
    """The n-th power residue symbol of a at the place; 0 at a = 0.

    Below the table cap this is one dlog; above it the congruence
    a^((Np-1)/n) = omega^k is evaluated by square-and-multiply.
    """
    if a == 0:
        return CycInt.zero(pl.n)
    ctx = pl.ctx
    if ctx.q <= 2**24 and ctx._dlog is not None:
        k = (pl.u * int(ctx.dlog_table()[a])) % pl.n
    else:
        t = ctx.pow(a, (ctx.q - 1) // pl.n)
        k = pl.omega_log(t)
    return CycInt.zeta_power(pl.n, k)


def minus_one_symbol(pl: Place) -> CycInt:
    """residue_symbol at -1; equal to 1 whenever n is odd."""
    return residue_symbol(pl, pl.ctx.minus_one)


@lru_cache(maxsize=None)
def _irreducible_modulus(p: int, degree: int) -> tuple[int, ...]:
    # deterministic monic irreducible of the given degree over F_p
    rng = random.Random(_seed(p, degree, 0xE7))
    if degree == 1:
        return (0, 1)
    while True:
        cand = tuple(rng.randrange(p) for _ in range(degree)) + (1,)
        if is_irreducible(cand, p):
            return cand


_EXT_CACHE: dict = {}


def extension_place(pl: Place, k: int) -> Place:
    """The place of residue degree k*deg(pl) above the same prime.

    The bigger field is F_p[Y]/(H) for a deterministic irreducible H of
    degree k*f; omega is re-located as a root of the place's own factor h,
    which pins the same minimal relation h(omega) = 0 and hence a field
    embedding of the base residue field.  The symbol computed here restricts
    to the k-th power of the base symbol on base-field elements.
    """
    if k < 1:
        raise DomainError("extension degree must be >= 1")
    if k == 1:
        return pl
    key = (id(pl), k)
    if key in _EXT_CACHE:
        return _EXT_CACHE[key]
    f = pl.ctx.f
    big_q = pl.p ** (k * f)
    if big_q > FIELD_CAP:
        raise DomainError(
            f"residue cardinality {pl.p}^{k * f} exceeds the field cap {FIELD_CAP}")
    ctx = build_extension(pl.p, _irreducible_modulus(pl.p, k * f))
    z = ctx.pow(ctx.g, (ctx.q - 1) // pl.n)  # a fixed element of exact order n
    omega = None
    for j in range(1, pl.n):
        if gcd(j, pl.n) != 1:
            continue
        cand = ctx.pow(z, j)
        # Horner evaluation of the base factor at cand
        acc = 0
        for c in reversed(pl.factor):
            acc = ctx.add(ctx.mul(acc, cand), c % pl.p)
        if acc == 0:
            omega = cand
            break
    if omega is None:
        raise ConsistencyError("no root of the place factor in the extension field")
    made = _make_place(pl.n, pl.p, pl.index, pl.factor, ctx, omega,
                       degree=pl.degree * k)
    _EXT_CACHE[key] = made
    return made


_RED_CACHE: dict = {}


def reduced_place(pl: Place, d: int) -> Place:
    """The compatible place datum for conductor n/d on the same residue field.

    Keeps the field of pl and takes omega^d (of exact order n/d) as the
    distinguished root of unity, i.e. the place of Q(zeta_(n/d)) below pl,
    extended if necessary so the residue field matches pl's.  Used by the
    index-reduction cross-checks.
    """
    n = pl.n
    if d <= 1 or n % d != 0 or n // d < 2:
        raise DomainError(f"d = {d} must be a proper divisor of n = {n} with n/d >= 2")
    key = (id(pl), d)
    if key in _RED_CACHE:
        return _RED_CACHE[key]
    nd = n // d
    omega_d = pl.ctx.pow(pl.omega, d)
    match = None
    for idx, h in enumerate(factor_cyclotomic(nd, pl.p)):
        acc = 0
        for c in reversed(h):
            acc = pl.ctx.add(pl.ctx.mul(acc, omega_d), c % pl.p)
        if acc == 0:
            match = (idx, h)
            break
    if match is None:
        raise ConsistencyError("no factor of Phi_(n/d) vanishes at omega^d")
    made = _make_place(nd, pl.p, match[0], match[1], pl.ctx, omega_d,
                       degree=pl.degree)
    _RED_CACHE[key] = made
    return made


def rebased_place(pl: Place) -> Place:
    """The same place with omega replaced by omega^p (Frobenius renaming).

    Character sums are invariant under this renaming; pointwise symbol values
    transform alongside elements, which is the tested invariant.
    """
    return _make_place(pl.n, pl.p, pl.index, pl.factor, pl.ctx,
                       pl.ctx.pow(pl.omega, pl.p), degree=pl.degree)
