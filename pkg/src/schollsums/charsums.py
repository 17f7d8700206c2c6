"""Character sums over residue fields of the surface family.

The central object is the double sum

    S(n, i, place) = sum over x, y in k of xi^i(f_n(x, y)),
    f_n(x, y) = (xy)^(n-1) (1-x) (1-y) (1-xy)^(n-1),

where xi is the n-th power residue symbol of the place and k its residue
field.  S is an exact cyclotomic integer; it is the Frobenius trace of a
2-dimensional piece of the second cohomology of the surface s^n = f_n.

Two independent evaluation routes are provided:

* trace_sum: the O(q^2) brute-force double loop.  Since xi(0) = 0, only the
  grid x, y != 0, x != 1, y != 1, xy != 1 contributes; the loop histograms
  the symbol exponent of f_n over that grid (an i-independent quantity) and
  assembles the exact value from the n integer counts.

* trace_sum_greene: an O(q log q) pipeline.  Writing A = xi^i, the sum is

      S = 1/(q-1) * sum over all characters chi of
          J(conj(chi), conj(A)) * J(conj(A) chi, A)^2,

  obtained by Fourier-expanding conj(A)(1 - xy) over the character group
  (this is the content of the finite-field 3F2(A, conj A, conj A; 1, 1 | 1)
  expression for S/q^2).  All Gauss sums of the field come from a single
  length-(q-1) DFT of the additive character along the discrete-log
  ordering; Jacobi sums are Gauss-sum quotients with the standard
  degenerate-case corrections J(eps, chi) = -1 and J(chi, conj chi) =
  -chi(-1).  The complex result is rounded back to Z[zeta_n] by solving the
  small least-squares system against all embeddings and certifying the
  residual, so the returned value is exact or an error is raised.

Both routes agree exactly; the brute force is the oracle for the pipeline.
All operations are pure; the brute-force grid may be partitioned arbitrarily
with identical results (integer counts commute).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .cyclotomic import (CycInt, abs_embeddings, cyc_reduce, embed_into,
                         galois_conjugate)
from .errors import CapacityError, ConsistencyError, DomainError, PrecisionError
from .places import Place, minus_one_symbol, residue_symbol

#: Auto method selection: brute force up to this field size, DFT pipeline above.
BRUTE_AUTO_MAX_Q = 4096
#: Hard cap for the brute-force grid (about 2.7e8 pairs).
BRUTE_MAX_Q = 16384
#: Hard cap for the DFT length in the Gauss-sum pipeline.
GREENE_MAX_M = 2**24
#: Certified-rounding threshold, relative to Np.
ROUNDING_MARGIN = 1e-4

_CHUNK = 1 << 21


@dataclass(eq=False)
class CharSumResult:
    n: int
    i: int
    place: Place
    value: CycInt
    method: str
    elapsed: float
    margin: float | None = None

    def to_json(self, with_timing: bool = False) -> dict:
        out = {
            "n": self.n,
            "i": self.i,
            "place": self.place.to_json(),
            "value": self.value.to_json(),
            "method": self.method,
        }
        if with_timing:
            out["ms"] = round(self.elapsed * 1000.0, 3)
        return out


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------

_HIST_CACHE: dict[int, tuple[int, ...]] = {}


def _symbol_histogram(pl: Place, chunk: int = _CHUNK) -> tuple[int, ...]:
    """Histogram of dlog(f_n(x,y)) mod n over the nonzero grid.

    Entry d counts pairs with f_n(x,y) = g^e, e = d mod n.  This is the whole
    brute-force computation; every S(n, i, place) is a linear combination of
    these n counts.
    """
    key = id(pl)
    if key in _HIST_CACHE:
        return _HIST_CACHE[key]
    ctx = pl.ctx
    q, n = ctx.q, pl.n
    if q > BRUTE_MAX_Q:
        raise CapacityError(f"brute force refused for q = {q} > {BRUTE_MAX_Q}")
    m = q - 1
    exp = ctx.exp_table()
    dlog = ctx.dlog_table()
    onem = ctx.one_minus_table()
    # w[e] = dlog(1 - g^e); only e = 0 (x = 1) lacks one, and is excluded
    w = dlog[onem[exp]]
    hist = np.zeros(n, dtype=np.int64)
    ey = np.arange(1, m, dtype=np.int64)
    wy = w[ey]
    rows_per_block = max(1, chunk // max(m, 1))
    for lo in range(1, m, rows_per_block):
        ex = np.arange(lo, min(lo + rows_per_block, m), dtype=np.int64)[:, None]
        es = ex + ey[None, :]
        es[es >= m] -= m
        mask = es != 0  # xy = 1 excluded
        d = (w[ex] + wy[None, :] - w[es] - es) % n
        hist += np.bincount(d[mask], minlength=n)
    out = tuple(int(c) for c in hist)
    _HIST_CACHE[key] = out
    return out


def _value_from_histogram(pl: Place, i: int) -> CycInt:
    hist = _symbol_histogram(pl)
    n = pl.n
    raw = [0] * n
    for d, cnt in enumerate(hist):
        raw[(i * pl.u * d) % n] += cnt
    return cyc_reduce(n, raw)


# ---------------------------------------------------------------------------
# Gauss-sum pipeline
# ---------------------------------------------------------------------------


def _additive_character_vector(ctx) -> np.ndarray:
    """psi[e] = exp(2*pi*i*Tr(g^e)/p) for e = 0..q-2, built in O(q) blocks."""
    p, f, m = ctx.p, ctx.f, ctx.q - 1
    psi = np.empty(m, dtype=np.complex128)
    seg = min(m, 1 << 20)
    if f == 1:
        base = np.empty(seg, dtype=np.int64)
        base[0] = 1
        L = 1
        while L < seg:
            cnt = min(L, seg - L)
            base[L:L + cnt] = base[:cnt] * pow(ctx.g, L, p) % p
            L += cnt
        glo = 1
        gseg = pow(ctx.g, seg, p)
        for lo in range(0, m, seg):
            cnt = min(seg, m - lo)
            vals = base[:cnt] * glo % p
            psi[lo:lo + cnt] = np.exp(2j * np.pi * vals / p)
            glo = glo * gseg % p
    else:
        tvec = np.array(ctx.trace_vector(), dtype=np.int64)
        mat_g = ctx.mul_matrix(ctx.g)
        base = np.zeros((seg, f), dtype=np.int64)
        base[0, 0] = 1
        L = 1
        mat_l = mat_g
        while L < seg:
            cnt = min(L, seg - L)
            base[L:L + cnt] = base[:cnt] @ mat_l % p
            L += cnt
            if L < seg:
                mat_l = _mat_pow(mat_g, L, p)
        mat_seg = _mat_pow(mat_g, seg, p)
        w = tvec.copy()  # (M_g^lo) @ tvec, starting at lo = 0
        for lo in range(0, m, seg):
            cnt = min(seg, m - lo)
            tr = base[:cnt] @ w % p
            psi[lo:lo + cnt] = np.exp(2j * np.pi * tr / p)
            w = mat_seg @ w % p
    return psi


def _mat_pow(mat: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.eye(mat.shape[0], dtype=np.int64)
    base = mat % p
    while e:
        if e & 1:
            out = out @ base % p
        base = base @ base % p
        e >>= 1
    return out


def naive_gauss_sums(ctx) -> np.ndarray:
    """All Gauss sums by the definition, O(q^2); the DFT oracle for tests."""
    m = ctx.q - 1
    psi = _additive_character_vector(ctx)
    js, es = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    return (np.exp(2j * np.pi * (js * es % m) / m) * psi[None, :]).sum(axis=1)


class GreeneEngine:
    """Per-place cache of Gauss sums and assembled character-sum values."""

    def __init__(self, pl: Place):
        m = pl.ctx.q - 1
        if m > GREENE_MAX_M:
            raise CapacityError(
                f"DFT length {m} exceeds the pipeline cap {GREENE_MAX_M}")
        self.pl = pl
        self.m = m
        psi = _additive_character_vector(pl.ctx)
        # G[j] = g(chi_j) = sum_e chi_j(g^e) psi(g^e), chi_j(g^e) = e^(2pi i je/m)
        self.G = m * np.fft.ifft(psi)
        del psi
        self.minus_one_exp = m // 2 if pl.p != 2 else 0
        self._sums: dict[int, complex] = {}

    def char_index(self, t: int) -> int:
        # complex character matching the symbol power xi^t along dlog ordering
        return ((t * self.pl.u) % self.pl.n) * (self.m // self.pl.n)

    def _sign_minus_one(self, a: int) -> float:
        return -1.0 if (a * self.minus_one_exp) % self.m else 1.0

    def sum_for_power(self, t: int) -> complex:
        """Complex value of S(n, t, place) via Jacobi-sum assembly."""
        t %= self.pl.n
        if t == 0:
            raise DomainError("symbol power must be nonzero mod n")
        if t in self._sums:
            return self._sums[t]
        m, G = self.m, self.G
        a = self.char_index(t)
        Ga = G[a]
        Gma = G[(m - a) % m]
        am1 = self._sign_minus_one(a)
        total = 0.0 + 0.0j
        for lo in range(0, m, _CHUNK):
            j = np.arange(lo, min(lo + _CHUNK, m), dtype=np.int64)
            J2 = G[(j - a) % m] * Ga / G[j]
            J1 = G[(m - j) % m] * Gma / G[(m - j - a) % m]
            # degenerate Jacobi sums: trivial character or product trivial
            if lo == 0:
                J2[0] = -am1          # J(conj A, A) = -A(-1)
                J1[0] = -1.0          # J(eps, conj A) = -1
            if lo <= a < lo + len(j):
                J2[a - lo] = -1.0     # J(eps, A) = -1
            ja = (m - a) % m
            if lo <= ja < lo + len(j) and ja != 0:
                J1[ja - lo] = -am1    # J(A, conj A) = -A(-1)
            total += (J1 * J2 * J2).sum()
        value = total / m
        self._sums[t] = value
        return value


_ENGINE_CACHE: dict[int, GreeneEngine] = {}
_ENGINE_ORDER: list[int] = []


def greene_engine(pl: Place) -> GreeneEngine:
    key = id(pl)
    if key not in _ENGINE_CACHE:
        if len(_ENGINE_ORDER) >= 6:
            _ENGINE_CACHE.pop(_ENGINE_ORDER.pop(0), None)
        _ENGINE_CACHE[key] = GreeneEngine(pl)
        _ENGINE_ORDER.append(key)
    return _ENGINE_CACHE[key]


def _round_to_cyclotomic(pl: Place, i: int, engine: GreeneEngine):
    """Recover the exact CycInt from the embeddings of the complex values.

    The values computed with the symbol powers i*j, j running over the units
    mod n, are precisely the complex embeddings of the one underlying
    cyclotomic integer, so its power-basis coordinates solve a full-rank
    linear system; they are rounded to integers and the residual certified
    against ROUNDING_MARGIN * Np.
    """
    n = pl.n
    units = [j for j in range(1, n) if gcd(j, n) == 1]
    phi = len(units)
    values = np.array([engine.sum_for_power(i * j) for j in units])
    emb = np.exp(2j * np.pi
                 * np.outer(units, np.arange(phi)) / n)
    mat = np.vstack([emb.real, emb.imag])
    rhs = np.concatenate([values.real, values.imag])
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    coeffs = np.rint(sol).astype(object)
    resid = np.abs(emb @ coeffs.astype(np.float64) - values).max()
    margin = resid / max(pl.Np, 1)
    if margin >= ROUNDING_MARGIN:
        raise PrecisionError(
            f"rounding residual {resid:.3g} exceeds {ROUNDING_MARGIN} * Np")
    return CycInt(n, tuple(int(c) for c in coeffs)), float(margin)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def _validate(n: int, i: int, pl: Place):
    if pl.n != n:
        raise DomainError(f"place has conductor {pl.n}, expected {n}")
    if not 1 <= i <= n - 1:
        raise DomainError(f"index i = {i} out of range 1..{n - 1}")


def trace_sum(n: int, i: int, pl: Place, method: str = "auto") -> CharSumResult:
    """Exact value of S(n, i, place).

    ``method`` is "brute", "greene", or "auto" (brute force for small fields,
    the Gauss-sum pipeline above BRUTE_AUTO_MAX_Q).
    """
    _validate(n, i, pl)
    if method == "auto":
        method = "brute" if pl.ctx.q <= BRUTE_AUTO_MAX_Q else "greene"
    start = time.perf_counter()
    if method == "brute":
        value = _value_from_histogram(pl, i)
        return CharSumResult(n, i, pl, value, "brute", time.perf_counter() - start)
    if method == "greene":
        return trace_sum_greene(n, i, pl)
    raise DomainError(f"unknown method {method!r}")


def trace_sum_greene(n: int, i: int, pl: Place) -> CharSumResult:
    """S(n, i, place) through the O(q log q) Gauss-sum pipeline."""
    _validate(n, i, pl)
    start = time.perf_counter()
    engine = greene_engine(pl)
    value, margin = _round_to_cyclotomic(pl, i, engine)
    return CharSumResult(n, i, pl, value, "greene",
                         time.perf_counter() - start, margin)


def twist_check(n: int, i: int, pl: Place) -> dict:
    """S_i = (-1/place)^i * S_(n-i), exactly; the symbol is 1 for odd n."""
    _validate(n, i, pl)
    lhs = trace_sum(n, i, pl).value
    sym = minus_one_symbol(pl) ** i
    if i == n - i:
        rhs_sum = lhs
    else:
        rhs_sum = trace_sum(n, n - i, pl).value
    rhs = sym * rhs_sum
    return {
        "n": n,
        "i": i,
        "place": pl.to_json(),
        "lhs": lhs.to_json(),
        "rhs": rhs.to_json(),
        "symbol": sym.to_json(),
        "ok": lhs == rhs,
    }


def weil_check(result: CharSumResult, tol: float = 1e-6) -> dict:
    """Max embedding absolute value of the sum against the 2*Np bound."""
    max_abs = max(abs_embeddings(result.value)) if not result.value.is_zero() else 0.0
    bound = 2 * result.place.Np
    return {
        "n": result.n,
        "i": result.i,
        "max_abs": max_abs,
        "bound": bound,
        "ok": max_abs <= bound + tol,
    }


def gcd_reduction_check(n: int, i: int, pl_n: Place, pl_nd: Place) -> dict:
    """S(n, i) = S(n/d, i/d) under the natural embedding, d = gcd(i, n) > 1.

    ``pl_nd`` must be the compatible place below pl_n: same residue field,
    omega_(n/d) = omega_n^d (as produced by places.reduced_place).
    """
    d = gcd(i, n)
    if d <= 1:
        raise DomainError("gcd(i, n) must exceed 1")
    if pl_nd.n != n // d or pl_nd.p != pl_n.p:
        raise DomainError("places are not compatible: wrong conductor or prime")
    if pl_nd.ctx is not pl_n.ctx or pl_nd.omega != pl_n.ctx.pow(pl_n.omega, d):
        raise DomainError("places are not compatible: omega mismatch")
    lhs = trace_sum(n, i, pl_n).value
    rhs_small = trace_sum(n // d, i // d, pl_nd).value
    rhs = embed_into(rhs_small, n)
    return {
        "n": n, "i": i, "d": d, "p": pl_n.p,
        "lhs": lhs.to_json(),
        "rhs": rhs.to_json(),
        "ok": lhs == rhs,
    }


def new_part_trace(n: int, pl: Place, method: str = "auto") -> CycInt:
    """Sum of S(n, i, place) over i coprime to n; always a rational integer."""
    total = CycInt.zero(n)
    for i in range(1, n):
        if gcd(i, n) == 1:
            total = total + trace_sum(n, i, pl, method).value
    if not total.is_rational():
        raise ConsistencyError(f"new-part trace is not rational: {total!r}")
    return total


def solution_count_identity(n: int, pl: Place) -> dict:
    """Count of points with s != 0 on s^n = f_n versus the character sums.

    The left side is a direct enumeration (per pair (x, y), the number of
    nonzero s with s^n = f_n(x, y), read from an n-th power table built by
    listing all s).  The right side sums S(n, i) over i = 1..n with the i = n
    term carrying the trivial character extended by zero.
    """
    ctx = pl.ctx
    q, n_ = ctx.q, pl.n
    if q > BRUTE_MAX_Q:
        raise CapacityError(f"direct count refused for q = {q}")
    # number of nonzero s with s^n = v, by direct enumeration of s
    root_count = np.zeros(q, dtype=np.int64)
    for s in range(1, q):
        root_count[ctx.pow(s, n_)] += 1
    lhs = 0
    for x in range(q):
        for y in range(q):
            xy = ctx.mul(x, y)
            fxy = ctx.mul(
                ctx.mul(ctx.pow(xy, n_ - 1), ctx.mul(ctx.sub(1, x), ctx.sub(1, y))),
                ctx.pow(ctx.sub(1, xy), n_ - 1),
            )
            lhs += int(root_count[fxy])
    hist = _symbol_histogram(pl)
    rhs_c = CycInt.zero(n_)
    for i in range(1, n_):
        rhs_c = rhs_c + trace_sum(n_, i, pl, "brute").value
    rhs = rhs_c.to_int() + sum(hist)  # trivial-extended term counts f_n != 0
    return {"n": n_, "p": pl.p, "Np": pl.Np, "lhs": lhs, "rhs": rhs,
            "ok": lhs == rhs}


def conjugacy_check(n: int, i: int, pl: Place, method: str = "auto") -> dict:
    """S(n, i) equals the i-th Galois conjugate of S(n, 1), exactly."""
    if gcd(i, n) != 1:
        raise DomainError("conjugacy check needs i coprime to n")
    s1 = trace_sum(n, 1, pl, method).value
    si = trace_sum(n, i, pl, method).value
    return {"n": n, "i": i, "ok": si == galois_conjugate(s1, i),
            "value": si.to_json()}


def clear_caches():
    """Drop per-place histogram and Gauss-sum caches (mostly for tests)."""
    _HIST_CACHE.clear()
    _ENGINE_CACHE.clear()
    _ENGINE_ORDER.clear()


# direct Jacobi sums, used as the oracle for the degenerate-case handling


def jacobi_sum_direct(ctx, ja: int, jb: int) -> complex:
    """J(chi_ja, chi_jb) = sum_x chi_ja(x) chi_jb(1-x) by the definition."""
    m = ctx.q - 1
    dlog = ctx.dlog_table()
    onem = ctx.one_minus_table()
    total = 0j
    for x in range(1, ctx.q):
        y = int(onem[x])
        if y == 0:
            continue
        e1, e2 = int(dlog[x]), int(dlog[y])
        total += np.exp(2j * np.pi * ((ja * e1 + jb * e2) % m) / m)
    return total


def jacobi_sum_via_gauss(G: np.ndarray, ja: int, jb: int, q: int) -> complex:
    """J(chi_ja, chi_jb) from Gauss sums with the degenerate corrections."""
    m = q - 1
    ja %= m
    jb %= m
    if ja == 0 and jb == 0:
        return complex(q - 2)
    if ja == 0 or jb == 0:
        return complex(-1.0)
    if (ja + jb) % m == 0:
        sign = -1.0 if (ja * (m // 2)) % m else 1.0  # -chi_ja(-1)
        return complex(-sign)
    return G[ja] * G[jb] / G[(ja + jb) % m]
