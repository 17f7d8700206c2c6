"""Exact q-expansions with fractional exponents.

A FracSeries is a truncated series in q^(1/N) with exact rational
coefficients: entry k holds the coefficient of q^((start + k)/N).
Coefficients below ``start`` are exactly zero; coefficients at or beyond
``start + prec`` are unknown, and every operation tracks the known window
pessimistically rather than fabricate terms.

Internally a series keeps an integer coefficient array over a common
denominator; products are formed by Kronecker substitution (packing the
array into one big integer and using a single big-integer multiply), which
keeps 10^4-term eta-quotient arithmetic with 1000-bit coefficients fast and
exact.  No floating point is used anywhere in this module: downstream p-adic
congruence checks would not survive rounding.

Provided expansions: Dedekind eta quotients via the pentagonal-number
expansion of the Euler product, exact k-th roots of unit-leading series, the
weight-2 Eisenstein series normalized as 1 - 24 sum sigma_1(m) q^m, the
weight-4 basis pair f1, f2 (cube roots of eta quotients, coefficients
indexed at q^(m/3)), and the eigenform combinations g_plus/g_minus.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .errors import CapacityError, ConsistencyError, DomainError

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    def mpz(x):
        return x


def _kronecker_mul(a: list[int], b: list[int], out_len: int) -> list[int]:
    """Exact convolution of integer sequences via big-integer packing.

    Splits each operand into positive and negative parts so all four packed
    integers are nonnegative, multiplies, and unpacks fixed-width chunks.
    """
    if not a or not b or out_len <= 0:
        return [0] * max(out_len, 0)
    max_a = max(max(a), -min(a), 1)
    max_b = max(max(b), -min(b), 1)
    width_bits = (max_a * max_b * min(len(a), len(b))).bit_length() + 2
    width = (width_bits + 7) // 8  # bytes per slot

    def pack(seq, sign):
        buf = bytearray(width * len(seq))
        for idx, v in enumerate(seq):
            if (v > 0) is sign and v != 0:
                buf[idx * width:(idx + 1) * width] = abs(v).to_bytes(width, "little")
        return mpz(int.from_bytes(bytes(buf), "little"))

    ap, an = pack(a, True), pack(a, False)
    bp, bn = pack(b, True), pack(b, False)
    pos = ap * bp + an * bn
    neg = ap * bn + an * bp

    def unpack(big):
        big = int(big)
        nbytes = width * (len(a) + len(b))
        raw = big.to_bytes(nbytes, "little")
        return [int.from_bytes(raw[i * width:(i + 1) * width], "little")
                for i in range(out_len)]

    return [x - y for x, y in zip(unpack(pos), unpack(neg))]


def _content_reduce(den: int, nums: list[int]) -> tuple[int, list[int]]:
    if den < 0:
        den, nums = -den, [-v for v in nums]
    g = den
    for v in nums:
        if g == 1:
            break
        g = gcd(g, v)
    if g > 1:
        den //= g
        nums = [v // g for v in nums]
    return den, nums


class FracSeries:
    """Truncated exact series in q^(1/N)."""

    __slots__ = ("N", "start", "den", "nums")

    def __init__(self, N: int, start: int, coeffs, den: int = 1):
        if N < 1:
            raise DomainError("exponent denominator must be >= 1")
        self.N = N
        nums = [int(c) if not isinstance(c, Fraction) else c for c in coeffs]
        if any(isinstance(c, Fraction) for c in nums):
            common = den
            for c in nums:
                if isinstance(c, Fraction):
                    common = common * c.denominator // gcd(common, c.denominator)
            nums = [int(c * common) if isinstance(c, Fraction) else c * (common // den)
                    for c in nums]
            den = common
        self.den, nums = _content_reduce(den, list(nums))
        # strip exactly-zero leading slots; the known end stays fixed
        while nums and nums[0] == 0:
            nums.pop(0)
            start += 1
        self.start = start
        self.nums = nums

    # -- basic accessors -----------------------------------------------------

    @property
    def prec(self) -> int:
        """Number of known coefficient slots from ``start`` onward."""
        return len(self.nums)

    @property
    def end(self) -> int:
        """First unknown exponent numerator (exclusive known bound)."""
        return self.start + len(self.nums)

    def coeffs(self) -> list[Fraction]:
        return [Fraction(v, self.den) for v in self.nums]

    def coeff(self, exponent) -> Fraction:
        """Exact coefficient of q^exponent; errors beyond the known window."""
        e = Fraction(exponent)
        scaled = e * self.N
        if scaled.denominator != 1:
            return Fraction(0)
        k = int(scaled) - self.start
        if k < 0:
            return Fraction(0)
        if k >= len(self.nums):
            raise CapacityError(
                f"coefficient of q^{e} is beyond the known precision "
                f"(need slot {k + 1} of {len(self.nums)})")
        return Fraction(self.nums[k], self.den)

    def is_zero(self) -> bool:
        return not self.nums or all(v == 0 for v in self.nums)

    def leading(self) -> tuple[Fraction, Fraction]:
        """(exponent, coefficient) of the first nonzero term."""
        if self.is_zero():
            raise DomainError("series is zero to known precision")
        return Fraction(self.start, self.N), Fraction(self.nums[0], self.den)

    # -- representation plumbing ----------------------------------------------

    def with_denominator(self, new_n: int) -> "FracSeries":
        """Rescale the exponent lattice to q^(1/new_n); N must divide new_n."""
        if new_n % self.N:
            raise DomainError(f"{self.N} does not divide {new_n}")
        f = new_n // self.N
        if f == 1:
            return self
        nums = [0] * ((len(self.nums) - 1) * f + 1) if self.nums else []
        for k, v in enumerate(self.nums):
            nums[k * f] = v
        return FracSeries(new_n, self.start * f, nums, self.den)

    def reduced(self) -> "FracSeries":
        """Smallest exponent denominator representing the same support."""
        if not self.nums:
            return self
        g = gcd(self.N, self.start)
        for k, v in enumerate(self.nums):
            if g == 1:
                break
            if v:
                g = gcd(g, self.start + k)
        g = gcd(g, self.N)
        # the stride of known slots must also be divisible to keep density
        if g <= 1 or any(v and (self.start + k) % g for k, v in enumerate(self.nums)):
            return self
        nums = [self.nums[k] for k in range(0, len(self.nums), g)]
        # drop a partial trailing window conservatively
        return FracSeries(self.N // g, self.start // g, nums, self.den)

    def truncate(self, slots: int) -> "FracSeries":
        return FracSeries(self.N, self.start, self.nums[:slots], self.den)

    def substitute_power(self, c: int) -> "FracSeries":
        """The series with q replaced by q^c (c a positive integer)."""
        if c < 1:
            raise DomainError("substitution power must be >= 1")
        if c == 1:
            return self
        nums = [0] * ((len(self.nums) - 1) * c + 1) if self.nums else []
        for k, v in enumerate(self.nums):
            nums[k * c] = v
        return FracSeries(self.N, self.start * c, nums, self.den)

    # -- ring operations -------------------------------------------------------

    def _aligned(self, other: "FracSeries"):
        n = self.N * other.N // gcd(self.N, other.N)
        return self.with_denominator(n), other.with_denominator(n)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FracSeries(self.N, 0, [other])
            # a constant is exact to infinite precision; give it our window
            other.nums += [0] * max(0, self.end - other.end)
        a, b = self._aligned(other)
        end = min(a.end, b.end)
        start = min(a.start, b.start)
        den = a.den * b.den // gcd(a.den, b.den)
        nums = [0] * max(0, end - start)
        for src in (a, b):
            scale = den // src.den
            for k, v in enumerate(src.nums):
                pos = src.start + k - start
                if 0 <= pos < len(nums):
                    nums[pos] += v * scale
        return FracSeries(a.N, start, nums, den)

    __radd__ = __add__

    def __neg__(self):
        return FracSeries(self.N, self.start, [-v for v in self.nums], self.den)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FracSeries":
        c = Fraction(c)
        return FracSeries(self.N, self.start,
                          [v * c.numerator for v in self.nums],
                          self.den * c.denominator)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self._aligned(other)
        if a.is_zero() or b.is_zero():
            return FracSeries(a.N, a.start + b.start, [])
        # known window: min over the two unknown-tail cutoffs
        end = min(a.end + b.start, b.end + a.start)
        out_len = end - (a.start + b.start)
        nums = _kronecker_mul(a.nums, b.nums, out_len)
        return FracSeries(a.N, a.start + b.start, nums, a.den * b.den)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = None
        base = self
        while True:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if not e:
                break
            base = base * base
        if result is None:
            one = FracSeries(self.N, 0, [1] + [0] * (self.prec - 1))
            return one
        return result

    def inverse(self) -> "FracSeries":
        """Multiplicative inverse; the leading coefficient must be nonzero."""
        if self.is_zero():
            raise DomainError("cannot invert the zero series")
        lead = Fraction(self.nums[0], self.den)
        rel = len(self.nums)  # relative precision is preserved
        # u = 1 + t with t of positive valuation; invert by Newton doubling
        u_nums = [Fraction(v, self.den) / lead for v in self.nums]
        inv = [Fraction(1)]
        known = 1
        while known < rel:
            known = min(2 * known, rel)
            # inv <- inv * (2 - u * inv) to 'known' slots
            prod = _frac_mul(u_nums[:known], inv, known)
            corr = [-c for c in prod]
            corr[0] += 2
            inv = _frac_mul(inv, corr, known)
        out = FracSeries(self.N, -self.start, [c / lead for c in inv])
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return self * other.inverse()

    def nth_root(self, k: int) -> "FracSeries":
        return series_nth_root(self, k)

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "start": self.start,
            "coeffs": [[v, self.den] if self.den != 1 else [v, 1]
                       for v in self.nums],
        }

    @staticmethod
    def from_json(obj: dict) -> "FracSeries":
        coeffs = [Fraction(int(nu), int(de)) for nu, de in obj["coeffs"]]
        return FracSeries(int(obj["N"]), int(obj["start"]), coeffs)

    def __repr__(self):
        shown = []
        for k, v in enumerate(self.nums[:6]):
            if v:
                e = Fraction(self.start + k, self.N)
                shown.append(f"{Fraction(v, self.den)}*q^({e})")
        tail = " + ..." if len(self.nums) > 6 else ""
        return f"FracSeries({' + '.join(shown) or '0'}{tail}; prec={self.prec})"


def _frac_mul(a: list[Fraction], b: list[Fraction], out_len: int) -> list[Fraction]:
    # exact convolution of short-denominator Fraction lists via Kronecker
    da = 1
    for c in a:
        da = da * c.denominator // gcd(da, c.denominator)
    db = 1
    for c in b:
        db = db * c.denominator // gcd(db, c.denominator)
    ia = [int(c * da) for c in a]
    ib = [int(c * db) for c in b]
    prod = _kronecker_mul(ia, ib, out_len)
    d = da * db
    return [Fraction(v, d) for v in prod]


def series_nth_root(s: FracSeries, k: int) -> "FracSeries":
    """The unique k-th root with leading coefficient 1.

    Requires leading coefficient exactly 1 and leading exponent numerator
    divisible by k (enlarge N first for genuinely fractional-power objects).
    Computed by Newton iteration on r = s^(1/k) with exact rationals; the
    defining identity root^k = s holds to the full known precision.
    """
    if k < 2:
        raise DomainError("root order must be >= 2")
    if s.is_zero():
        raise DomainError("cannot take a root of the zero series")
    if Fraction(s.nums[0], s.den) != 1:
        raise DomainError("leading coefficient must be 1")
    if s.start % k:
        raise DomainError(
            f"leading exponent {s.start}/{s.N} is not divisible by {k}; "
            "enlarge the exponent denominator first")
    rel = len(s.nums)
    u = [Fraction(v, s.den) for v in s.nums]
    root = [Fraction(1)]
    known = 1
    while known < rel:
        known = min(2 * known, rel)
        # Newton: r <- r - (r^k - u)/(k r^(k-1)) to 'known' slots
        r = root + [Fraction(0)] * (known - len(root))
        rk1 = _frac_pow(r, k - 1, known)
        rk = _frac_mul(rk1, r, known)
        diff = [a - b for a, b in zip(rk, u[:known])]
        if all(c == 0 for c in diff):
            root = r
            continue
        denom_inv = _frac_inverse(rk1, known)
        corr = _frac_mul(diff, denom_inv, known)
        root = [a - c / k for a, c in zip(r, corr)]
    return FracSeries(s.N, s.start // k, root)


def _frac_pow(a: list[Fraction], e: int, out_len: int) -> list[Fraction]:
    result = [Fraction(1)] + [Fraction(0)] * (out_len - 1)
    base = list(a)
    while e:
        if e & 1:
            result = _frac_mul(result, base, out_len)
        e >>= 1
        if e:
            base = _frac_mul(base, base, out_len)
    return result


def _frac_inverse(a: list[Fraction], out_len: int) -> list[Fraction]:
    inv = [Fraction(1) / a[0]]
    known = 1
    while known < out_len:
        known = min(2 * known, out_len)
        prod = _frac_mul(a[:known], inv, known)
        corr = [-c for c in prod]
        corr[0] += 2
        inv = _frac_mul(inv, corr, known)
    return inv


# ---------------------------------------------------------------------------
# eta quotients and the worked expansions
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _euler_product(prec: int) -> tuple[int, ...]:
    """prod (1 - q^j) to ``prec`` integer-exponent terms, pentagonal expansion."""
    out = [0] * prec
    out[0] = 1
    j = 1
    while True:
        e1 = j * (3 * j - 1) // 2
        e2 = j * (3 * j + 1) // 2
        if e1 >= prec and e2 >= prec:
            break
        sign = -1 if j % 2 else 1
        if e1 < prec:
            out[e1] += sign
        if e2 < prec:
            out[e2] += sign
        j += 1
    return tuple(out)


def eta_quotient(spec, prec: int) -> FracSeries:
    """prod over (m, e) of eta(m z)^e, with eta = q^(1/24) prod (1 - q^j).

    ``spec`` is a list of pairs (m, e) with m >= 1 and integer e (negative
    exponents are series inversions).  ``prec`` is the number of known
    integer-exponent terms of the Euler-product part; the exponent
    denominator of the result divides 24.
    """
    if prec < 1:
        raise DomainError("prec must be >= 1")
    spec = [(int(m), int(e)) for m, e in spec]
    if any(m < 1 for m, _ in spec):
        raise DomainError("eta arguments must be positive multiples of z")
    lead24 = sum(m * e for m, e in spec)
    base = FracSeries(1, 0, _euler_product(prec))
    acc = FracSeries(1, 0, [1] + [0] * (prec - 1))
    for m, e in spec:
        if e == 0:
            continue
        part = base.substitute_power(m).truncate(prec) if m > 1 else base
        if e < 0:
            part = part.inverse()
        acc = (acc * part ** abs(e)).truncate(prec)
    g = gcd(24, abs(lead24)) or 24
    n_out = 24 // g
    spread = acc.with_denominator(n_out) if n_out > 1 else acc
    return FracSeries(n_out, spread.start + lead24 // g, spread.nums, spread.den)


def e2_series(prec: int) -> FracSeries:
    """Weight-2 Eisenstein series 1 - 24 sum sigma_1(m) q^m."""
    if prec < 1:
        raise DomainError("prec must be >= 1")
    sig = [0] * prec
    for d in range(1, prec):
        for mult in range(d, prec, d):
            sig[mult] += d
    nums = [1] + [-24 * sig[m] for m in range(1, prec)]
    return FracSeries(1, 0, nums)


def weight4_basis(prec: int) -> tuple[FracSeries, FracSeries]:
    """The basis pair (f1, f2) of cube roots of eta quotients.

    f1 = (eta(2z)^48 / (eta(z)^8 eta(4z)^16))^(1/3),
    f2 = (eta(2z)^48 / (eta(z)^16 eta(4z)^8))^(1/3).

    ``prec`` counts known coefficients in the q^(1/3) indexing, i.e. the
    accessor a_i(m) = coefficient of q^(m/3) is valid for m < prec + lead.
    Both are observed (and asserted) to have integer coefficients.
    """
    int_prec = prec // 3 + 2
    q1 = eta_quotient([(2, 48), (1, -8), (4, -16)], int_prec)
    q2 = eta_quotient([(2, 48), (1, -16), (4, -8)], int_prec)
    f1 = series_nth_root(q1.with_denominator(3), 3)
    f2 = series_nth_root(q2.with_denominator(3), 3)
    for name, f in (("f1", f1), ("f2", f2)):
        if f.den != 1:
            raise ConsistencyError(
                f"{name} developed non-integer coefficients "
                f"(denominator {f.den}); halting")
    return f1, f2


def coefficient_accessor(f: FracSeries, denominator: int = 3):
    """a(m) = integer coefficient of q^(m/denominator) in f."""
    def a(m: int) -> int:
        c = f.coeff(Fraction(m, denominator))
        if c.denominator != 1:
            raise ConsistencyError(f"coefficient a({m}) = {c} is not integral")
        return c.numerator
    return a


def eigenforms_g(prec: int) -> tuple[FracSeries, FracSeries]:
    """The eigenform combinations g_plus, g_minus.

    g_pm = g1(z) +- 18 g5(z) + 3 (g1(3z) +- 18 g5(3z)) with
    g1 = eta(z)^4 (3 E2(3z) - E2(z)) / 2 and g5 = eta(z)^2 eta(3z)^6,
    built verbatim from the combination as stated; the constant term of
    3 E2(3z) - E2(z) is 2, so g1 is normalized with unit leading
    coefficient.  The identification of these with specific Hecke eigenforms
    is exploratory: see hecke_shadow_report, which reports rather than
    asserts.  Exponent denominators are reduced as far as the support
    allows.
    """
    if prec < 30:
        raise DomainError("prec must be >= 30")
    e2 = e2_series(prec)
    comb = (e2.substitute_power(3).truncate(prec).scale(3) - e2).scale(Fraction(1, 2))
    eta4 = eta_quotient([(1, 4)], prec)
    g1 = eta4 * comb
    g5 = eta_quotient([(1, 2), (3, 6)], prec)
    g1_3 = g1.substitute_power(3)
    g5_3 = g5.substitute_power(3)
    g_plus = g1 + g5.scale(18) + g1_3.scale(3) + g5_3.scale(54)
    g_minus = g1 - g5.scale(18) + g1_3.scale(3) - g5_3.scale(54)
    # normalize to unit leading coefficient
    lead = g_plus.leading()[1]
    if lead != 1:
        g_plus = g_plus.scale(Fraction(1) / lead)
    lead = g_minus.leading()[1]
    if lead != 1:
        g_minus = g_minus.scale(Fraction(1) / lead)
    return g_plus.reduced(), g_minus.reduced()


def hecke_shadow_report(g: FracSeries, primes=(5, 7)) -> list[dict]:
    """Report a(p^2) - (a(p)^2 - p^3 a(1)) for integer-exponent coefficients.

    Informational: a failure is reported, not raised, since the printed
    eigenform combination is attributed to unpublished notes and its exact
    normalization is not pinned by any acceptance value.
    """
    out = []
    for p in primes:
        try:
            a1 = g.coeff(1)
            ap = g.coeff(p)
            ap2 = g.coeff(p * p)
            resid = ap2 - (ap * ap - p**3 * a1)
            out.append({"p": p, "a1": str(a1), "ap": str(ap),
                        "ap2": str(ap2), "residual": str(resid),
                        "holds": resid == 0})
        except CapacityError as exc:
            out.append({"p": p, "error": str(exc)})
    return out
