"""Degree-2 Frobenius data assembled from character sums.

At a place with residue cardinality Np, the trace T of the 2-dimensional
piece is the character sum over the residue field and the trace S2 over the
quadratic extension determines the determinant through

    D = (T^2 - S2) / 2,

with the division exact in Z[zeta_n].  Purity pins every embedding of D to
absolute value Np^2, and the Newton identity T^3 - 3*T*D for the cubic
extension sum is an independent coherence check of the whole pipeline.
Inducing the Galois orbit of quadratics X^2 - T*X + D down to Z gives the
degree-2*phi(n) integer polynomial carried by the new part at p.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .charsums import trace_sum
from .cyclotomic import (CycInt, QuadraticFactor, abs_embeddings, euler_phi,
                         galois_conjugate, induce_to_integers)
from .errors import ConsistencyError, DomainError
from .places import Place, enumerate_places, extension_place

PURITY_TOL = 1e-6


@dataclass(eq=False)
class FrobeniusDatum:
    n: int
    i: int
    place: Place
    T: CycInt
    S2: CycInt
    D: CycInt

    @property
    def quadratic(self) -> QuadraticFactor:
        return QuadraticFactor(self.T, self.D)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "i": self.i,
            "place": self.place.to_json(),
            "T": self.T.to_json(),
            "S2": self.S2.to_json(),
            "D": self.D.to_json(),
        }


def _check_purity(D: CycInt, np_sq: int, tol: float) -> float:
    worst = 0.0
    for a in abs_embeddings(D):
        worst = max(worst, abs(a - np_sq) / np_sq)
    if worst > tol:
        raise ConsistencyError(
            f"determinant purity failed: relative deviation {worst:.3g}")
    return worst


def frobenius_datum(n: int, i: int, pl: Place, method: str = "auto",
                    tol: float = PURITY_TOL) -> FrobeniusDatum:
    """Trace, extension trace and determinant of the 2-dimensional piece.

    Requires i coprime to n (the primitive pieces; non-coprime indices reduce
    to a smaller conductor and carry no separate datum).
    """
    if gcd(i, n) != 1:
        raise DomainError(f"i = {i} must be coprime to n = {n}")
    T = trace_sum(n, i, pl, method).value
    S2 = trace_sum(n, i, extension_place(pl, 2), method).value
    D = (T * T - S2).divexact_by_2()
    _check_purity(D, pl.Np * pl.Np, tol)
    return FrobeniusDatum(n, i, pl, T, S2, D)


def newton_cubic_check(d: FrobeniusDatum, method: str = "auto") -> dict:
    """The cubic-extension sum against the Newton polynomial T^3 - 3*T*D."""
    observed = trace_sum(d.n, d.i, extension_place(d.place, 3), method).value
    expected = d.T * d.T * d.T - 3 * (d.T * d.D)
    return {
        "n": d.n,
        "i": d.i,
        "p": d.place.p,
        "expected": expected.to_json(),
        "observed": observed.to_json(),
        "ok": expected == observed,
    }


def weight3_weil_verify(d: FrobeniusDatum, tol: float = PURITY_TOL) -> dict:
    """Both roots of X^2 - T X + D have absolute value Np in every embedding."""
    np_ = d.place.Np
    t_ok = all(a <= 2 * np_ + tol * max(np_, 1) for a in abs_embeddings(d.T)) \
        if not d.T.is_zero() else True
    if d.D.is_zero():
        return {"ok": False, "reason": "zero determinant"}
    d_dev = max(abs(a - np_ * np_) / (np_ * np_) for a in abs_embeddings(d.D))
    ok = t_ok and d_dev <= tol
    return {"n": d.n, "i": d.i, "p": d.place.p, "Np": np_,
            "trace_ok": t_ok, "det_deviation": d_dev, "ok": ok}


def induce_charpoly(n: int, p: int, method: str = "auto") -> dict:
    """Per-place induced integer polynomials of degree 2*phi(n), and their product.

    For each place above p a FrobeniusDatum is built for every i coprime to
    n, pairwise Galois conjugacy of the data is verified, and the orbit of
    quadratics is multiplied down to Z.  Every place must give the identical
    integer polynomial (the compatibility shadow); the product over places is
    returned alongside.
    """
    places = enumerate_places(n, p)
    units = [i for i in range(1, n) if gcd(i, n) == 1]
    per_place = []
    for pl in places:
        data = {i: frobenius_datum(n, i, pl, method) for i in units}
        base = data[units[0]]
        for i in units[1:]:
            if data[i].T != galois_conjugate(base.T, i) or \
               data[i].D != galois_conjugate(base.D, i):
                raise ConsistencyError(
                    f"datum at i={i} is not the Galois conjugate of i=1 "
                    f"(n={n}, p={p}, place {pl.index})")
        factors = [data[i].quadratic for i in units]
        per_place.append(induce_to_integers(factors))
    first = per_place[0]
    for poly in per_place[1:]:
        if poly != first:
            raise ConsistencyError(
                f"induced polynomial differs between places above p={p}")
    product = (1,)
    for poly in per_place:
        product = _int_poly_mul(product, poly)
    return {
        "n": n,
        "p": p,
        "degree": 2 * euler_phi(n),
        "per_place": [list(poly) for poly in per_place],
        "product": list(product),
    }


def _int_poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return tuple(out)
