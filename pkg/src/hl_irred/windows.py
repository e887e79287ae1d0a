"""Exact arithmetic on windows of arithmetic progressions.

A window is Delta(m, d, k) = m (m+d) ... (m+(k-1)d) with gcd(m, d) = 1. The
module provides exact values, full prime factorizations against a prime table
(distinct-prime count omega and largest prime P included), p-adic valuations
via residue lifting (no big products), and the deletion-set construction: for
every prime dividing the window, one term of maximal valuation is deleted
(smallest index on ties; skipped when an already-deleted term achieves the
maximum), and the retained product frak_p satisfies frak_p >= m^t0 and
ord_p(frak_p) <= ord_p((k-1)!) for every p not dividing d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyRetained, TableTooSmall
from .primes import PrimeTable

TERM_LIMIT = 1 << 63  # per-term cap; keeps term arithmetic in machine range


@dataclass(frozen=True)
class APSpec:
    """A progression alpha, alpha+d, alpha+2d, ... with 1 <= alpha < d coprime."""

    alpha: int
    d: int

    def __post_init__(self):
        if not (1 <= self.alpha < self.d):
            raise ValueError(f"need 1 <= alpha < d, got alpha={self.alpha} d={self.d}")
        if math.gcd(self.alpha, self.d) != 1:
            raise ValueError(f"need gcd(alpha, d) = 1, got ({self.alpha}, {self.d})")

    def term(self, i: int) -> int:
        return self.alpha + i * self.d


@dataclass(frozen=True)
class ProductWindow:
    """k consecutive progression terms m, m+d, ..., m+(k-1)d with gcd(m,d)=1."""

    m: int
    d: int
    k: int

    def __post_init__(self):
        if self.m < 1 or self.k < 1 or self.d < 1:
            raise ValueError(f"need m, d, k >= 1; got m={self.m} d={self.d} k={self.k}")
        if math.gcd(self.m, self.d) != 1:
            raise ValueError(f"need gcd(m, d) = 1, got ({self.m}, {self.d})")
        if self.m + (self.k - 1) * self.d > TERM_LIMIT:
            raise ValueError(f"largest term exceeds the 2^63 per-term cap")

    @property
    def terms(self) -> list[int]:
        return [self.m + j * self.d for j in range(self.k)]


@dataclass(frozen=True)
class FactoredProduct:
    """Factorization of a window value: {p: e}, omega, and P (P(1) = 1)."""

    window: ProductWindow
    factors: dict
    omega: int
    max_prime: int

    @property
    def value(self) -> int:
        v = 1
        for p, e in self.factors.items():
            v *= p**e
        return v


@dataclass(frozen=True)
class DeletionSet:
    """Retained term indices i_1 < ... < i_t0 and frak_p = prod (m + i*d).

    One maximal-valuation term was deleted on behalf of each window prime
    (overlaps allowed, so t0 >= k - omega), hence frak_p >= m^t0 and
    ord_p(frak_p) <= ord_p((k-1)!) for p not dividing d.
    """

    window: ProductWindow
    retained_indices: tuple
    t0: int
    frak_p: int
    deleted: dict  # prime -> index deleted on its behalf (absent if satisfied)


def window_value(w: ProductWindow) -> int:
    v = 1
    for t in w.terms:
        v *= t
    return v


def delta(m: int, d: int, k: int) -> int:
    """Delta(m, d, k) as a bare integer, for callers without a window object."""
    v = 1
    for j in range(k):
        v *= m + j * d
    return v


def factor_window(w: ProductWindow, table: PrimeTable) -> FactoredProduct:
    """Factor the window value by per-term trial division over table primes.

    Any cofactor surviving division by primes up to sqrt(term) is itself
    prime. Raises TableTooSmall when the table cannot certify that.
    """
    top = w.m + (w.k - 1) * w.d
    if table.limit * table.limit < top:
        raise TableTooSmall(
            f"table limit {table.limit} below sqrt of largest term {top}"
        )
    factors: dict[int, int] = {}
    for t in w.terms:
        rem = t
        for p in table.primes_list:
            if p * p > rem:
                break
            while rem % p == 0:
                factors[p] = factors.get(p, 0) + 1
                rem //= p
        if rem > 1:
            factors[rem] = factors.get(rem, 0) + 1
    return FactoredProduct(
        window=w,
        factors=factors,
        omega=len(factors),
        max_prime=max(factors) if factors else 1,
    )


def ord_p_window(w: ProductWindow, p: int) -> int:
    """Valuation ord_p of the window value, without computing the product.

    For p | d the value is 0 (every term is congruent to m, coprime to p).
    Otherwise exactly one index residue mod p^e hits each prime power, found
    by lifting the root of m + j*d == 0: contributions are counted per power.
    """
    if w.d % p == 0:
        return 0
    total = 0
    pe = p
    top = w.m + (w.k - 1) * w.d
    while pe <= top:
        j0 = (-w.m * pow(w.d, -1, pe)) % pe
        if j0 >= w.k:
            break
        total += (w.k - 1 - j0) // pe + 1
        pe *= p
    return total


def _ord(value: int, p: int) -> int:
    e = 0
    while value % p == 0:
        e += 1
        value //= p
    return e


def build_deletion_set(w: ProductWindow, table: PrimeTable) -> DeletionSet:
    """Delete one maximal-ord term per window prime; return the retained set.

    Primes are processed in increasing order. If a term achieving the maximal
    ord_p is already deleted, p's requirement is satisfied and no further term
    is spent on it; otherwise the smallest-index retained term attaining the
    maximum is deleted. Raises EmptyRetained when omega >= k (t0 would be 0).
    """
    fac = factor_window(w, table)
    if fac.omega >= w.k:
        raise EmptyRetained(
            f"window m={w.m} k={w.k} has omega={fac.omega} >= k; no terms retainable"
        )
    terms = w.terms
    retained = list(range(w.k))
    deleted_set: set[int] = set()
    deleted_for: dict[int, int] = {}
    for p in sorted(fac.factors):
        ords = [_ord(t, p) for t in terms]
        m_ord = max(ords)
        if any(ords[i] == m_ord for i in deleted_set):
            continue  # an already-deleted term attains the maximum
        i = next(i for i in retained if ords[i] == m_ord)
        retained.remove(i)
        deleted_set.add(i)
        deleted_for[p] = i

    frak_p = 1
    for i in retained:
        frak_p *= terms[i]
    return DeletionSet(
        window=w,
        retained_indices=tuple(retained),
        t0=len(retained),
        frak_p=frak_p,
        deleted=deleted_for,
    )
