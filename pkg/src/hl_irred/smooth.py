"""Exceptional-pair scan for short windows (2 <= k <= 6).

A window Delta(m, 4, k) with no prime factor above 4k defeats the direct
criterion-prime search, so those m must be enumerated. Since m(m+4) divides
every such window (k >= 2), candidates are exactly the odd m whose consecutive
pair m, m+4 is 4k-smooth; a largest-prime-factor sieve makes that test O(1)
per m, and the few survivors are confirmed against the full window.

The known outcome at the 10^6 horizon: k = 2 leaves exactly m in {21, 45}
(both resolved by the criterion prime 7), k = 3..6 leave nothing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .criterion import ExclusionCertificate, find_criterion_prime
from .criterion import CriterionPrime as _CriterionPrime
from .errors import NoWitness
from .primes import PrimeTable, build_table
from .windows import APSpec, ProductWindow, factor_window


def gpf_sieve(bound: int) -> np.ndarray:
    """Array g with g[m] = largest prime factor of m for 2 <= m <= bound,
    g[0] = g[1] = 1. Ascending overwrite: the last prime to claim m wins."""
    if bound < 1:
        raise ValueError(f"need bound >= 1, got {bound}")
    flags = np.ones(bound + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(bound**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    g = np.zeros(bound + 1, dtype=np.int32)
    for p in np.flatnonzero(flags):
        g[p::p] = p
    g[0:2] = 1
    return g


def scan_smooth_pairs(bound: int, B: int, g: np.ndarray | None = None) -> list[int]:
    """All odd m <= bound with P(m(m+4)) <= B, ascending."""
    if B < 2 or bound < 1:
        raise ValueError(f"need B >= 2 and bound >= 1, got B={B} bound={bound}")
    if g is None or len(g) < bound + 5:
        g = gpf_sieve(bound + 4)
    ms = np.arange(1, bound + 1, 2, dtype=np.int64)
    ok = (g[ms] <= B) & (g[ms + 4] <= B)
    return [int(m) for m in ms[ok]]


@dataclass(frozen=True)
class SmoothHit:
    """An odd m > 4k whose whole window Delta(m, 4, k) is 4k-smooth."""

    m: int
    k: int
    alpha: int
    n: int
    max_prime: int
    factors: dict


def _instance_of(m: int, k: int) -> tuple[int, int]:
    """Recover (alpha, n) from the tail start m = alpha + 4(n - k)."""
    alpha = m % 4
    if alpha not in (1, 3):
        raise ValueError(f"m={m} is not coprime to 4")
    return alpha, k + (m - alpha) // 4


def small_k_exceptions(
    k: int, bound: int, table: PrimeTable, g: np.ndarray | None = None
) -> list[SmoothHit]:
    """All odd m with 4k < m <= bound and P(Delta(m, 4, k)) <= 4k, ascending.

    Pair-smoothness prefilters the range; each candidate's full window is then
    factored exactly.
    """
    if not (2 <= k <= 6):
        raise ValueError(f"need 2 <= k <= 6, got {k}")
    hits = []
    for m in scan_smooth_pairs(bound, 4 * k, g):
        if m <= 4 * k:
            continue
        fac = factor_window(ProductWindow(m=m, d=4, k=k), table)
        if fac.max_prime <= 4 * k:
            alpha, n = _instance_of(m, k)
            hits.append(
                SmoothHit(
                    m=m, k=k, alpha=alpha, n=n,
                    max_prime=fac.max_prime, factors=dict(fac.factors),
                )
            )
    return hits


def resolve_exception(
    m: int, k: int, table: PrimeTable | None = None
) -> ExclusionCertificate:
    """Settle an exceptional pair by direct criterion-prime search on its
    theorem instance (alpha = m mod 4, n = k + (m - alpha)/4).

    Raises NoWitness when no prime qualifies; the known hits resolve with 7.
    """
    alpha, n = _instance_of(m, k)
    spec = APSpec(alpha=alpha, d=4)
    if table is None:
        table = build_table(max(1024, math.isqrt(m + 4 * k) + 1))
    found = find_criterion_prime(spec, n, k, table)
    if found is None:
        raise NoWitness(f"no criterion prime for exceptional pair m={m} k={k}")
    p, trace = found
    return ExclusionCertificate(
        n=n, k=k, spec=spec, rule=_CriterionPrime(p=p, trace=trace),
        verified_by_phi_oracle=trace.worst_phi_num * k < trace.worst_phi_den,
    )


@dataclass
class ScanContext:
    """Scan results shared by the exclusion pipeline: horizon and per-k hits."""

    horizon: int
    hits: dict  # k -> tuple of SmoothHit

    def exception_ms(self, k: int) -> frozenset:
        return frozenset(h.m for h in self.hits.get(k, ()))


def build_scan_context(
    bound: int, table: PrimeTable, g: np.ndarray | None = None
) -> ScanContext:
    """Run the k = 2..6 exceptional scans once and package them for reuse."""
    if g is None:
        g = gpf_sieve(bound + 4)
    return ScanContext(
        horizon=bound,
        hits={k: tuple(small_k_exceptions(k, bound, table, g)) for k in range(2, 7)},
    )


def export_csv(hits, fh, table: PrimeTable | None = None) -> None:
    """Write hits as CSV: m, k, alpha, n, max_prime, certificate_prime."""
    w = csv.writer(fh)
    w.writerow(["m", "k", "alpha", "n", "max_prime", "certificate_prime"])
    for h in hits:
        cert = resolve_exception(h.m, h.k, table)
        w.writerow([h.m, h.k, h.alpha, h.n, h.max_prime, cert.rule.p])
