"""Prime tables, residue-class gap reports, and theta-sum envelopes mod 4.

The sieve is segmented and deterministic. Tables carry the primes split into the
two reduced residue classes mod 4, support an on-disk cache (flat little-endian
record file, magic "HLPT"), and back three consumers:

  * max gaps between consecutive primes in a class below a ceiling, with the
    witness pair (the gap is attributed to its lower endpoint);
  * exact theta sums over a class, checked against a two-sided envelope
    (nu/2)(1 +- 2*1.798158/sqrt(nu0)) valid for nu0 <= nu < 10^10;
  * the two product-smoothness regime checks used by the exclusion pipeline.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CeilingExceedsTable, DomainError, LimitTooLarge, SampleOutOfRange

MAGIC = b"HLPT"
FORMAT_VERSION = 1
DEFAULT_LIMIT_CEILING = 10**9

# Half-width constant of the two-sided theta envelope, exact decimal; the
# envelope nu/2 * (1 +/- 2*RR_COEFF/sqrt(nu0)) is certified below 10^10 only.
RR_COEFF = Fraction(1_798_158, 10**6)
RR_VALID_BELOW = 10**10

# (k_lo, k_hi_exclusive, m_cap, gap_bound): for k in [k_lo, k_hi) and m <= m_cap
# the class-gap bound below m_cap is gap_bound, and gap_bound < 4*(k_lo + 1), so
# a window of k terms stepping by 4 from m cannot dodge every class prime.
SMOOTH_REGIMES = (
    (6, 8, 120, 24),
    (8, 15, 250, 32),
    (15, 50, 2400, 60),
    (50, None, 10**6, 200),
)


@dataclass(eq=False)
class PrimeTable:
    """All primes up to ``limit``, with the classes 1 and 3 mod 4 split out."""

    limit: int
    primes: np.ndarray
    class1: np.ndarray
    class3: np.ndarray
    _primes_list: list | None = field(default=None, repr=False)
    _gap_cache: dict = field(default_factory=dict, repr=False)

    @property
    def primes_list(self) -> list[int]:
        """Primes as Python ints, built once; used by trial-division callers."""
        if self._primes_list is None:
            self._primes_list = [int(p) for p in self.primes]
        return self._primes_list

    def residue_class(self, l: int) -> np.ndarray:
        if l == 1:
            return self.class1
        if l == 3:
            return self.class3
        raise ValueError(f"residue class must be 1 or 3 mod 4, got {l}")

    def pi(self, nu: int) -> int:
        """Exact prime-counting value pi(nu) for nu <= limit."""
        if nu > self.limit:
            raise SampleOutOfRange(f"pi({nu}) beyond table limit {self.limit}")
        return int(np.searchsorted(self.primes, nu, side="right"))


@dataclass(frozen=True)
class GapReport:
    """Max gap between consecutive class-l primes with lower endpoint <= ceiling."""

    ceiling: int
    residue_class: int
    max_gap: int
    witness: tuple[int, int] | None
    bound: int
    holds: bool


@dataclass(frozen=True)
class ThetaSum:
    """A theta sum with a tracked absolute rounding-error budget."""

    value: float
    abs_err: float


@dataclass(frozen=True)
class EnvelopeRow:
    nu: int
    residue_class: int
    theta: float
    lower: float
    upper: float
    inside: bool


def _simple_sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def build_table(limit: int, limit_ceiling: int = DEFAULT_LIMIT_CEILING) -> PrimeTable:
    """Sieve all primes up to ``limit`` (inclusive), segmented.

    Raises LimitTooLarge above ``limit_ceiling`` (default 10^9, the memory
    budget guard) and ValueError below 2.
    """
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    if limit > limit_ceiling:
        raise LimitTooLarge(f"sieve limit {limit} exceeds ceiling {limit_ceiling}")

    base = _simple_sieve(math.isqrt(limit))
    seg_size = max(1 << 22, int(base[-1]) + 1 if len(base) else 4)
    chunks = [base[base <= limit]]
    lo = int(base[-1]) + 1 if len(base) else 2
    while lo <= limit:
        hi = min(lo + seg_size, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            start = ((lo + p - 1) // p) * p
            if start < p * p:
                start = p * p
            if start < hi:
                seg[start - lo :: p] = False
        chunks.append((np.flatnonzero(seg) + lo).astype(np.int64))
        lo = hi
    primes = np.concatenate(chunks)
    return PrimeTable(
        limit=limit,
        primes=primes,
        class1=primes[primes % 4 == 1],
        class3=primes[primes % 4 == 3],
    )


def save_table(table: PrimeTable, path: str) -> None:
    """Write the flat record file: 16-byte header, then ascending u64 primes."""
    header = struct.pack("<4sIQ", MAGIC, FORMAT_VERSION, table.limit)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(table.primes.astype("<u8").tobytes())


def load_table(path: str, limit_ceiling: int = DEFAULT_LIMIT_CEILING) -> PrimeTable:
    """Read a cache file back, validating header, bounds, and monotonicity."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise ValueError(f"{path}: truncated header")
        magic, version, limit = struct.unpack("<4sIQ", header)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        if limit > limit_ceiling:
            raise LimitTooLarge(f"{path}: cached limit {limit} exceeds ceiling")
        body = fh.read()
    if len(body) % 8:
        raise ValueError(f"{path}: record section is not a whole number of u64s")
    primes = np.frombuffer(body, dtype="<u8").astype(np.int64)
    if len(primes):
        if primes[0] < 2 or primes[-1] > limit:
            raise ValueError(f"{path}: primes out of declared range")
        if np.any(np.diff(primes) <= 0):
            raise ValueError(f"{path}: primes are not strictly ascending")
    return PrimeTable(
        limit=int(limit),
        primes=primes,
        class1=primes[primes % 4 == 1],
        class3=primes[primes % 4 == 3],
    )


def max_gap_in_class(
    table: PrimeTable, l: int, ceiling: int, bound: int | None = None
) -> GapReport:
    """Largest gap to the next class-l prime, over lower endpoints <= ceiling.

    The successor prime may exceed the ceiling; it must exist in the table,
    otherwise CeilingExceedsTable is raised (the last gap would be unclosed).
    """
    cls = table.residue_class(l)
    n_lower = int(np.searchsorted(cls, ceiling, side="right"))
    if n_lower == 0:
        return GapReport(ceiling, l, 0, None, bound or 0, True)
    if n_lower >= len(cls):
        raise CeilingExceedsTable(
            f"no class-{l} prime beyond {ceiling} in table (limit {table.limit})"
        )
    gaps = np.diff(cls[: n_lower + 1])
    i = int(np.argmax(gaps))
    max_gap = int(gaps[i])
    witness = (int(cls[i]), int(cls[i + 1]))
    holds = bound is None or max_gap <= bound
    return GapReport(ceiling, l, max_gap, witness, bound or max_gap, holds)


def theta_exact(table: PrimeTable, nu: int, l: int) -> ThetaSum:
    """Sum of log p over class-l primes p <= nu, with a tracked error budget.

    Each log is correctly rounded to within 1 ulp and the terms are combined
    with math.fsum (exactly rounded sum), so the absolute error is below
    2^-50 * theta, far inside the 2^-40 relative budget.
    """
    if nu > table.limit:
        raise SampleOutOfRange(f"theta({nu}) beyond table limit {table.limit}")
    cls = table.residue_class(l)
    cut = int(np.searchsorted(cls, nu, side="right"))
    value = math.fsum(math.log(int(p)) for p in cls[:cut])
    return ThetaSum(value=value, abs_err=abs(value) * 2.0**-50)


def _fraction_of_float(x: float) -> Fraction:
    return Fraction(x)  # exact: floats are dyadic rationals


def check_rr_envelope(
    table: PrimeTable, nu0: int, sample: list[int]
) -> list[EnvelopeRow]:
    """Check theta(nu, 4, l) against (nu/2)(1 +- 2c/sqrt(nu0)) for both classes.

    The comparison is fully certified: theta carries its rounding budget, and
    sqrt(nu0) is bracketed by scaled integer square roots so the envelope
    endpoints are exact rationals. The check uses the inner bracket (smallest
    epsilon), which is stricter than the true envelope.
    """
    if nu0 < 1:
        raise SampleOutOfRange(f"nu0 must be >= 1, got {nu0}")
    scale = 10**6
    s_hi = Fraction(math.isqrt(nu0 * scale * scale) + 1, scale)  # > sqrt(nu0)
    eps_inner = 2 * RR_COEFF / s_hi  # <= true epsilon
    rows = []
    for nu in sample:
        if nu < nu0 or nu > table.limit or nu >= RR_VALID_BELOW:
            raise SampleOutOfRange(
                f"nu={nu} outside [nu0={nu0}, min(table {table.limit}, 10^10))"
            )
        for l in (1, 3):
            th = theta_exact(table, nu, l)
            th_lo = _fraction_of_float(th.value) - _fraction_of_float(th.abs_err)
            th_hi = _fraction_of_float(th.value) + _fraction_of_float(th.abs_err)
            lower = Fraction(nu, 2) * (1 - eps_inner)
            upper = Fraction(nu, 2) * (1 + eps_inner)
            inside = lower <= th_lo and th_hi <= upper
            rows.append(
                EnvelopeRow(
                    nu=nu,
                    residue_class=l,
                    theta=th.value,
                    lower=float(lower),
                    upper=float(upper),
                    inside=inside,
                )
            )
    return rows


def corollary_small_m(table: PrimeTable, k: int, m: int) -> bool:
    """True iff (k, m) sits in a verified regime forcing P(window) >= m.

    A window of k terms m, m+4, ..., m+4(k-1) spans 4(k-1)+1 integers; if no
    class prime divides any term then some class gap below the regime cap is at
    least 4(k+1), which the verified gap bound rules out. Gap maxima are
    computed from the table on first use and cached.
    """
    for k_lo, k_hi, m_cap, gap_bound in SMOOTH_REGIMES:
        if k >= k_lo and (k_hi is None or k < k_hi):
            if not (0 < m <= m_cap):
                return False
            # structural requirement for the dodge argument at this k
            if gap_bound >= 4 * (k + 1):
                return False
            key = (m_cap, gap_bound)
            if key not in table._gap_cache:
                ok = all(
                    max_gap_in_class(table, l, m_cap, gap_bound).holds for l in (1, 3)
                )
                table._gap_cache[key] = ok
            return bool(table._gap_cache[key])
    return False


def corollary_mid_m(k: int, m: int) -> bool:
    """True iff m lies in the mid regime 10^6 < m <= 138 * 4k."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return 10**6 < m <= 138 * 4 * k
