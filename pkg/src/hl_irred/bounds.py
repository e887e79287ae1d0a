"""Certified analytic bounds used by the factor-degree exclusion pipeline.

Everything here either is exact integer/rational arithmetic or carries a
directed-rounding guarantee: a returned "upper" value is certifiably >= the
true expression and a "lower" value is <= it, so any verdict derived by
comparing against an exact quantity is sound.

Contents:
  * integer k-th roots (floor/ceil), Legendre valuations of factorials;
  * the window-count bound L(k, l) = ((k-1)! prod_{p <= p_l} p^{L0(p)})^{1/t0}
    built from the bracketing exponents h_p, together with the largest integer
    m satisfying the strict form m^{t0} < base;
  * the degenerate cut e0 = (k-1)! with the primes of d removed;
  * a prime-counting upper bound (nu/log nu)(1 + 1.2762/log nu), a factorial
    valuation lower bound, and two-sided Stirling brackets;
  * the closing inequality for large window lengths and the exact threshold
    check v0 < 10^3/(4*1.798158) - 1/2.

Floating-point paths pad results by 2^-40 relative slack, far above the
accumulated rounding error of the handful of arithmetic operations involved
(<= a few units in 2^-52); big-value paths (Stirling) run in mpmath interval
arithmetic because k! overflows IEEE doubles past k = 170.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import iv, mp, mpf

from .errors import DomainError, InvalidT0

iv.prec = 96  # interval context precision, set once; contexts are read-only after

# relative padding applied to fast float paths; dominates the true rounding error
FLOAT_PAD = 2.0**-40

DUSART_COEFF = 1.2762  # decimal constant of the pi(nu) upper bound
THRESHOLD_COEFF = Fraction(1_798_158, 10**6)  # 1.798158 exactly


def iroot_floor(n: int, r: int) -> int:
    """floor(n**(1/r)) for n >= 0, r >= 1, exact integer Newton iteration."""
    if n < 0 or r < 1:
        raise ValueError(f"need n >= 0 and r >= 1, got n={n} r={r}")
    if r == 1 or n < 2:
        return n
    x = 1 << -(-n.bit_length() // r)  # power of two >= the root
    while True:
        y = ((r - 1) * x + n // x ** (r - 1)) // r
        if y >= x:
            return x
        x = y


def iroot_ceil(n: int, r: int) -> int:
    """ceil(n**(1/r)) for n >= 0, r >= 1."""
    f = iroot_floor(n, r)
    return f if f**r == n else f + 1


def ord_factorial_exact(p: int, n: int) -> int:
    """Exact p-adic valuation of n! (Legendre sum)."""
    total, q = 0, p
    while q <= n:
        total += n // q
        q *= p
    return total


def _small_primes(count: int) -> list[int]:
    primes: list[int] = []
    c = 2
    while len(primes) < count:
        if all(c % p for p in primes):
            primes.append(c)
        c += 1
    return primes


def h_p(p: int, k: int, t0: int) -> int:
    """The bracketing exponent: floor((k-1)/p^(h+1)) <= t0 < floor((k-1)/p^h).

    Returns 0 when t0 >= floor((k-1)/p), i.e. no positive bracket exists.
    """
    if p < 2 or k < 2 or t0 < 1:
        raise ValueError(f"need p >= 2, k >= 2, t0 >= 1; got p={p} k={k} t0={t0}")
    h = 0
    while t0 < (k - 1) // p ** (h + 1):
        h += 1
    return h


@dataclass(frozen=True)
class LBoundInput:
    """Window length k, assumed distinct-prime cap t (so t0 = k - t),
    prime-cut index l (primes p_1..p_l enter the product), modulus d."""

    k: int
    t: int
    prime_cut_index: int
    d: int

    def __post_init__(self):
        if self.prime_cut_index < 1:
            raise ValueError(f"prime cut index must be >= 1, got {self.prime_cut_index}")

    @property
    def t0(self) -> int:
        return self.k - self.t


@dataclass(frozen=True)
class LBoundResult:
    """Directed upper bound for L(k, l) plus the exact per-prime detail.

    value is a Fraction >= base^(1/t0) where base = (k-1)! prod p^L0(p) =
    base_num / base_den; m_max is the largest integer m with
    m^t0 * base_den < base_num (the strict integer reading of the bound).
    """

    value: Fraction
    per_prime_L0: dict
    h_p_used: dict
    t0: int
    base_num: int
    base_den: int
    m_max: int


def L_bound(input: LBoundInput, precision_scale: int = 10**9) -> LBoundResult:
    """Evaluate the window-count bound with upward-directed rounding.

    L0(p) = min(0, h_p*t0 - sum_{u<=h_p} floor((k-1)/p^u)) for p not dividing d,
    and -ord_p((k-1)!) for p | d; both are <= 0. The root is taken by scaled
    integer arithmetic: with S = precision_scale, value = ceil-root of
    base*S^t0 divided by S, which certifiably over-approximates base^(1/t0).
    """
    k, t0, d = input.k, input.t0, input.d
    if t0 < 1:
        raise InvalidT0(f"t0 = k - t = {k} - {input.t} = {t0} must be >= 1")
    if k < 2:
        raise ValueError(f"window length must be >= 2, got {k}")

    per_prime_L0: dict[int, int] = {}
    h_used: dict[int, int] = {}
    base = Fraction(math.factorial(k - 1))
    for p in _small_primes(input.prime_cut_index):
        if d % p == 0:
            L0 = -ord_factorial_exact(p, k - 1)
        else:
            h = h_p(p, k, t0)
            h_used[p] = h
            L0 = min(0, h * t0 - sum((k - 1) // p**u for u in range(1, h + 1)))
        per_prime_L0[p] = L0
        base *= Fraction(p) ** L0

    num, den = base.numerator, base.denominator
    S = precision_scale
    q = num * S**t0 // den
    value = Fraction(iroot_ceil(q + 1, t0), S)
    m_max = iroot_floor((num - 1) // den, t0) if num > 0 else 0
    return LBoundResult(
        value=value,
        per_prime_L0=per_prime_L0,
        h_p_used=h_used,
        t0=t0,
        base_num=num,
        base_den=den,
        m_max=m_max,
    )


def e0_bound(k: int, d: int) -> int:
    """(k-1)! with every prime factor of d completely divided out; exact."""
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    n = math.factorial(k - 1)
    rem, p = d, 2
    while p * p <= rem:
        if rem % p == 0:
            n //= p ** ord_factorial_exact(p, k - 1)
            while rem % p == 0:
                rem //= p
        p += 1
    if rem > 1:
        n //= rem ** ord_factorial_exact(rem, k - 1)
    return n


def dusart_pi_upper(nu: float) -> float:
    """Upper bound for pi(nu): (nu/log nu)(1 + 1.2762/log nu), rounded upward.

    The float evaluation involves five operations each within 1 ulp, so the
    2^-40 relative pad certifies value >= the true expression.
    """
    if nu <= 1:
        raise DomainError(f"pi upper bound needs nu > 1, got {nu}")
    lg = math.log(nu)
    raw = nu / lg * (1.0 + DUSART_COEFF / lg)
    return math.nextafter(raw * (1.0 + FLOAT_PAD), math.inf)


def dusart_batch_certified(nu_arr: np.ndarray, pi_arr: np.ndarray) -> np.ndarray:
    """Vectorized certified check that the pi upper bound holds at each nu.

    Returns a bool array: True where even the padded-DOWN evaluation of the
    bound is >= the exact count, which certifies the true bound is too.
    """
    nu = np.asarray(nu_arr, dtype=np.float64)
    lg = np.log(nu)
    raw = nu / lg * (1.0 + DUSART_COEFF / lg)
    certified_lower = raw * (1.0 - FLOAT_PAD)
    return certified_lower >= np.asarray(pi_arr, dtype=np.float64)


def ord_factorial_lower(p: int, k: int) -> float:
    """Lower bound (k-p)/(p-1) - log(k-1)/log(p) for ord_p((k-1)!), rounded down."""
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    a = (k - p) / (p - 1)
    b = math.log(k - 1) / math.log(p) if k > 2 else 0.0
    raw = a - b
    pad = (abs(a) + abs(b)) * FLOAT_PAD + 2.0**-40
    return raw - pad


def ord_factorial_lower_batch(p: int, k_arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Certified (lower, upper) brackets of the same expression, vectorized.

    upper is what tests compare against the exact Legendre valuation: if
    upper <= ord then the directed-down scalar value is <= ord as well.
    """
    k = np.asarray(k_arr, dtype=np.float64)
    a = (k - p) / (p - 1)
    b = np.where(k > 2, np.log(np.maximum(k - 1, 2)) / math.log(p), 0.0)
    raw = a - b
    pad = (np.abs(a) + np.abs(b)) * FLOAT_PAD + 2.0**-40
    return raw - pad, raw + pad


def mpf_to_fraction(x) -> Fraction:
    """Exact rational value of a finite mpmath float (floats are dyadic)."""
    if not mp.isfinite(x):
        raise DomainError(f"cannot convert non-finite value {x}")
    sign, man, exp, _ = mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


def stirling_bounds(k: int) -> tuple:
    """Two-sided factorial bracket
    sqrt(2 pi k) e^-k k^k e^(1/(12k+1)) < k! < sqrt(2 pi k) e^-k k^k e^(1/(12k)),
    returned as mpmath floats with outward rounding (interval endpoints).
    mpf is used because k! overflows IEEE doubles past k = 170.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    kk = iv.mpf(k)
    common = iv.sqrt(2 * iv.pi * kk) * iv.exp(kk * iv.log(kk) - kk)
    lower = common * iv.exp(1 / (12 * kk + 1))
    upper = common * iv.exp(1 / (12 * kk))
    return lower.a, upper.b


def large_k_contradiction(k: int, v0: int) -> bool:
    """True iff log(v0*8*e) >= (4 log(v0*4k)/log(4k))(1 + 1.2762/log(4k)),
    certified by interval arithmetic (True only when the whole lhs interval
    clears the whole rhs interval). The rhs is a product of two positive
    factors each decreasing in k, so a True at k0 extends to every k >= k0.
    """
    if k < 2 or v0 < 1:
        raise ValueError(f"need k >= 2 and v0 >= 1, got k={k} v0={v0}")
    lhs = iv.log(iv.mpf(8 * v0)) + 1  # log(8 v0 e) = log(8 v0) + 1
    log4k = iv.log(iv.mpf(4 * k))
    coeff = iv.mpf(12762) / 10**4
    rhs = (4 * iv.log(iv.mpf(4 * k * v0)) / log4k) * (1 + coeff / log4k)
    return bool(lhs.a >= rhs.b)


def large_k_grid_holds(v0: int, k_lo: int, k_hi: int, samples: int = 200) -> bool:
    """Spot-check the contradiction on a geometric k-grid including endpoints.

    Belt-and-braces companion to the monotonicity argument in
    large_k_contradiction's docstring; returns True iff every sample holds.
    """
    grid = sorted(
        {k_lo, k_hi}
        | {
            min(max(int(round(k_lo * (k_hi / k_lo) ** (i / (samples - 1)))), k_lo), k_hi)
            for i in range(samples)
        }
    )
    return all(large_k_contradiction(k, v0) for k in grid)


def corollary_threshold() -> Fraction:
    """Exact value of 10^3/(4*1.798158) - 1/2."""
    return Fraction(10**3) / (4 * THRESHOLD_COEFF) - Fraction(1, 2)


def corollary_threshold_check(v0: int) -> bool:
    """True iff v0 < 10^3/(4*1.798158) - 1/2, compared exactly."""
    return Fraction(v0) < corollary_threshold()
