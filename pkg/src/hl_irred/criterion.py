"""Factor-degree exclusion for polynomials built on arithmetic progressions.

For the degree-n polynomial whose x^j coefficient is a_j times the partial
progression product prod_{i=j}^{n-1}(alpha + i*d), a prime p with

    p > d,  p >= min(2k, d(d-1)),
    p | prod_{j=1..k}(alpha + (n-j)d)  and  p | no  alpha + (j-1)d, j <= k

rules out any factor of degree k (for every admissible coefficient profile).
The slope oracle behind that criterion is exact: writing Delta_j for the first
j progression terms' product, a factor of degree k requires some j <= n with
ord_p(Delta_j)/j >= 1/k, so checking ord_p(Delta_j) * k < j for all j settles
it with integer arithmetic only.

The per-degree pipeline tries, in order: the direct criterion prime (largest
qualifying witness), the distinct-prime-count gap rule for k >= 7 (modulus 4
only), and the exceptional-pair scan for 2 <= k <= 6; k = 1 is always allowed
(the target theorem permits one linear factor). Every certificate embeds its
witnesses and is re-validated before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

from .errors import PrecondViolated
from .primes import PrimeTable
from .windows import APSpec, FactoredProduct, ProductWindow, factor_window


def _ord(value: int, p: int) -> int:
    e = 0
    while value % p == 0:
        e += 1
        value //= p
    return e


class TermCache:
    """Per-progression memo: term factorizations and first divisible index.

    first_hit(p) is the least i >= 0 with p | alpha + i*d (None when p | d,
    which divides no term); prime_tuple(i) lists the distinct primes of term i.
    Sharing one cache across many (n, k) queries makes range verification
    linear in the number of distinct terms instead of quadratic.
    """

    def __init__(self, spec: APSpec, table: PrimeTable):
        self.spec = spec
        self.table = table
        self._primes: dict[int, tuple] = {}
        self._first_hit: dict[int, Optional[int]] = {}

    def prime_tuple(self, i: int) -> tuple:
        got = self._primes.get(i)
        if got is None:
            t = self.spec.term(i)
            ps = []
            rem = t
            for p in self.table.primes_list:
                if p * p > rem:
                    break
                if rem % p == 0:
                    ps.append(p)
                    while rem % p == 0:
                        rem //= p
            if rem > 1:
                ps.append(rem)
            got = self._primes[i] = tuple(ps)
        return got

    def first_hit(self, p: int) -> Optional[int]:
        if p not in self._first_hit:
            if self.spec.d % p == 0:
                self._first_hit[p] = None
            else:
                self._first_hit[p] = (
                    -self.spec.alpha * pow(self.spec.d, -1, p)
                ) % p
        return self._first_hit[p]


@dataclass(frozen=True)
class LemmaTrace:
    """Witness data for the slope oracle at prime p.

    j0 is the minimal j with p | alpha + (j-1)d and l0 = (alpha + (j0-1)d)/p
    (1 <= l0 < d by minimality); both are None when p | d. worst_j attains the
    maximal slope ord_p(Delta_j)/j = worst_phi_num / worst_phi_den.
    """

    p: int
    j0: Optional[int]
    l0: Optional[int]
    worst_j: int
    worst_phi_num: int
    worst_phi_den: int


def _slope_trace(spec: APSpec, n: int, p: int) -> LemmaTrace:
    """Scan the slopes ord_p(Delta_j)/j for j <= n exactly.

    The valuation only jumps at j == j0 (mod p), and between jumps the slope
    strictly decreases, so the maximum over all j is the maximum over jumps.
    """
    if spec.d % p == 0:
        return LemmaTrace(p=p, j0=None, l0=None, worst_j=1, worst_phi_num=0, worst_phi_den=1)
    i0 = (-spec.alpha * pow(spec.d, -1, p)) % p
    j0 = i0 + 1
    l0 = spec.term(i0) // p
    assert 1 <= l0 < spec.d, f"minimal cofactor {l0} outside [1, {spec.d})"
    best_num, best_den = 0, 1
    worst_j = 1
    acc = 0
    j = j0
    while j <= n:
        acc += _ord(spec.term(j - 1), p)
        if acc * best_den > best_num * j:
            best_num, best_den, worst_j = acc, j, j
        j += p
    return LemmaTrace(
        p=p, j0=j0, l0=l0, worst_j=worst_j, worst_phi_num=best_num, worst_phi_den=best_den
    )


def phi_check(spec: APSpec, n: int, k: int, p: int) -> tuple[bool, LemmaTrace]:
    """True iff ord_p(Delta_j) * k < j for all 1 <= j <= n, exactly.

    Requires p to divide no head term alpha + (j-1)d with j <= k (that is the
    criterion's head condition); PrecondViolated otherwise. p | d is allowed:
    every slope is then 0 and the check passes trivially.
    """
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n} k={k}")
    if spec.d % p != 0:
        i0 = (-spec.alpha * pow(spec.d, -1, p)) % p
        if i0 < k:
            raise PrecondViolated(
                f"p={p} divides head term {spec.term(i0)} (index {i0} < k={k})"
            )
    trace = _slope_trace(spec, n, p)
    return trace.worst_phi_num * k < trace.worst_phi_den, trace


def find_criterion_prime(
    spec: APSpec, n: int, k: int, table: PrimeTable, cache: TermCache | None = None
) -> Optional[tuple[int, LemmaTrace]]:
    """Largest prime p > d, p >= min(2k, d(d-1)), dividing some tail term
    alpha + (n-j)d (j <= k) and no head term alpha + (j-1)d (j <= k).

    Returns (p, trace) or None. Any returned p satisfies p(d-1) > kd: its
    first divisible index is >= k, so p * l0 = alpha + i0*d > kd with l0 < d.
    """
    if not (1 <= k and 2 * k <= n):
        raise ValueError(f"need 1 <= k <= n/2, got n={n} k={k}")
    cache = cache if cache is not None else TermCache(spec, table)
    threshold = min(2 * k, spec.d * (spec.d - 1))
    cands: set[int] = set()
    for i in range(n - k, n):
        cands.update(cache.prime_tuple(i))
    while cands:
        p = max(cands)
        if p <= spec.d or p < threshold:
            break  # all remaining candidates are smaller still
        if cache.first_hit(p) >= k:
            trace = _slope_trace(spec, n, p)
            assert p * (spec.d - 1) > k * spec.d, f"witness p={p} at k={k} too small"
            return p, trace
        cands.discard(p)
    return None


@lru_cache(maxsize=None)
def omega_1(k: int, table: PrimeTable) -> int:
    """max over alpha in {1, 3} of the distinct-prime count of
    Delta(alpha, 4, k) = alpha (alpha+4) ... (alpha+4(k-1))."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    return max(
        factor_window(ProductWindow(m=a, d=4, k=k), table).omega for a in (1, 3)
    )


@dataclass(frozen=True)
class CriterionPrime:
    """Direct witness: the criterion prime and its slope trace."""

    p: int
    trace: LemmaTrace
    kind: str = field(default="criterion-prime", init=False)


@dataclass(frozen=True)
class OmegaGap:
    """Witness found because the tail window's distinct-prime count exceeds
    the head cap omega_1(k), guaranteeing a qualifying prime outside the head."""

    p: int
    trace: LemmaTrace
    omega: int
    omega_cap: int
    kind: str = field(default="omega-gap", init=False)


@dataclass(frozen=True)
class SmallCaseEmpty:
    """The scan certifies the tail start m is not an exceptional pair for this
    k (so P(window) > 4k and a criterion prime exists)."""

    scan_limit: int
    kind: str = field(default="small-case-empty", init=False)


@dataclass(frozen=True)
class LinearFactorAllowed:
    """k = 1 is permitted by the target theorem; nothing to exclude."""

    kind: str = field(default="linear-factor-allowed", init=False)


@dataclass(frozen=True)
class Undecided:
    """No rule fired; reported as a value, never treated as success."""

    n: int
    k: int
    reason: str
    kind: str = field(default="undecided", init=False)


Rule = Union[CriterionPrime, OmegaGap, SmallCaseEmpty, LinearFactorAllowed]


@dataclass(frozen=True)
class ExclusionCertificate:
    n: int
    k: int
    spec: APSpec
    rule: Rule
    verified_by_phi_oracle: bool


def _qualifying_prime(
    fac: FactoredProduct, k: int, cache: TermCache, extra_floor: int
) -> Optional[int]:
    """Largest prime of the factored tail window with p >= extra_floor,
    p >= min(2k, 12), and first divisible index >= k (head-free)."""
    for p in sorted(fac.factors, reverse=True):
        if p <= extra_floor or p < min(2 * k, 12):
            return None
        hit = cache.first_hit(p)
        if hit is not None and hit >= k:
            return p
    return None


def exclude_factor_degree(
    spec: APSpec,
    n: int,
    k: int,
    table: PrimeTable,
    scan_ctx=None,
    cache: TermCache | None = None,
) -> Union[ExclusionCertificate, Undecided]:
    """Full per-degree pipeline; returns a self-validated certificate or
    Undecided. Rules beyond the direct criterion are gated to d = 4."""
    if not (1 <= k and 2 * k <= n):
        raise ValueError(f"need 1 <= k <= n/2, got n={n} k={k}")
    if k == 1:
        return ExclusionCertificate(
            n=n, k=k, spec=spec, rule=LinearFactorAllowed(), verified_by_phi_oracle=False
        )
    cache = cache if cache is not None else TermCache(spec, table)

    found = find_criterion_prime(spec, n, k, table, cache)
    if found is not None:
        p, trace = found
        assert trace.worst_phi_num * k < trace.worst_phi_den, (
            f"slope oracle rejected criterion prime p={p} at n={n} k={k}"
        )
        return ExclusionCertificate(
            n=n, k=k, spec=spec, rule=CriterionPrime(p=p, trace=trace),
            verified_by_phi_oracle=True,
        )

    if spec.d != 4:
        return Undecided(n=n, k=k, reason="no criterion prime; pipeline needs d=4")
    m = spec.alpha + 4 * (n - k)

    if k >= 7:
        fac = factor_window(ProductWindow(m=m, d=4, k=k), table)
        cap = omega_1(k, table)
        if fac.omega > cap:
            p = _qualifying_prime(fac, k, cache, extra_floor=k)
            if p is not None:
                ok, trace = phi_check(spec, n, k, p)
                assert ok and p >= min(2 * k, 12)
                return ExclusionCertificate(
                    n=n, k=k, spec=spec,
                    rule=OmegaGap(p=p, trace=trace, omega=fac.omega, omega_cap=cap),
                    verified_by_phi_oracle=True,
                )
        return Undecided(
            n=n, k=k, reason=f"window omega {fac.omega} within cap {cap}, no witness"
        )

    # 2 <= k <= 6: the exceptional-pair scan settles it
    if scan_ctx is None:
        return Undecided(n=n, k=k, reason="no scan context for small k")
    if m > scan_ctx.horizon:
        return Undecided(n=n, k=k, reason=f"m={m} beyond scan horizon {scan_ctx.horizon}")
    if m in scan_ctx.exception_ms(k):
        return Undecided(n=n, k=k, reason=f"exceptional pair (m={m}, k={k}) unresolved")
    fac = factor_window(ProductWindow(m=m, d=4, k=k), table)
    assert fac.max_prime > 4 * k, (
        f"scan claims m={m} unexceptional at k={k} but P(window)={fac.max_prime}"
    )
    return ExclusionCertificate(
        n=n, k=k, spec=spec, rule=SmallCaseEmpty(scan_limit=scan_ctx.horizon),
        verified_by_phi_oracle=False,
    )


@dataclass(frozen=True)
class TheoremReport:
    """Per-degree certificates for one polynomial instance (all profiles)."""

    spec: APSpec
    n: int
    certificates: tuple
    undecided: int

    @property
    def ok(self) -> bool:
        return self.undecided == 0


def verify_theorem(
    spec: APSpec, n: int, table: PrimeTable, scan_ctx=None, cache: TermCache | None = None
) -> TheoremReport:
    """Run the pipeline for every k in [1, n/2]; n = 1 has nothing to exclude."""
    if spec.alpha not in (1, 3) or spec.d != 4:
        raise ValueError(f"pipeline covers alpha in {{1,3}}, d=4; got {spec}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    cache = cache if cache is not None else TermCache(spec, table)
    certs = [
        exclude_factor_degree(spec, n, k, table, scan_ctx, cache)
        for k in range(1, n // 2 + 1)
    ]
    undecided = sum(1 for c in certs if isinstance(c, Undecided))
    return TheoremReport(spec=spec, n=n, certificates=tuple(certs), undecided=undecided)


def recheck_certificate(cert: ExclusionCertificate, table: PrimeTable, scan_ctx=None) -> bool:
    """Re-validate a certificate's witnesses from scratch (fresh factorizations)."""
    spec, n, k, rule = cert.spec, cert.n, cert.k, cert.rule
    if isinstance(rule, LinearFactorAllowed):
        return k == 1
    if isinstance(rule, (CriterionPrime, OmegaGap)):
        p = rule.p
        if p <= spec.d or p < min(2 * k, spec.d * (spec.d - 1)):
            return False
        tail = [spec.term(n - j) for j in range(1, k + 1)]
        head = [spec.term(j - 1) for j in range(1, k + 1)]
        if all(t % p for t in tail) or any(h % p == 0 for h in head):
            return False
        try:
            ok, _ = phi_check(spec, n, k, p)
        except PrecondViolated:
            return False
        if isinstance(rule, OmegaGap):
            m = spec.alpha + 4 * (n - k)
            fac = factor_window(ProductWindow(m=m, d=4, k=k), table)
            if not (fac.omega == rule.omega and rule.omega > rule.omega_cap and p > k):
                return False
        return ok
    if isinstance(rule, SmallCaseEmpty):
        m = spec.alpha + 4 * (n - k)
        if scan_ctx is not None and (
            m > scan_ctx.horizon or m in scan_ctx.exception_ms(k)
        ):
            return False
        fac = factor_window(ProductWindow(m=m, d=4, k=k), table)
        return m <= rule.scan_limit and fac.max_prime > 4 * k
    return False
