"""Independent ground truth for factor degrees via reductions modulo primes.

The polynomial under test has x^j coefficient a_j * prod_{i=j}^{n-1}(alpha+i*d)
for a profile a_0..a_n with P(|a_0 a_n|) <= 2. Factoring its reduction mod
several primes p (p not dividing the leading coefficient) gives, per prime, the
multiset of irreducible-factor degrees; true integer factor degrees lie in the
subset sums of every such multiset, so intersecting over primes yields a sound
over-approximation of the possible degrees. The target shape is
{0, 1, n-1, n}: any certified subset of that is a PASS.

Everything mod p is hand-rolled dense arithmetic over the prime field:
squarefree decomposition (p-th roots are coefficient subsampling since the
Frobenius fixes the prime field) followed by distinct-degree factorization.
No integer factorization is attempted, so a FAIL verdict would require an
exhibited forbidden-degree factor and never arises from the over-approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import LeadingVanishes, ProfileMismatch
from .windows import APSpec

PASS = "PASS"
INCONCLUSIVE = "INCONCLUSIVE"
FAIL = "FAIL"

END_COEFF_CHOICES = (1, -1, 2, -2, 4, -4)  # keeps |a_0 a_n| a power of two


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial, ascending coefficients, nonzero leading."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        if not c:
            raise ValueError("zero polynomial is not representable here")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def content_stripped(self) -> "IntPolynomial":
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return IntPolynomial(tuple(c // g for c in self.coeffs)) if g > 1 else self


@dataclass(frozen=True)
class CoefficientProfile:
    """A profile a_0..a_n with a_0 a_n != 0 and |a_0 a_n| a power of two."""

    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        if len(self.a) < 2:
            raise ValueError("profile needs at least a_0 and a_n")
        ends = abs(self.a[0] * self.a[-1])
        if ends == 0:
            raise ValueError("a_0 and a_n must be nonzero")
        if ends & (ends - 1):
            raise ValueError(f"|a_0 * a_n| = {ends} is not 1 or a power of 2")


def build_G(spec: APSpec, n: int, profile: CoefficientProfile) -> IntPolynomial:
    """Exact coefficients: x^j carries a_j * prod_{i=j}^{n-1}(alpha + i*d)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if len(profile.a) != n + 1:
        raise ProfileMismatch(f"profile has {len(profile.a)} entries, need {n + 1}")
    coeffs = []
    tail_prod = 1
    prods = [1]  # prods[t] = prod of the t largest-index terms
    for i in range(n - 1, -1, -1):
        tail_prod *= spec.term(i)
        prods.append(tail_prod)
    for j in range(n + 1):
        coeffs.append(profile.a[j] * prods[n - j])
    return IntPolynomial(tuple(coeffs))


def sample_profile(rng, n: int) -> CoefficientProfile:
    """Random admissible profile: interior uniform in [-5, 5], ends from
    {±1, ±2, ±4}."""
    a = [rng.randint(-5, 5) for _ in range(n + 1)]
    a[0] = rng.choice(END_COEFF_CHOICES)
    a[-1] = rng.choice(END_COEFF_CHOICES)
    return CoefficientProfile(a=tuple(a))


# ---- dense arithmetic over the prime field (lists, ascending, [] = zero) ----


def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _gf_mul(a: list, b: list, p: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _gf_divmod(a: list, b: list, p: int) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = a[:]
    q = [0] * max(0, len(a) - len(b) + 1)
    inv = pow(b[-1], -1, p)
    while len(r) >= len(b):
        c = r[-1] * inv % p
        d = len(r) - len(b)
        q[d] = c
        for i, bi in enumerate(b):
            r[d + i] = (r[d + i] - c * bi) % p
        _trim(r)
        if not r:
            break
    return _trim(q), r


def _monic(a: list, p: int) -> list:
    if not a or a[-1] == 1:
        return a
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def _gf_gcd(a: list, b: list, p: int) -> list:
    while b:
        a, b = b, _gf_divmod(a, b, p)[1]
    return _monic(a, p)


def _gf_pow_mod(base: list, e: int, mod: list, p: int) -> list:
    result = [1]
    base = _gf_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _gf_divmod(_gf_mul(result, base, p), mod, p)[1]
        base = _gf_divmod(_gf_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _gf_deriv(a: list, p: int) -> list:
    return _trim([(i * a[i]) % p for i in range(1, len(a))])


def _gf_sub(a: list, b: list, p: int) -> list:
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % p
    return _trim(out)


def _pth_root(a: list, p: int) -> list:
    # a = g(x^p) over the prime field, where the Frobenius is the identity
    return a[::p]


def _sqf_parts(f: list, p: int) -> list[tuple[list, int]]:
    """Squarefree decomposition in characteristic p: (g, multiplicity) pairs
    with f = unit * prod g^mult and each g squarefree."""
    f = _monic(f[:], p)
    parts = []
    e = 1
    while len(f) > 1:
        fp = _gf_deriv(f, p)
        if not fp:
            f = _pth_root(f, p)
            e *= p
            continue
        c = _gf_gcd(f, fp, p)
        w = _gf_divmod(f, c, p)[0]
        i = 1
        while len(w) > 1:
            y = _gf_gcd(w, c, p)
            z = _gf_divmod(w, y, p)[0]
            if len(z) > 1:
                parts.append((z, i * e))
            w = y
            c = _gf_divmod(c, y, p)[0]
            i += 1
        if len(c) <= 1:
            break
        f = _pth_root(c, p)
        e *= p
    return parts


def _ddf(g: list, p: int) -> list[tuple[int, int]]:
    """Distinct-degree split of squarefree monic g: (degree, count) pairs."""
    out = []
    f = g[:]
    x_poly = [0, 1]
    h = _gf_divmod(x_poly, f, p)[1]
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = _gf_pow_mod(h, p, f, p)
        gg = _gf_gcd(_gf_sub(h, x_poly, p), f, p)
        if len(gg) > 1:
            out.append((d, (len(gg) - 1) // d))
            f = _gf_divmod(f, gg, p)[0]
            if len(f) == 1:
                break
            h = _gf_divmod(h, f, p)[1]
    if len(f) > 1:
        out.append((len(f) - 1, 1))
    return out


def mod_p_degree_multiset(f: IntPolynomial, p: int) -> tuple:
    """Degrees (with multiplicity) of the irreducible factors of f mod p."""
    if f.coeffs[-1] % p == 0:
        raise LeadingVanishes(f"p={p} divides the leading coefficient")
    c = _trim([x % p for x in f.coeffs])
    if len(c) <= 1:
        return ()
    multiset = []
    for g, mult in _sqf_parts(c, p):
        for d, cnt in _ddf(g, p):
            multiset.extend([d] * (cnt * mult))
    assert sum(multiset) == f.degree, "factor degrees must add up to deg f"
    return tuple(sorted(multiset))


# ---- certification -----------------------------------------------------------


@dataclass(frozen=True)
class DegreeSet:
    """Sound over-approximation of the factor degrees of an integer polynomial.

    degree_one_reason says why 1 is still possible: "rational-root" (an actual
    root was exhibited), "unresolved" (ambiguity remains), or None (1 is not
    in the set, or n < 2 makes the question moot).
    """

    n: int
    possible: frozenset
    used_primes: tuple
    degree_one_reason: Optional[str]


def _factor_smooth(v: int, limit: int = 10**6) -> Optional[dict]:
    """Full factorization of v by trial division, or None if a cofactor
    resists primes up to `limit` and is too large to certify prime."""
    factors: dict[int, int] = {}
    if v < 0:
        v = -v
    p = 2
    while p * p <= v and p <= limit:
        while v % p == 0:
            factors[p] = factors.get(p, 0) + 1
            v //= p
        p += 1 if p == 2 else 2
    if v > 1:
        if v > limit * limit:
            return None
        factors[v] = factors.get(v, 0) + 1
    return factors


def _divisors_capped(factors: dict, cap: int) -> Optional[list]:
    divs = [1]
    for p, e in factors.items():
        out = []
        pe = 1
        for _ in range(e + 1):
            out.extend(d * pe for d in divs)
            if len(out) > cap:
                return None
            pe *= p
        divs = out
    return divs


def _scaled_eval(coeffs: tuple, r: int, s: int) -> int:
    """sum a_i r^i s^(n-i): zero iff r/s is a root (gcd(r, s) = 1)."""
    acc = coeffs[-1]
    sp = 1
    for c in reversed(coeffs[:-1]):
        sp *= s
        acc = acc * r + c * sp
    return acc


def _rational_root_status(f: IntPolynomial, cap: int = 4096) -> Optional[bool]:
    """True if f has a rational root, False if provably not, None if the
    candidate set r/s (r | a_0, s | a_n) is too large to enumerate."""
    a0, an = f.coeffs[0], f.coeffs[-1]
    if a0 == 0:
        return True  # x divides f
    fa0 = _factor_smooth(a0)
    fan = _factor_smooth(an)
    if fa0 is None or fan is None:
        return None
    r_divs = _divisors_capped(fa0, cap)
    s_divs = _divisors_capped(fan, cap)
    if r_divs is None or s_divs is None or len(r_divs) * len(s_divs) * 2 > cap:
        return None
    for s in s_divs:
        for r in r_divs:
            if math.gcd(r, s) != 1:
                continue
            if _scaled_eval(f.coeffs, r, s) == 0 or _scaled_eval(f.coeffs, -r, s) == 0:
                return True
    return False


def certify_degree_set(
    f: IntPolynomial, primes, rational_root_check: bool = True
) -> DegreeSet:
    """Intersect subset sums of mod-p factor degrees over the given primes.

    Every true integer-factor degree of f survives every intersection step
    (reduction mod p with p not dividing the leading coefficient preserves
    degrees), so the result is a sound over-approximation. A surviving 1 is
    then interrogated by the rational root test when requested: no root means
    no degree-1 factor, which also rules out degree n-1 by complement.
    """
    g = f.content_stripped()
    n = g.degree
    inter = (1 << (n + 1)) - 1
    used = []
    target = (1 << 0) | (1 << n)
    if n >= 1:
        target |= (1 << 1) | (1 << (n - 1))
    for p in primes:
        bits = 1
        for dd in mod_p_degree_multiset(g, p):
            bits |= bits << dd
        inter &= bits
        used.append(p)
        if inter | target == target:
            break  # nothing beyond {0, 1, n-1, n} survives; cannot improve
    possible = {i for i in range(n + 1) if inter >> i & 1}
    reason = None
    if n >= 1 and 1 in possible:
        if not rational_root_check:
            reason = "unresolved"
        else:
            status = _rational_root_status(g)
            if status is True:
                reason = "rational-root"
            elif status is None:
                reason = "unresolved"
            else:
                # no rational root: no degree-1 integer factor, and by
                # complement no degree n-1 factor either
                possible.discard(1)
                possible.discard(n - 1)
    return DegreeSet(
        n=n,
        possible=frozenset(possible),
        used_primes=tuple(used),
        degree_one_reason=reason,
    )


def default_primes(spec: APSpec, n: int, count: int = 12) -> tuple:
    """Smallest `count` primes dividing neither d nor any progression term
    below index n; reductions mod such primes keep every coefficient's
    progression part alive."""
    out = []
    c = 1
    while len(out) < count:
        c += 1
        if any(c % q == 0 for q in range(2, math.isqrt(c) + 1)):
            continue
        if spec.d % c == 0:
            continue
        first_hit = (-spec.alpha * pow(spec.d, -1, c)) % c
        if first_hit < n:
            continue
        out.append(c)
    return tuple(out)


def check_instance(
    spec: APSpec, n: int, profile: CoefficientProfile, primes=None
) -> str:
    """PASS iff the certified degree set is inside {0, 1, n-1, n}.

    INCONCLUSIVE otherwise: the over-approximation never convicts, and FAIL is
    reserved for an exhibited forbidden-degree integer factor, which this
    mod-p route by construction cannot produce.
    """
    if spec.alpha not in (1, 3) or spec.d != 4:
        raise ValueError(f"instance checks cover alpha in {{1,3}}, d=4; got {spec}")
    g = build_G(spec, n, profile)
    if primes is None:
        primes = default_primes(spec, n)
    ds = certify_degree_set(g, primes)
    allowed = {0, 1, ds.n - 1, ds.n}
    return PASS if ds.possible <= allowed else INCONCLUSIVE
