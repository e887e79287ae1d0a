"""Verification engine for irreducibility of quartic-progression polynomials.

The polynomials under study have x^j coefficient a_j * prod_{i=j}^{n-1}
(alpha + 4i) with alpha in {1, 3}; the target statement is that every such
polynomial (admissible profile, |a_0 a_n| with largest prime factor <= 2) is
irreducible or a linear factor times an irreducible of degree n - 1.

The package splits the argument into independently checkable pieces:

- windows: arithmetic-progression products, their factorizations, deletion sets
- primes: sieved prime tables, class gaps, exact theta sums, the envelope check
- bounds: exact/directed-rounding inequalities (L-bound, factorial valuations,
  factorial brackets, the pi upper bound, the large-k contradiction)
- criterion: the slope oracle, criterion-prime search, per-degree exclusion
  certificates, and the full pipeline
- smooth: smooth-pair scans and exceptional-case resolution
- oracle: independent mod-p factor-degree certification of random instances
- cli: batch runs emitting deterministic JSON reports

Every certificate embeds its witnesses and can be re-validated from scratch.
"""

from . import errors
from .bounds import (
    LBoundInput,
    LBoundResult,
    L_bound,
    corollary_threshold,
    corollary_threshold_check,
    dusart_pi_upper,
    e0_bound,
    h_p,
    iroot_ceil,
    iroot_floor,
    large_k_contradiction,
    large_k_grid_holds,
    ord_factorial_exact,
    ord_factorial_lower,
    stirling_bounds,
)
from .criterion import (
    ExclusionCertificate,
    LemmaTrace,
    TermCache,
    TheoremReport,
    Undecided,
    exclude_factor_degree,
    find_criterion_prime,
    omega_1,
    phi_check,
    recheck_certificate,
    verify_theorem,
)
from .oracle import (
    CoefficientProfile,
    DegreeSet,
    IntPolynomial,
    build_G,
    certify_degree_set,
    check_instance,
    default_primes,
    mod_p_degree_multiset,
)
from .primes import (
    PrimeTable,
    build_table,
    check_rr_envelope,
    corollary_mid_m,
    corollary_small_m,
    load_table,
    max_gap_in_class,
    save_table,
    theta_exact,
)
from .smooth import (
    ScanContext,
    SmoothHit,
    build_scan_context,
    gpf_sieve,
    resolve_exception,
    scan_smooth_pairs,
    small_k_exceptions,
)
from .windows import (
    APSpec,
    DeletionSet,
    FactoredProduct,
    ProductWindow,
    build_deletion_set,
    delta,
    factor_window,
    ord_p_window,
    window_value,
)

__version__ = "1.0.0"

__all__ = [
    "APSpec",
    "CoefficientProfile",
    "DegreeSet",
    "DeletionSet",
    "ExclusionCertificate",
    "FactoredProduct",
    "IntPolynomial",
    "LBoundInput",
    "LBoundResult",
    "LemmaTrace",
    "L_bound",
    "PrimeTable",
    "ProductWindow",
    "ScanContext",
    "SmoothHit",
    "TermCache",
    "TheoremReport",
    "Undecided",
    "build_G",
    "build_deletion_set",
    "build_scan_context",
    "build_table",
    "certify_degree_set",
    "check_instance",
    "check_rr_envelope",
    "corollary_mid_m",
    "corollary_small_m",
    "corollary_threshold",
    "corollary_threshold_check",
    "default_primes",
    "delta",
    "dusart_pi_upper",
    "e0_bound",
    "errors",
    "exclude_factor_degree",
    "factor_window",
    "find_criterion_prime",
    "gpf_sieve",
    "h_p",
    "iroot_ceil",
    "iroot_floor",
    "large_k_contradiction",
    "large_k_grid_holds",
    "load_table",
    "max_gap_in_class",
    "mod_p_degree_multiset",
    "omega_1",
    "ord_factorial_exact",
    "ord_factorial_lower",
    "ord_p_window",
    "phi_check",
    "recheck_certificate",
    "resolve_exception",
    "save_table",
    "scan_smooth_pairs",
    "small_k_exceptions",
    "stirling_bounds",
    "theta_exact",
    "verify_theorem",
    "window_value",
]
