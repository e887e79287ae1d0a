"""Error types shared across the verification engine.

Every failure mode that callers are expected to branch on gets its own class;
anything else surfaces as ValueError from the offending operation.
"""

from __future__ import annotations


class HlIrredError(Exception):
    """Base class for all package-specific errors."""


class TableTooSmall(HlIrredError):
    """A prime table does not cover the cutoff needed for a factorization."""


class CeilingExceedsTable(HlIrredError):
    """A gap query needs a successor prime beyond the table limit."""


class LimitTooLarge(HlIrredError):
    """A sieve limit exceeds the configured memory ceiling."""


class SampleOutOfRange(HlIrredError):
    """An envelope sample point lies outside the valid range."""


class PrecondViolated(HlIrredError):
    """The slope check was invoked with a prime dividing the head window."""


class EmptyRetained(HlIrredError):
    """Deletion would retain no terms (omega >= k); the product bound is void."""


class InvalidT0(HlIrredError):
    """A bound was requested with a non-positive retained-term count."""


class NoWitness(HlIrredError):
    """No qualifying prime exists for an exceptional (m, k) instance."""


class ProfileMismatch(HlIrredError):
    """A coefficient profile has the wrong length for the requested degree."""


class LeadingVanishes(HlIrredError):
    """Reduction mod p kills the leading coefficient; degrees are not preserved."""


class DomainError(HlIrredError):
    """An analytic bound was evaluated outside its domain of validity."""
