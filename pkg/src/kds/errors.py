"""Exception hierarchy shared by all kds modules.

Each class carries a short machine-readable ``code`` used by the CLI to map
failures to exit codes and JSON error payloads.
"""

from __future__ import annotations


class KdsError(Exception):
    """Base class for all library errors."""

    code = "KdsError"
    exit_code = 4


class NotSubextremalError(KdsError):
    """The horizon polynomial does not have four distinct real roots."""

    code = "NotSubextremal"
    exit_code = 2


class ChartDomainError(KdsError):
    """A point lies outside the validity domain of the requested chart."""

    code = "ChartDomain"


class GaugeInvalidError(KdsError):
    """The gauge profile fails the spacelike-slice validation scan."""

    code = "GaugeInvalid"


class FrameMismatchError(KdsError):
    """An operation pinned to a horizon frame was called with another r0."""

    code = "FrameMismatch"


class StepFailureError(KdsError):
    """The adaptive integrator underflowed its minimum step size."""

    code = "StepFailure"


class PoleGuardError(KdsError):
    """A trajectory entered the polar guard band."""

    code = "PoleGuard"


class EmptyCharacteristicError(KdsError):
    """No real null momentum exists over the sampled base region."""

    code = "EmptyCharacteristic"


class SampleInvalidError(KdsError):
    """A certification sample violates its stated preconditions."""

    code = "SampleInvalid"


class SearchExhaustedError(KdsError):
    """The escape-constant doubling search hit its upper bound."""

    code = "SearchExhausted"


class DegenerateError(KdsError):
    """A sign classification was requested too close to the threshold."""

    code = "Degenerate"


class GridTooCoarseError(KdsError):
    """Collocation grid below the minimum supported resolution."""

    code = "GridTooCoarse"


class EigensolveFailureError(KdsError):
    """The dense eigensolver failed to return usable eigenvalues."""

    code = "EigensolveFailure"


class ZeroVectorError(KdsError):
    """A residual was requested for the zero vector."""

    code = "ZeroVector"


class ConfigError(KdsError):
    """Malformed or inconsistent run configuration."""

    code = "Config"
    exit_code = 1
