"""Exception hierarchy shared by every helmwave module."""


class HelmwaveError(Exception):
    """Base class for all library errors."""

    code = "error"


class DomainError(HelmwaveError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    code = "domain"


class UnsupportedOrderError(HelmwaveError, ValueError):
    """Bessel order is not a nonnegative integer or half-integer."""

    code = "unsupported_order"


class SingularityError(HelmwaveError, ValueError):
    """Evaluation requested at a kernel singularity."""

    code = "singularity"


class GeometryError(HelmwaveError, ValueError):
    """A domain description violates its invariants.

    ``index`` names the offending node when one can be identified.
    """

    code = "geometry"

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EmptyDomainError(GeometryError):
    code = "empty_domain"


class ConditioningError(HelmwaveError, ArithmeticError):
    """A Gram or interpolation matrix is too ill-conditioned to use."""

    code = "conditioning"


class UnsupportedFeatureError(HelmwaveError, NotImplementedError):
    code = "unsupported"


class ResonanceError(HelmwaveError, ArithmeticError):
    """Static forcing excites a zero-wavenumber mode; no steady state exists."""

    code = "resonance"


class ConfigError(HelmwaveError):
    """Invalid run configuration.  ``field`` is a dotted path into the config."""

    code = "config"

    def __init__(self, message, field="", code=None):
        super().__init__(message)
        self.field = field
        if code is not None:
            self.code = code
