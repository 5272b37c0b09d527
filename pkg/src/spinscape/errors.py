"""Exception types shared across the package."""


class SpinscapeError(Exception):
    """Base class for every error raised by spinscape."""


class DomainError(SpinscapeError, ValueError):
    """Argument outside the domain where a quantity is defined."""


class MixtureError(SpinscapeError, ValueError):
    """Invalid mixture specification."""


class DuplicateDegree(MixtureError):
    pass


class NonPositiveWeight(MixtureError):
    pass


class NotNormalized(MixtureError):
    pass


class MixtureParseError(MixtureError):
    """Mixture text could not be turned into a valid mixture."""


class NoCriticalWeight(SpinscapeError):
    """The two-term family has no weight at which the class flips."""


class PureMixture(SpinscapeError):
    """Operation needs a genuine mixture (positive variance of the degree law)."""


class BracketFailure(SpinscapeError):
    """A root bracket that should exist could not be established."""


class UnsupportedDimension(SpinscapeError):
    pass


class EdgeRegion(SpinscapeError):
    """Point too close to the spectral edge for the asymptotic expansion."""


class EdgeWindow(SpinscapeError):
    """Energy too close to the ends of the oscillation window."""


class InconsistentClassification(SpinscapeError):
    """Numerical verdict contradicts the analytic classification (a bug)."""
