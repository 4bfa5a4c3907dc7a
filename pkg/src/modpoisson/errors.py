"""Exception types raised across the package."""


class ModPoissonError(Exception):
    """Base class for all package errors."""


class InvalidArgument(ModPoissonError, ValueError):
    pass


class TruncationNotReached(ModPoissonError):
    """An infinite product or series could not be truncated within budget."""


class ResourceLimit(ModPoissonError):
    """The requested size exceeds a documented resource bound."""


class DegenerateFrequency(ModPoissonError, ValueError):
    """A ratio was requested at a frequency where numerator and denominator vanish."""
