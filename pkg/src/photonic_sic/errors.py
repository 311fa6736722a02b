"""Exception types shared across the package."""


class SicError(Exception):
    """Base class for all simulator errors."""

    module = "core"


class ConfigurationError(SicError, ValueError):
    """A configuration violates a physical or structural constraint."""

    module = "config"


class EstimationError(SicError):
    """A delay or amplitude estimate could not be formed."""

    module = "delay-estimation"


class ConditioningError(SicError):
    """The least-squares data matrix is rank deficient."""

    module = "ls-estimator"

    def __init__(self, message, condition_number=float("inf")):
        super().__init__(message)
        self.condition_number = condition_number
