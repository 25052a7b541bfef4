"""Exception types raised across the package.

Every error derives from :class:`LspieError`; the argument-style errors also
derive from :class:`ValueError` so generic ``except ValueError`` keeps working.
"""


class LspieError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(LspieError, ValueError):
    """An argument is outside its allowed range or has the wrong shape."""


class RankError(LspieError, ValueError):
    """More latent directions were requested than the data can support."""


class DegenerateRankError(LspieError, ValueError):
    """Whitening hit a rank-deficient covariance.

    ``null_directions`` holds the eigen-indices that were found to be null.
    """

    def __init__(self, message, null_directions=()):
        super().__init__(message)
        self.null_directions = tuple(null_directions)


class StateError(LspieError):
    """An object is in the wrong state for the requested operation."""


class DegenerateDataError(LspieError, ValueError):
    """Data has zero variance where a nonzero variance is required."""


class MetricConflictError(LspieError, KeyError):
    """A metric name is already registered."""


class UnknownMetricError(LspieError, KeyError):
    """A metric name could not be resolved."""


class MetricContractError(LspieError, ValueError):
    """A metric function returned something other than k finite values."""
