"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI:
  2 -> usage / configuration problems (ConfigError)
  3 -> data validation problems (DataValidationError)
  4 -> numerical degeneracy (SingularBlockError, DegenerateVarianceError)
"""


class PhtError(Exception):
    """Base class for all package-specific errors."""


class DataValidationError(PhtError):
    """Input data violates a structural precondition (shape, finiteness, labels)."""


class InsufficientSampleError(DataValidationError):
    """Too few observations for the requested leave-out computation."""


class ConfigError(PhtError):
    """Invalid configuration value or unknown configuration key."""


class SingularBlockError(PhtError):
    """A 2x2 covariance block is numerically singular.

    Attributes carry enough context to locate the offending block.
    """

    def __init__(self, message, pair=None, excluded=None):
        super().__init__(message)
        self.pair = pair
        self.excluded = excluded


class DegenerateVarianceError(PhtError):
    """A variance-scale estimate came out non-positive; the test cannot be calibrated."""


class InternalConsistencyError(PhtError):
    """A required internal piece (e.g. a projector block) is missing."""
