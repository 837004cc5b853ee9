"""Exception hierarchy.

Everything raised on purpose derives from :class:`AuditError`; the CLI maps
those to exit code 2 (precondition / model failures).
"""


class AuditError(ValueError):
    """Base class for precondition and model-validity failures."""


class DimensionMismatchError(AuditError):
    pass


class SizeCapError(AuditError):
    """Instance too large for exhaustive enumeration."""


class DegenerateSampleError(AuditError):
    """Sample has zero variance."""


class UndefinedSkewnessError(DegenerateSampleError):
    pass


class ModelViolationError(AuditError):
    """Sample statistics are inconsistent with the energy-spectrum model (e.g. skewness <= 0)."""


class SingularityError(AuditError):
    pass


class EmptyDistributionError(AuditError):
    """Every bootstrap replicate failed."""

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = dict(failures or {})
