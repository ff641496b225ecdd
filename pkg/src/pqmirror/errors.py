"""Exception types shared across the pipeline stages."""


class PqMirrorError(Exception):
    """Base class for all pqmirror errors."""


class MissingStatistics(PqMirrorError):
    """A row group lacks min/max statistics for the filter column."""


class NotSorted(PqMirrorError):
    """The file is not sorted on the filter column; zone-map reproduction
    assumes sorted input, so this is a hard error."""


class UnsupportedType(PqMirrorError):
    """The filter column is not integer/date-representable."""


class DomainViolation(PqMirrorError):
    """A sketch value falls outside the declared public domain."""


class InvalidBudget(PqMirrorError):
    """Privacy budget share is non-positive."""


class NonConvergence(PqMirrorError):
    """The noise-scale fixed-point iteration failed to converge."""


class InvalidProfile(PqMirrorError):
    """Unknown dataset profile name."""


class WriteFailure(PqMirrorError):
    """Could not write the output Parquet file."""


class EmptyData(PqMirrorError):
    """Workload construction was given no values."""


class DivisionByZero(PqMirrorError):
    """An original pruning profile is zero; the workload is malformed."""


class InvalidConfig(PqMirrorError):
    """Experiment configuration is missing fields or inconsistent."""
