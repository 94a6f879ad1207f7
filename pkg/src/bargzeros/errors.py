"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration-type errors
(bad parameters, geometry that cannot hold the requested computation)
exit with 2, data errors (missing or corrupt input files) with 3.
"""


class ConfigError(ValueError):
    """Invalid configuration: parameter values violate a precondition."""


class BoundaryError(ConfigError):
    """A computation needs samples outside the stored grid."""


class DomainError(ValueError):
    """A point lies outside the domain covered by the available data."""


class SubsampleError(ValueError):
    """A grid cannot be subsampled (axis count or margin not divisible)."""


class DataError(RuntimeError):
    """Input data files are missing, malformed, or inconsistent."""
