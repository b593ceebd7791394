"""Exception types shared across the package."""


class SobolNoiseError(Exception):
    """Base class for all package errors."""


class DomainError(SobolNoiseError, ValueError):
    """Model input outside its valid domain (bounds, positivity)."""


class SingularModelError(SobolNoiseError):
    """Model configuration hits a singular denominator (e.g. buckling load equals applied load)."""


class UnknownModelError(SobolNoiseError, ValueError):
    """Requested benchmark or preset id is not registered."""


class DesignError(SobolNoiseError, ValueError):
    """Invalid sampling design: shape mismatch, too few rows, budget too small."""


class DegenerateModelError(SobolNoiseError):
    """Model output is constant; sensitivity indices are undefined."""


class NoiseGuardError(SobolNoiseError):
    """Noise variance share is so close to 1 that the correction is meaningless."""


class ModelEvaluationError(SobolNoiseError):
    """A model evaluation failed (subprocess error, unparseable or non-finite output)."""


class ConfigError(SobolNoiseError, ValueError):
    """Experiment configuration file is invalid."""
