"""Exception types shared across the package."""


class FactorizationError(RuntimeError):
    """Cholesky factorization failed even after jitter escalation.

    Signals numerically degenerate training data, e.g. many duplicated
    points combined with a vanishing noise level.
    """


class SafeSetError(RuntimeError):
    """The certified safe set became empty; the safety certificate is lost."""


class ConfigError(ValueError):
    """Invalid experiment configuration (bad key, section, or value)."""
