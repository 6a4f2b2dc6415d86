"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A table, cap, or parameter set cannot support the requested computation."""


class CacheFormatError(ValueError):
    """A persisted cache file is malformed or violates its invariants."""


class ModelError(RuntimeError):
    """A computed probability is negative beyond roundoff tolerance."""
