"""Error types shared across the package."""


class PolylifeError(Exception):
    """Base class for all package errors."""


class ConfigurationError(PolylifeError):
    """Inconsistent or invalid configuration (shapes, domains, option values)."""


class NumericalError(PolylifeError):
    """Non-finite values encountered during computation."""


class UsageError(PolylifeError):
    """An operation was called outside its valid protocol (e.g. stepping a
    finished episode)."""


class AnalysisError(PolylifeError):
    """Post-hoc analysis inputs are missing or malformed."""
