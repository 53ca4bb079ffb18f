"""
Exception hierarchy for shadowcount.
"""


class ShadowCountError(Exception):
    """Base class for all shadowcount errors."""


class GraphFormatError(ShadowCountError, ValueError):
    """Raised when an edge list cannot be parsed into a simple graph."""


class ConfigError(ShadowCountError, ValueError):
    """Raised for invalid run settings or pattern parameters."""


class EmptyShadowError(ShadowCountError):
    """Raised when sampling from a shadow whose total weight is zero."""


class OracleGuardError(ShadowCountError):
    """Raised when brute-force enumeration would exceed its size guard."""
