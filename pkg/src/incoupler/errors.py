"""Exception types shared across the package."""

from __future__ import annotations

__all__ = ["IncouplerError", "ConfigurationError", "DivergenceError"]


class IncouplerError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(IncouplerError):
    """Raised for invalid parameters, grids, states, or config files."""


class DivergenceError(IncouplerError):
    """Raised when a propagated field turns non-finite mid-run."""
