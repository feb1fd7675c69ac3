"""Exception hierarchy shared by every treeline module.

All failures raised on purpose derive from :class:`TreelineError`, so callers
(including the CLI) can distinguish anticipated rejections from genuine bugs.
"""


class TreelineError(Exception):
    """Base class for every error raised deliberately by this package."""


class DomainError(TreelineError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConvergenceError(TreelineError, RuntimeError):
    """A truncated evaluation could not certify the requested tolerance."""


class BracketError(TreelineError, RuntimeError):
    """A root or threshold search could not establish a sign change."""


class CapacityError(TreelineError, ValueError):
    """A request exceeds a configured size limit (vertices, edges, terms)."""


class ConsistencyError(TreelineError, RuntimeError):
    """Computed values violate an internal identity they must satisfy."""


class MonotonicityWarning(UserWarning):
    """Raised as a warning when an empirically expected ordering fails."""
