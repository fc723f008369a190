"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a mathematical precondition."""


class ResourceLimitError(RuntimeError):
    """A configured size or memory budget would be exceeded."""


class IncompleteFactorizationError(RuntimeError):
    """A cofactor could not be resolved and may hide prime divisors in range."""


class CheckpointError(RuntimeError):
    """A checkpoint file is unusable (corrupt or from a different run)."""
