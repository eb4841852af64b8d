"""Exception types shared across the package."""


class ScenarioError(ValueError):
    """A scenario file or configuration failed validation."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}" if path else reason)


class ConsistencyError(RuntimeError):
    """Internal geometry or bookkeeping contradiction."""
