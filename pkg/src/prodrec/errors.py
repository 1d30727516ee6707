"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation's input violates a stated precondition."""


class BudgetExceeded(RuntimeError):
    """A search or enumeration ran past its configured budget."""

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget


class Cancelled(RuntimeError):
    """A long scan observed its cancellation token."""
