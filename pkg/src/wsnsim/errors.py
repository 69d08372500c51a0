"""Exception types shared across the simulator."""


class InvalidParameterError(ValueError):
    """An input violates a documented precondition (bad config, negative count)."""


class ContractViolationError(RuntimeError):
    """Internal consistency broken (e.g. debit on a dead node, bad topology)."""
