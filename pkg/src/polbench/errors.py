"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An argument violated a documented precondition."""


class ChannelError(ContractViolation):
    """A Kraus set failed the trace-preservation check."""


class ScenarioError(ValueError):
    """A scenario description is malformed or unsupported."""
