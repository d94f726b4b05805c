"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid distribution or algorithm parameters (non-positive scale, bad simplex...)."""


class UnsupportedOperationError(RuntimeError):
    """Operation not defined for this object (e.g. sampling a factor weight)."""


class ModelViolationError(RuntimeError):
    """A generative model broke the optimization-variable contract at runtime.

    Carries the offending rule id and, when produced by ``validate``, the full
    report on the ``report`` attribute.
    """

    def __init__(self, message, rule_id=None, report=None):
        super().__init__(message)
        self.rule_id = rule_id
        self.report = report


class ContractError(ValueError):
    """Caller violated an API contract (e.g. negative acquisition weight)."""


class NumericalError(RuntimeError):
    """Irrecoverable numerical failure (e.g. Cholesky after maximum jitter)."""
