"""Exception hierarchy shared by all modules."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class ResourceLimitError(RuntimeError):
    """The requested computation exceeds a configured size limit."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge.

    Carries the best residual reached so callers can decide whether
    to retry with a larger iteration budget.
    """

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class DegenerateInputError(ValueError):
    """A statistical test received inputs with zero variance."""


class ParseError(ValueError):
    """A serialized record could not be parsed.

    ``line_number`` is 1-based and refers to the offending line of the
    input file.
    """

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class SchemaVersionError(ValueError):
    """A record declares a schema version this library does not speak."""


class ExcessFailureError(RuntimeError):
    """More than the tolerated fraction of samples failed during generation."""
