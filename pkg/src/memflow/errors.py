class MemflowError(Exception):
    """Base class for library errors."""


class ValidationError(MemflowError, ValueError):
    """Invalid parameters or mismatched inputs."""


class DomainError(MemflowError, ValueError):
    """Argument outside the domain of the operation."""


class SingularityError(DomainError):
    """Evaluation at a point where the quantity is unbounded."""


class UnsupportedError(MemflowError):
    """Operation not defined for this input (e.g. missing tail model)."""


class PositivityError(MemflowError, ValueError):
    """A density took a negative value where positivity is required."""

    def __init__(self, message, x=None, value=None):
        super().__init__(message)
        self.x = x
        self.value = value
