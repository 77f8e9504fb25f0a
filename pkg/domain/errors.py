"""Error hierarchy shared by every layer of the margin laboratory."""


class MarginLabError(Exception):
    """Base class for all errors raised by marginlab."""
    pass


class DomainValidationError(MarginLabError, ValueError):
    """Raised when a value object violates one of its invariants."""
    pass


class DimensionMismatchError(DomainValidationError):
    """Raised when two vectors that must share a dimension do not."""

    def __init__(self, expected: int, actual: int, what: str = "vector"):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what} has dimension {actual}, expected {expected}")


class EmptySampleError(DomainValidationError):
    """Raised when a sample or support would contain no points."""
    pass


class InvalidLowerBoundConfigError(DomainValidationError):
    """Raised when a lower-bound construction cannot be realised."""
    pass


class PreconditionError(MarginLabError, ValueError):
    """Raised when an operation is called outside its precondition domain."""

    def __init__(self, operation: str, condition: str):
        self.operation = operation
        self.condition = condition
        super().__init__(f"{operation}: precondition violated: {condition}")


class EnumerationTooLargeError(PreconditionError):
    """Raised when exact grid enumeration is requested for too many dimensions."""
    pass


class UnknownCheckError(MarginLabError, KeyError):
    """Raised when a verification check name is not registered."""

    def __init__(self, name: str, known: list[str]):
        self.name = name
        self.known = known
        super().__init__(f"unknown check '{name}' (known: {', '.join(known)})")

    def __str__(self) -> str:
        return self.args[0]
