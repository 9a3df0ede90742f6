"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An argument breaks a documented precondition (shape, range, ...)."""


class SingularMatrixError(ArithmeticError):
    """A symmetric solve failed because the system is numerically singular."""


class DataError(ValueError):
    """A dataset file is missing, malformed, or violates its schema."""
