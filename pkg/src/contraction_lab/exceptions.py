"""Exception hierarchy shared across the package."""


class InvalidInputError(ValueError):
    """Input violates a documented precondition (shape, finiteness, range)."""


class ZeroRowError(InvalidInputError):
    """A row projection was requested for an all-zero row."""


class InvalidDiagonalError(InvalidInputError):
    """Coordinate descent hit a nonpositive diagonal entry."""


class InvalidMetricError(InvalidInputError):
    """The projection metric is not positive definite."""


class InvalidContractionError(InvalidInputError):
    """A sampled contraction has eigenvalues outside [0, 1] (mod tolerance)."""


class NonCommutingError(InvalidInputError):
    """Matrix recursion inputs do not commute."""


class InvalidWindowError(InvalidInputError):
    """A fit window contains nonpositive or missing values."""


class InvalidTruncationError(InvalidInputError):
    """Series truncation violates the geometric tail condition."""


class InconsistentSystemError(InvalidInputError):
    """The linear system has no solution within tolerance."""
