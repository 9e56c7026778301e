"""Exception types shared across the package."""


class ContractError(ValueError):
    """An input violates a documented precondition (shape, symmetry, range)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or produced an invalid result."""


class ResourceError(RuntimeError):
    """A requested construction exceeds the configured dimension cap."""


class RegimeError(ValueError):
    """A closed-form bound was requested outside its regime of validity.

    Attributes
    ----------
    boundary : float
        The value at the edge of the valid regime (e.g. the smallest
        tolerance for which the bound applies at the given size).
    """

    def __init__(self, message: str, boundary: float):
        super().__init__(message)
        self.boundary = boundary
