"""Exception types shared across the package."""


class RMeasureError(ValueError):
    """Base class for invalid inputs to any routine in this package."""


class StateError(RMeasureError):
    """Malformed state: wrong length, zero vector, bad qubit subset."""


class CapExceededError(RMeasureError):
    """A size limit (qubit count, enumeration size) would be exceeded."""


class SymmetryError(RMeasureError):
    """State is not invariant under qubit permutations."""


class NumericError(ArithmeticError):
    """A computed value is NaN or otherwise non-finite."""
