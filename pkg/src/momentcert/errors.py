"""Exception hierarchy shared by all modules."""


class MomentError(Exception):
    """Base class for every error raised by momentcert."""


class CoordinateRangeError(MomentError, ValueError):
    pass


class DimensionMismatchError(MomentError, ValueError):
    pass


class IndexOverflowError(MomentError, OverflowError):
    pass


class TruncationDepthError(MomentError, ValueError):
    """The degree budget of a truncated sequence is too small for the request."""


class RealityError(MomentError, ValueError):
    """A quantity that must be real carries a non-negligible imaginary part."""


class PositivityError(MomentError, ValueError):
    """A matrix or measure that must be positive is not."""


class PSDDefectError(PositivityError):
    """A block of a semispectral measure fails to be positive semidefinite."""

    def __init__(self, message, point=None, eigenvalue=None):
        super().__init__(message)
        self.point = point
        self.eigenvalue = eigenvalue


class IncompletenessError(MomentError, KeyError):
    """A measure family lacks members needed for a check."""

    def __init__(self, missing):
        self.missing = list(missing)
        names = ", ".join(str(m) for m in self.missing)
        super().__init__(f"family is missing members: {names}")

    def __str__(self):
        return self.args[0]


class InfeasibleError(MomentError, ValueError):
    """Truncated moment targets admit no positive representing measure."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InconsistencyError(InfeasibleError):
    """Zero mass with non-vanishing higher moments."""
