"""Exception hierarchy shared by every module of the package."""


class UsManifoldError(Exception):
    """Base class for all package errors."""


class InvalidInput(UsManifoldError, ValueError):
    """Input contains NaN/Inf or violates a stated precondition."""


class DimensionError(UsManifoldError, ValueError):
    """Matrix shapes are inconsistent."""


class NotSymmetric(UsManifoldError, ValueError):
    """A matrix required to be symmetric (A = A^T) is not."""


class NotUnitarySymmetric(UsManifoldError, ValueError):
    """A matrix required to lie in U_s is not unitary and symmetric."""


class CayleySingular(UsManifoldError, ValueError):
    """The inverse Cayley map is undefined (eigenvalue at -1)."""


class DegenerateBaseline(UsManifoldError):
    """The low-cost baseline needs a non-zero direct link."""


class DegenerateRetraction(UsManifoldError, UserWarning):
    """Retraction target has (near) zero singular values; result not unique.

    Emitted as a warning by default so the caller still receives a point.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class FormatError(UsManifoldError, ValueError):
    """Malformed ``.cmx`` or scenario file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
