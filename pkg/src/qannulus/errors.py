"""Exception hierarchy shared by every module in the package."""


class QAError(Exception):
    """Base class for all errors raised by :mod:`qannulus`."""


class InvalidInputError(QAError, ValueError):
    """Raised when an argument is malformed (non-finite, wrong shape, out of range)."""


class SingularMatrixError(QAError):
    """Raised when a matrix is numerically singular."""


class NotHermitianError(QAError):
    pass


class NotPSDError(QAError):
    """Raised when a Hermitian matrix has eigenvalues below the clamp tolerance."""


class NumericFailure(QAError):
    """Raised when an iterative LAPACK routine fails to converge.

    ``diagnostics`` carries whatever was known about the input at the time.
    """

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


class NotACrossPairError(QAError):
    """Raised when ``ZW`` or ``WZ`` is not zero within tolerance."""


class MembershipError(QAError):
    """Raised when an operator pair is outside the domain it claims to belong to."""


class ConstructionFailure(QAError):
    """Raised when the dilation cannot be assembled (radicand not PSD)."""


class UnsupportedError(QAError):
    """Raised for requests with no meaning in the current model, e.g. r = inf on the annulus."""
