"""Exception hierarchy.

Every error raised by the library derives from :class:`DfsenseError`, so
callers can catch the whole family in one place. The CLI maps a few of
them to stable exit codes.
"""


class DfsenseError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(DfsenseError, ValueError):
    pass


class ShapeMismatch(DimensionMismatch):
    pass


class NonFinite(DfsenseError, ValueError):
    pass


class NonPositiveTime(DfsenseError, ValueError):
    pass


class InvalidStrategy(DfsenseError, ValueError):
    """A strategy violates normalization, positivity or distinctness."""


class InvalidMatrix(DfsenseError, ValueError):
    """Weight or density matrix is not symmetric/Hermitian or not PSD."""


class NonHermitian(InvalidMatrix):
    pass


class NegativeEigenvalue(InvalidMatrix):
    pass


class EmptyDfs(DfsenseError):
    """The decoherence-free subspace is the single point 0."""


class NotInDfs(DfsenseError):
    pass


class MixedAffineBlocks(DfsenseError):
    """Strategy labels do not share a single noise offset."""


class DegenerateStrategy(DfsenseError):
    """Strategy carries no weight off the zero vector."""


class NotGhzForm(DfsenseError):
    pass


class SingularQfim(DfsenseError, ArithmeticError):
    pass


class UnidentifiableSignals(SingularQfim):
    pass


class NonOrthogonalVertices(DfsenseError):
    pass


class SingularRestrictedSignal(DfsenseError, ArithmeticError):
    pass


class MaxIterations(DfsenseError):
    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class PhaseWrap(DfsenseError):
    pass
