"""Exception hierarchy shared across the solver toolkit."""


class MASolveError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteValueError(MASolveError):
    """A computation produced (or was handed) a NaN or infinity."""


class GridMismatchError(MASolveError):
    """Fields defined on different or incompatible grids were combined."""


class SingularSystemError(MASolveError):
    """The linear system factorization detected (numerical) singularity."""


class ResidualError(MASolveError):
    """A direct solve failed the post-solve residual check."""


class NotPositiveDefiniteError(MASolveError):
    """A positive definite matrix was required but not supplied."""


class NegativeRhsError(MASolveError):
    """The Monge-Ampere right-hand side is negative at an interior point."""


class NegativeRadicandError(MASolveError):
    """The fixed-point update radicand went negative with clamping disabled."""


class UnknownProblemError(MASolveError):
    """Requested test problem is not in the catalog."""


class NoExactSolutionError(MASolveError):
    """The operation requires a problem with a known exact solution."""


#: Errors that indicate a numerical failure during a solve (as opposed to a
#: configuration mistake).  The CLI maps these to its numerical-failure
#: exit code.
NUMERICAL_ERRORS = (
    NonFiniteValueError,
    SingularSystemError,
    ResidualError,
    NegativeRhsError,
    NegativeRadicandError,
)
