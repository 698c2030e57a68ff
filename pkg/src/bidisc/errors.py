"""Exception types shared across the toolkit."""


class BidiscError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(BidiscError):
    """Input violates a documented precondition (bad shape, non-orthogonal matrix, ...)."""


class SingularStructureError(BidiscError):
    """The linear-structure construction hit a singular matrix."""


class NotTamedError(BidiscError):
    """A structure matrix with norm >= 1 was passed where taming is required."""


class InvalidGeometryError(BidiscError):
    """Domain geometry does not admit the requested operation."""


class UnsupportedDomainError(BidiscError):
    """The domain variant is outside the operation's supported list."""


class UnboundedCandidateError(BidiscError):
    """Candidate never leaves the domain within the parameter-radius budget."""


class OutOfRegimeError(BidiscError):
    """Solver invoked outside its contraction regime."""


class DivergenceError(BidiscError):
    """Fixed-point iteration failed to converge; carries the last residual."""

    def __init__(self, message, last_increment=None, iterations=None):
        super().__init__(message)
        self.last_increment = last_increment
        self.iterations = iterations
