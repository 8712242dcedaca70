"""Exception hierarchy shared by all modules."""


class CharpolyError(Exception):
    pass


class DomainError(CharpolyError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class OutsideBulkError(DomainError):
    """Spectral centre outside the semicircle bulk |mu| < J*sqrt(2)."""


class UnsupportedOrderError(CharpolyError, ValueError):
    pass


class PreconditionError(CharpolyError, ValueError):
    pass


class DivergenceError(DomainError):
    """Requested integral diverges (e.g. a zero lower limit in the truncated form)."""


class NoDivergence(DomainError):
    """k < 1: no cluster dominates, the moment stays finite as eps -> 0."""


class FitError(CharpolyError, ValueError):
    pass


class SolverFailure(CharpolyError, RuntimeError):
    pass


class AccuracyFailure(CharpolyError, RuntimeError):
    """Tolerance not reached; carries the best value and its error estimate."""

    def __init__(self, message, value=None, abs_error=None):
        super().__init__(message)
        self.value = value
        self.abs_error = abs_error
