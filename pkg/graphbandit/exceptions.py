"""Exception types raised by graphbandit."""


class GraphBanditError(Exception):
    """Base class for every error raised by the library."""


class ModelViolationError(GraphBanditError, ValueError):
    """Input violates the graphical bandit model (graph, rewards, contexts)."""


class IllegalObservationError(GraphBanditError, ValueError):
    """An observation was requested on a pair that is not an edge."""


class InvalidStateError(GraphBanditError, RuntimeError):
    """Operation is not allowed in the current state."""


class InsufficientBudgetError(GraphBanditError, ValueError):
    """Budget cannot cover one pull of every edge that must be sampled."""


class ExperimentError(GraphBanditError, RuntimeError):
    """An experiment failed; carries the repetition or file that failed."""

    def __init__(self, message, repetition=None, path=None):
        super().__init__(message)
        self.repetition = repetition
        self.path = path
