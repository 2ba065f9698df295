"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A computation failed numerically (non-convergence, guard violation)."""


class ResolutionError(NumericalError):
    """Requested output exceeds what the discretization can resolve."""


class TimeStepError(NumericalError):
    """Time step too large for the retained frequencies."""


class UBoxExit(NumericalError):
    """State left the neighborhood on which the nonlinearities are defined."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConvergenceError(NumericalError):
    """An iteration (fixed point, Newton, quadrature refinement) did not converge."""
