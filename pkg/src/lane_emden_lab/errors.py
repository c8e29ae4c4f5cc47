"""Exception hierarchy shared by every module."""


class LabError(Exception):
    """Base class for all errors raised by lane_emden_lab."""


class DomainError(LabError, ValueError):
    """An argument lies outside the region where a formula is defined."""


class UnsupportedError(LabError, NotImplementedError):
    """The operation exists but not for the requested order ``s``."""


class ConvergenceError(LabError, RuntimeError):
    """An iterative or adaptive routine failed to reach its tolerance.

    ``estimate`` carries the best value obtained so far, if any.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class RadialSolveError(LabError, RuntimeError):
    """The radial integrator could not continue (e.g. step-size underflow).

    ``radius`` is where it stopped and ``max_abs_u`` the largest |u_i| seen,
    which tells a steep blow-up below double resolution from other failures.
    """

    def __init__(self, message, radius=None, max_abs_u=None):
        super().__init__(message)
        self.radius = radius
        self.max_abs_u = max_abs_u
