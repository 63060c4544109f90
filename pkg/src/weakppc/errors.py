"""Exception types raised by the library."""


class WeakPPCError(Exception):
    """Base class for all library errors."""


class InvalidArgument(WeakPPCError, ValueError):
    """A parameter violates a documented precondition."""


class ScaleOverflow(WeakPPCError, ValueError):
    """The requested window does not fit on the circle.

    Carries the offending ``s`` and the largest admissible ``s`` so that
    callers (the CLI in particular) can report the bound.
    """

    def __init__(self, message, s=None, s_max=None):
        super().__init__(message)
        self.s = s
        self.s_max = s_max


class TooFewPoints(WeakPPCError, ValueError):
    """Not enough grid points near the origin for a slope estimate."""


class NoConvergedPoints(WeakPPCError, ValueError):
    """A limit check was requested but no grid value converged."""


class GridMismatch(WeakPPCError, ValueError):
    """Two estimates were computed on different ``s`` grids."""
