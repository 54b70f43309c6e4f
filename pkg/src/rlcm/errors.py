"""Exception hierarchy shared by every module."""


class RLCMError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(RLCMError, ValueError):
    pass


class DomainError(RLCMError, ValueError):
    """Input outside the domain of an operation (non-finite, out of range)."""


class DegenerateError(RLCMError, ValueError):
    """Degenerate coefficients, e.g. a zero leading term or zero polynomial."""


class ValidationError(RLCMError, ValueError):
    """A parameter failed validation. ``field`` names the offending field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class StateBoundError(RLCMError, ValueError):
    """Memristor state driven outside [0, d_width]."""


class IterationLimitError(RLCMError, RuntimeError):
    """An iterative solver hit its iteration cap.

    ``partial`` holds whatever had converged (eigenvalues found so far).
    """

    def __init__(self, message, partial=()):
        super().__init__(message)
        self.partial = list(partial)


class IntegrationError(RLCMError, RuntimeError):
    """Time integration blew up or left the admissible state region.

    ``state`` carries the offending state vector and ``t`` the time.
    """

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class LookupFailure(RLCMError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""
