"""Exception hierarchy shared by all submodules."""


class SNumbersError(Exception):
    """Base class for every error raised by :mod:`snumbers`."""


class ValidationError(SNumbersError, ValueError):
    """A parameter violates its declared invariants.

    Parameters
    ----------
    field : str
        Name of the offending field, e.g. ``"p1"`` or ``"alpha"``.
    message : str
        Human readable explanation.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class NotApplicableError(SNumbersError, ValueError):
    """The requested formula or oracle does not cover the given exponents."""


class NotCompactError(SNumbersError, ValueError):
    """The embedding is not compact, so its widths do not tend to zero."""


class TruncationError(SNumbersError, RuntimeError):
    """The block model cannot reach the requested remainder target."""

    def __init__(self, limit, message):
        self.limit = limit
        super().__init__(message)
