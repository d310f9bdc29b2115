"""Decay exponents and finite-dimensional widths of weighted Besov embeddings."""
__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    NotApplicableError,
    NotCompactError,
    SNumbersError,
    TruncationError,
    ValidationError,
)
from .params import *  # noqa: E402,F401,F403
from .finite import *  # noqa: E402,F401,F403
from .oracle import *  # noqa: E402,F401,F403
from .discretization import *  # noqa: E402,F401,F403
from .rates import *  # noqa: E402,F401,F403
from . import discretization, finite, oracle, params, rates  # noqa: E402

__all__ = (
    ["SNumbersError", "ValidationError", "NotApplicableError", "NotCompactError", "TruncationError"]
    + params.__all__ + finite.__all__ + oracle.__all__ + discretization.__all__ + rates.__all__
)
