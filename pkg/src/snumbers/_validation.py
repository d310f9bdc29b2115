"""Input validation helpers for exponents, indices and tolerances.

All integrability exponents live in ``(0, inf]``.  ``math.inf`` is a first
class value and ``1/inf`` is evaluated as exactly ``0`` everywhere through
:func:`inv`.
"""
import math
import numbers

from .exceptions import ValidationError

INF = math.inf

# relative tolerance for deciding that a computed quantity sits on a case boundary
BOUNDARY_RTOL = 1e-12


def parse_exponent(value, name):
    """Coerce ``value`` (number or ``"inf"`` token) to a float exponent."""
    if isinstance(value, str):
        token = value.strip().lower()
        if token in ("inf", "infinity", "+inf", "oo"):
            return INF
        try:
            value = float(token)
        except ValueError:
            raise ValidationError(name, f"cannot parse {value!r} as an exponent") from None
    return check_exponent(value, name)


def check_exponent(value, name):
    """Validate an exponent in ``(0, inf]`` and return it as float."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError(name, f"expected a real number, got {type(value).__name__}")
    value = float(value)
    if math.isnan(value) or not value > 0:
        raise ValidationError(name, f"must lie in (0, inf], got {value}")
    return value


def check_real(value, name, finite=True):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError(name, f"expected a real number, got {type(value).__name__}")
    value = float(value)
    if math.isnan(value) or (finite and math.isinf(value)):
        raise ValidationError(name, f"must be finite, got {value}")
    return value


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(name, f"expected an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValidationError(name, f"must be >= {minimum}, got {value}")
    return value


def inv(p):
    """Return ``1/p`` with ``1/inf == 0``."""
    return 0.0 if p == INF else 1.0 / p


def conjugate(p):
    """Conjugate exponent with the quasi-Banach convention.

    ``p/(p-1)`` for ``1 < p < inf``, ``1`` for ``p = inf`` and ``inf`` for
    ``0 < p <= 1``.
    """
    if p == INF:
        return 1.0
    if p <= 1:
        return INF
    return p / (p - 1.0)


def inv_conjugate(p):
    """``1/p'`` computed without going through ``p'`` (exact at 1 and inf)."""
    return max(0.0, 1.0 - inv(p))


def on_boundary(a, b, rtol=BOUNDARY_RTOL):
    """True when ``a`` and ``b`` agree to relative tolerance ``rtol``."""
    return math.isclose(a, b, rel_tol=rtol, abs_tol=0.0)


def format_exponent(p):
    return "inf" if p == INF else repr(float(p))
