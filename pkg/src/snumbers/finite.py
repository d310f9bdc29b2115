"""s-numbers of finite-dimensional identities ``id: l_p^N -> l_q^N``.

Three sources of values are provided:

* exact closed forms where they exist (``p_dst <= p_src``),
* two-sided shape envelopes whose absolute constants are unknown; those are
  evaluated with every constant set to 1 and flagged
  ``constants_undetermined=True``,
* numerical oracles (:func:`diagonal_spectral_oracle` here and
  :func:`snumbers.oracle.subspace_search_oracle`).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from ._validation import INF, check_exponent, check_positive_int, check_real, conjugate, inv, parse_exponent
from .exceptions import NotApplicableError, ValidationError

__all__ = [
    "KINDS",
    "METHODS",
    "FiniteEmbedding",
    "DiagonalOperator",
    "WidthResult",
    "exact_width_nonincreasing",
    "kolmogorov_envelope",
    "gelfand_envelope",
    "approximation_envelope",
    "reduce_quasi_banach",
    "diagonal_spectral_oracle",
    "dual_transfer",
    "width_table",
    "width",
]

KINDS = ("approximation", "gelfand", "kolmogorov")
METHODS = ("exact-formula", "envelope", "oracle-spectral", "oracle-subspace", "reduction")


def _check_kind(kind, allowed=KINDS):
    if kind not in allowed:
        raise ValidationError("kind", f"must be one of {allowed}, got {kind!r}")
    return kind


@dataclass(frozen=True)
class FiniteEmbedding:
    """``scale * id`` from ``l_{p_src}^N`` to ``l_{p_dst}^N``."""

    N: int
    p_src: float
    p_dst: float
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "N", check_positive_int(self.N, "N"))
        object.__setattr__(self, "p_src", parse_exponent(self.p_src, "p_src"))
        object.__setattr__(self, "p_dst", parse_exponent(self.p_dst, "p_dst"))
        scale = check_real(self.scale, "scale")
        if scale < 0:
            raise ValidationError("scale", f"must be >= 0, got {scale}")
        object.__setattr__(self, "scale", scale)

    @property
    def norm(self):
        """Operator norm ``scale * N^{max(0, 1/p_dst - 1/p_src)}``."""
        return self.scale * self.N ** max(0.0, inv(self.p_dst) - inv(self.p_src))


@dataclass(frozen=True)
class DiagonalOperator:
    entries: tuple
    p: float = 2.0

    def __post_init__(self):
        entries = tuple(float(e) for e in self.entries)
        if any(not math.isfinite(e) or e < 0 for e in entries):
            raise ValidationError("entries", "must be finite and non-negative")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "p", parse_exponent(self.p, "p"))


@dataclass(frozen=True)
class WidthResult:
    """A single s-number: an exact value or a two-sided shape envelope."""

    kind: str
    n: int
    method: str
    value: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    constants_undetermined: bool = False

    @property
    def is_exact(self):
        return self.value is not None

    @property
    def bound(self):
        """Best available upper value: the exact value or the upper shape."""
        return self.value if self.value is not None else self.upper

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def _exact(kind, n, value, method="exact-formula"):
    return WidthResult(kind=kind, n=n, method=method, value=float(value))


def _envelope(kind, n, lower, upper):
    return WidthResult(
        kind=kind, n=n, method="envelope",
        lower=float(lower), upper=float(upper), constants_undetermined=True,
    )


def exact_width_nonincreasing(emb: FiniteEmbedding, n: int, kind: str = "gelfand") -> WidthResult:
    """Exact ``s_n = scale * (N - n + 1)^{1/p_dst - 1/p_src}`` for ``p_dst <= p_src``.

    Holds for approximation and Gelfand numbers in the whole quasi-Banach
    range.  Kolmogorov numbers are accepted only for ``p_dst >= 1``, where
    the same value is known to hold; for ``p_dst < 1`` it fails.
    """
    _check_kind(kind)
    n = check_positive_int(n, "n")
    if emb.p_dst > emb.p_src:
        raise NotApplicableError("exact formula needs p_dst <= p_src; use an envelope")
    if kind == "kolmogorov" and emb.p_dst < 1:
        raise NotApplicableError("no exact Kolmogorov value for p_dst < 1; use kolmogorov_envelope")
    if n > emb.N:
        return _exact(kind, n, 0.0)
    e = inv(emb.p_dst) - inv(emb.p_src)
    return _exact(kind, n, emb.scale * (emb.N - n + 1) ** e)


def _rank_zero(kind, n, N):
    return _exact(kind, n, 0.0) if n > N else None


def kolmogorov_envelope(emb: FiniteEmbedding, n: int) -> WidthResult:
    """Shape envelope for ``d_n``.

    Ranges:

    * ``p_dst <= p_src``: upper is the exact approximation number, lower is
      ``m^{1/p_dst - 1/p_src}`` with ``m = N // 2`` while ``n <= ceil(m/2) + 1``
      (``0`` beyond, where no lower shape is known);
    * ``p_dst = inf``, ``1 <= p_src < 2``: ``n^{-1/2}`` below and
      ``n^{-1/2} log(eN/n)^{3/2}`` above for ``n <= N/4``; for larger ``n`` the
      upper shape uses ``log(4eN/n)`` and the lower shape is ``0``;
    * ``p_dst = inf``, ``2 <= p_src < inf``: ``min{1, (log(1+N/(n-1))/(n-1))^{1/p_src}}``
      above and a quarter of it below.
    """
    n = check_positive_int(n, "n")
    kind = "kolmogorov"
    zero = _rank_zero(kind, n, emb.N)
    if zero is not None:
        return zero
    N, p1, p2, c = emb.N, emb.p_src, emb.p_dst, emb.scale
    if p2 <= p1:
        e = inv(p2) - inv(p1)
        upper = (N - n + 1) ** e
        m = N // 2
        # index ceil(c*m) + 1 with c = 1/2 at dimension 2m <= N
        lower = m ** e if m >= 1 and n <= math.ceil(m / 2) + 1 else 0.0
        return _envelope(kind, n, c * lower, c * upper)
    if p2 == INF and 1 <= p1 < 2:
        if n <= N / 4:
            return _envelope(kind, n, c * n ** -0.5, c * n ** -0.5 * math.log(math.e * N / n) ** 1.5)
        return _envelope(kind, n, 0.0, c * n ** -0.5 * math.log(4 * math.e * N / n) ** 1.5)
    if p2 == INF and 2 <= p1 < INF:
        if n == 1:
            base = 1.0
        else:
            base = min(1.0, (math.log(1 + N / (n - 1)) / (n - 1)) ** (1 / p1))
        return _envelope(kind, n, c * base / 4, c * base)
    if p1 < 1:
        raise NotApplicableError(
            "p_src < 1 is outside the envelope ranges; apply reduce_quasi_banach first"
        )
    raise NotApplicableError(
        f"no Kolmogorov envelope for p_src={p1}, p_dst={p2}; use the subspace oracle (N <= 6)"
    )


def _log_base(N, n):
    return min(1.0, (math.log(N / (n - 1)) + 1) / (n - 1))


def gelfand_envelope(emb: FiniteEmbedding, n: int) -> WidthResult:
    """Shape envelope for ``c_n`` with ``0 < p_src <= 1`` and ``p_src < p_dst``.

    For ``2 <= n <= N`` both sides are powers of
    ``min{1, (ln(N/(n-1)) + 1)/(n-1)}``.  When ``N == 2n`` the lower shape is
    replaced by the polynomial one known at that dimension
    (``n^{1/2 - 1/p_src}`` for ``p_dst >= 2``, ``n^{1/p_dst - 1/p_src}`` otherwise).
    ``n = 1`` returns the exact norm.
    """
    n = check_positive_int(n, "n")
    kind = "gelfand"
    N, p1, p2, c = emb.N, emb.p_src, emb.p_dst, emb.scale
    if not (p1 <= 1 and p1 < p2):
        raise NotApplicableError("gelfand_envelope needs 0 < p_src <= 1 and p_src < p_dst")
    zero = _rank_zero(kind, n, N)
    if zero is not None:
        return zero
    if n == 1:
        return _exact(kind, n, emb.norm)
    base = _log_base(N, n)
    i1, i2 = inv(p1), inv(p2)
    if p2 > 2:
        lower, upper = base ** (i1 - i2), base ** (i1 - 0.5)
    else:
        lower, upper = base ** (i1 - i2), base ** (i1 - i2)
    if N == 2 * n:
        lower = n ** (0.5 - i1) if p2 >= 2 else n ** (i2 - i1)
    return _envelope(kind, n, c * lower, c * upper)


def approximation_envelope(emb: FiniteEmbedding, n: int, lam: float = 0.5) -> WidthResult:
    """Envelope for ``a_n`` of ``l_p^N -> l_inf^N`` with ``0 < p <= 1``.

    Upper: ``1`` for ``n <= N^lam``, ``n^{-1/2}`` for ``N^lam < n <= N``.
    Lower: ``n^{-1/2}`` while ``2n <= N`` (monotonicity in the dimension), else 0.
    """
    n = check_positive_int(n, "n")
    lam = check_real(lam, "lam")
    if not 0 < lam < 1:
        raise ValidationError("lam", f"must lie in (0, 1), got {lam}")
    if not (emb.p_src <= 1 and emb.p_dst == INF):
        raise NotApplicableError("approximation_envelope needs 0 < p_src <= 1 and p_dst = inf")
    kind = "approximation"
    zero = _rank_zero(kind, n, emb.N)
    if zero is not None:
        return zero
    c = emb.scale
    upper = 1.0 if n <= emb.N ** lam else n ** -0.5
    lower = n ** -0.5 if 2 * n <= emb.N else 0.0
    return _envelope(kind, n, c * lower, c * upper)


def reduce_quasi_banach(emb: FiniteEmbedding) -> FiniteEmbedding:
    """Replace ``p_src < 1`` by ``min(1, p_dst)``; Kolmogorov numbers are unchanged."""
    if not (emb.p_src < 1 and emb.p_src < emb.p_dst):
        raise NotApplicableError("reduction needs 0 < p_src < 1 and p_src < p_dst")
    return FiniteEmbedding(emb.N, min(1.0, emb.p_dst), emb.p_dst, emb.scale)


def diagonal_spectral_oracle(op: DiagonalOperator, n: int, kind: str = "approximation") -> WidthResult:
    """n-th largest diagonal entry; all s-numbers agree with it on ``l_2``."""
    _check_kind(kind)
    n = check_positive_int(n, "n")
    if op.p != 2:
        raise NotApplicableError("the spectral identity is only used for p = 2")
    entries = sorted(op.entries, reverse=True)
    value = entries[n - 1] if n <= len(entries) else 0.0
    return _exact(kind, n, value, method="oracle-spectral")


def dual_transfer(emb: FiniteEmbedding, kind: str):
    """Adjoint embedding ``l_{p_dst'} -> l_{p_src'}`` together with the dual kind."""
    _check_kind(kind, ("gelfand", "kolmogorov"))
    if emb.p_src < 1 or emb.p_dst < 1:
        raise NotApplicableError("dual transfer is used in the Banach range p >= 1 only")
    dual_kind = "kolmogorov" if kind == "gelfand" else "gelfand"
    return FiniteEmbedding(emb.N, conjugate(emb.p_dst), conjugate(emb.p_src), emb.scale), dual_kind


def width_table(emb: FiniteEmbedding, kind: str, n_max: Optional[int] = None):
    """Exact or envelope values for ``n = 1..n_max`` (default ``N + 1``).

    Picks the exact formula when it applies, otherwise the matching envelope
    (after the quasi-Banach reduction for Kolmogorov numbers).  Envelope
    rows are replaced by their monotone hull: since ``s_n`` is non-increasing
    and bounded by the norm, ``upper_n`` becomes ``min(norm, upper_1..upper_n)``
    and ``lower_n`` becomes ``max(lower_n, lower_{n+1}, ...)``.
    """
    _check_kind(kind)
    n_max = emb.N + 1 if n_max is None else check_positive_int(n_max, "n_max")
    rows = [width(emb, n, kind) for n in range(1, n_max + 1)]
    upper = emb.norm
    for k, res in enumerate(rows):
        if not res.is_exact:
            upper = min(upper, res.upper)
            rows[k] = replace(res, upper=upper)
        else:
            upper = min(upper, res.value)
    lower = 0.0
    for k in range(len(rows) - 1, -1, -1):
        res = rows[k]
        if not res.is_exact:
            lower = max(lower, res.lower)
            rows[k] = replace(res, lower=lower)
        else:
            lower = max(lower, res.value)
    return rows


def width(emb: FiniteEmbedding, n: int, kind: str) -> WidthResult:
    """Dispatch to the exact formula or an envelope for a single index."""
    if emb.p_dst <= emb.p_src and not (kind == "kolmogorov" and emb.p_dst < 1):
        return exact_width_nonincreasing(emb, n, kind)
    if kind == "kolmogorov":
        if emb.p_src < 1 and emb.p_src < emb.p_dst:
            reduced = reduce_quasi_banach(emb)
            res = width(reduced, n, kind)
            return WidthResult(**{**res.to_dict(), "method": "reduction" if res.is_exact else res.method})
        return kolmogorov_envelope(emb, n)
    if kind == "gelfand":
        return gelfand_envelope(emb, n)
    return approximation_envelope(emb, n)
