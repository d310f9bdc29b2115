"""Embedding parameters, compactness and decay-exponent classification.

The embedding under study maps a polynomially weighted Besov (or
Triebel-Lizorkin) space ``A^{s1}_{p1,q1}(R^d, w_alpha)`` into the unweighted
space ``A^{s2}_{p2,q2}(R^d)``.  Its approximation, Gelfand and Kolmogorov
numbers decay like ``n^{-kappa}``; this module decides which case of the
known case tables applies and returns ``kappa`` together with a case label.

Case labels are ``"T1(...)"`` for Kolmogorov numbers, ``"T2(...)"`` for
Gelfand numbers and ``"TA(...)"`` for approximation numbers.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from ._validation import (
    INF,
    check_positive_int,
    check_real,
    format_exponent,
    inv,
    inv_conjugate,
    conjugate,
    on_boundary,
    parse_exponent,
)
from .exceptions import NotCompactError, ValidationError

__all__ = [
    "SpaceType",
    "EmbeddingParams",
    "DerivedQuantities",
    "Exponent",
    "NotCovered",
    "Equivalence",
    "EquivalenceReport",
    "Classification",
    "derive_quantities",
    "check_compact",
    "kolmogorov_exponent",
    "gelfand_exponent",
    "approximation_exponent",
    "compare_widths",
    "classify",
    "FAMILIES",
    "REASONS",
]

FAMILIES = ("approximation", "gelfand", "kolmogorov")
REASONS = ("limiting", "boundary", "outside-parameter-range", "not-compact")


class SpaceType(str, Enum):
    B = "B"
    F = "F"


@dataclass(frozen=True)
class EmbeddingParams:
    """Full parameter tuple of the embedding.

    Exponents accept ``math.inf`` or the token ``"inf"``.  Validation runs on
    construction and raises :class:`~snumbers.exceptions.ValidationError`
    naming the offending field.
    """

    s1: float
    s2: float
    p1: float
    p2: float
    q1: float
    q2: float
    alpha: float
    d: int = 1
    source_type: SpaceType = SpaceType.B
    target_type: SpaceType = SpaceType.B

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "s1", check_real(self.s1, "s1"))
        set_(self, "s2", check_real(self.s2, "s2"))
        for name in ("p1", "p2", "q1", "q2"):
            set_(self, name, parse_exponent(getattr(self, name), name))
        set_(self, "alpha", check_real(self.alpha, "alpha"))
        set_(self, "d", check_positive_int(self.d, "d"))
        for name in ("source_type", "target_type"):
            try:
                set_(self, name, SpaceType(getattr(self, name)))
            except ValueError:
                raise ValidationError(name, f"must be 'B' or 'F', got {getattr(self, name)!r}") from None
        if not self.alpha > 0:
            raise ValidationError("alpha", f"weight exponent must be > 0, got {self.alpha}")
        if not self.s2 < self.s1:
            raise ValidationError("s2", f"need s2 < s1, got s1={self.s1}, s2={self.s2}")
        if self.source_type is SpaceType.F and self.p1 == INF:
            raise ValidationError("p1", "F-type source space requires p1 < inf")
        if self.target_type is SpaceType.F and self.p2 == INF:
            raise ValidationError("p2", "F-type target space requires p2 < inf")

    @classmethod
    def from_gap(cls, delta, alpha, p1, p2, d=1, q1=2.0, q2=2.0, s2=0.0, **kwargs):
        """Build parameters from the differential gap ``delta`` instead of ``s1``."""
        p1 = parse_exponent(p1, "p1")
        p2 = parse_exponent(p2, "p2")
        s1 = s2 + delta + d * (inv(p1) - inv(p2))
        return cls(s1=s1, s2=s2, p1=p1, p2=p2, q1=q1, q2=q2, alpha=alpha, d=d, **kwargs)

    def replace(self, **changes) -> "EmbeddingParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return {
            "s1": self.s1,
            "s2": self.s2,
            "p1": format_exponent(self.p1) if self.p1 == INF else self.p1,
            "p2": format_exponent(self.p2) if self.p2 == INF else self.p2,
            "q1": format_exponent(self.q1) if self.q1 == INF else self.q1,
            "q2": format_exponent(self.q2) if self.q2 == INF else self.q2,
            "alpha": self.alpha,
            "d": self.d,
            "source_type": self.source_type.value,
            "target_type": self.target_type.value,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class DerivedQuantities:
    """Quantities derived from :class:`EmbeddingParams`.

    ``theta`` is ``None`` when ``p2 == 2`` and ``theta1`` is ``None`` when
    ``p1' == 2``; the corresponding case splits never need them there.
    """

    delta: float
    mu: float
    inv_p_tilde: float
    p_tilde: float
    theta: Optional[float]
    theta1: Optional[float]
    t: float
    p1_conj: float
    p2_conj: float

    def to_dict(self):
        out = dataclasses.asdict(self)
        for key, value in out.items():
            if value == INF:
                out[key] = "inf"
        return out


def derive_quantities(params: EmbeddingParams) -> DerivedQuantities:
    d = params.d
    i1, i2 = inv(params.p1), inv(params.p2)
    delta = params.s1 - params.s2 - d * (i1 - i2)
    mu = min(params.alpha, delta)
    inv_pt = mu / d + i1
    p_tilde = 1.0 / inv_pt if inv_pt > 0 else INF

    theta = None
    if i2 != 0.5:
        theta = (i1 - i2) / (0.5 - i2)
    ic1, ic2 = inv_conjugate(params.p1), inv_conjugate(params.p2)
    theta1 = None
    if ic1 != 0.5:
        theta1 = (ic2 - ic1) / (0.5 - ic1)
    p1c = conjugate(params.p1)
    return DerivedQuantities(
        delta=delta,
        mu=mu,
        inv_p_tilde=inv_pt,
        p_tilde=p_tilde,
        theta=theta,
        theta1=theta1,
        t=min(p1c, params.p2),
        p1_conj=p1c,
        p2_conj=conjugate(params.p2),
    )


def check_compact(params: EmbeddingParams) -> bool:
    """Compactness criterion ``min(alpha, delta) > d * max(1/p2 - 1/p1, 0)``."""
    if not params.alpha > 0:  # unreachable through the constructor, kept for duck-typed input
        raise ValidationError("alpha", "weight exponent must be > 0")
    q = derive_quantities(params)
    return q.mu > params.d * max(inv(params.p2) - inv(params.p1), 0.0)


@dataclass(frozen=True)
class Exponent:
    kappa: float
    case: str

    def to_dict(self):
        return {"kappa": self.kappa, "case": self.case}


@dataclass(frozen=True)
class NotCovered:
    reason: str

    def __post_init__(self):
        if self.reason not in REASONS:
            raise ValueError(f"unknown reason {self.reason!r}")

    def to_dict(self):
        return {"not_covered": self.reason}


Result = Union[Exponent, NotCovered]


def _result_from_dict(data) -> Result:
    if "not_covered" in data:
        return NotCovered(data["not_covered"])
    return Exponent(float(data["kappa"]), data["case"])


def _gate(params: EmbeddingParams, q: DerivedQuantities) -> Optional[NotCovered]:
    """Checks shared by all three families, in order: range, compactness, limiting."""
    i1, i2 = inv(params.p1), inv(params.p2)
    if i2 > i1:  # p2 < p1
        if on_boundary(q.inv_p_tilde, i2):
            return NotCovered("boundary")
        if q.inv_p_tilde < i2:
            return NotCovered("outside-parameter-range")
    if not check_compact(params):
        raise NotCompactError(
            f"embedding is not compact: min(alpha, delta)={q.mu:.6g} "
            f"<= d*max(1/p2-1/p1, 0)={params.d * max(i2 - i1, 0.0):.6g}"
        )
    if on_boundary(q.delta, params.alpha):
        return NotCovered("limiting")
    return None


def _split(m, threshold, above, below):
    """Pick ``above`` if ``m > threshold``, ``below`` if ``m < threshold``."""
    if on_boundary(m, threshold):
        return NotCovered("boundary")
    return above() if m > threshold else below()


def kolmogorov_exponent(params: EmbeddingParams) -> Result:
    """Decay exponent of the Kolmogorov numbers ``d_n ~ n^{-kappa}``."""
    q = derive_quantities(params)
    gate = _gate(params, q)
    if gate is not None:
        return gate
    p1, p2 = params.p1, params.p2
    i1, i2 = inv(p1), inv(p2)
    m = q.mu / params.d
    if p2 < p1:
        return Exponent(m + i1 - i2, "T1(ii)")
    if p2 <= 2 or p1 == p2:
        return Exponent(m, "T1(i)")
    if p1 < 2:
        return _split(
            m, i2,
            lambda: Exponent(m + 0.5 - i2, "T1(iii)"),
            lambda: Exponent(m * p2 / 2, "T1(iv)"),
        )
    # 2 <= p1 < p2, so p2 > 2 and theta is defined
    theta = q.theta if q.theta is not None else 0.0
    return _split(
        m, i2 * theta,
        lambda: Exponent(m + i1 - i2, "T1(v)"),
        lambda: Exponent(m * p2 / 2, "T1(vi)"),
    )


def gelfand_exponent(params: EmbeddingParams) -> Result:
    """Decay exponent of the Gelfand numbers ``c_n ~ n^{-kappa}``."""
    q = derive_quantities(params)
    gate = _gate(params, q)
    if gate is not None:
        return gate
    p1, p2 = params.p1, params.p2
    i1, i2 = inv(p1), inv(p2)
    ic1 = inv_conjugate(p1)
    m = q.mu / params.d
    if p2 < p1:
        return Exponent(m + i1 - i2, "T2(ii)")
    if p1 >= 2 or p1 == p2:
        return Exponent(m, "T2(i)")
    if p2 > 2:
        return _split(
            m, ic1,
            lambda: Exponent(m + i1 - 0.5, "T2(iii)"),
            lambda: Exponent(m * q.p1_conj / 2, "T2(iv)"),
        )
    # p1 < p2 <= 2, so p1' > 2 and theta1 is defined
    theta1 = q.theta1 if q.theta1 is not None else 0.0
    return _split(
        m, ic1 * theta1,
        lambda: Exponent(m + i1 - i2, "T2(v)"),
        lambda: Exponent(m * q.p1_conj / 2, "T2(vi)"),
    )


def approximation_exponent(params: EmbeddingParams) -> Result:
    """Decay exponent of the approximation numbers ``a_n ~ n^{-kappa}``."""
    q = derive_quantities(params)
    gate = _gate(params, q)
    if gate is not None:
        return gate
    p1, p2 = params.p1, params.p2
    i1, i2 = inv(p1), inv(p2)
    m = q.mu / params.d
    if p2 < p1:
        return Exponent(m + i1 - i2, "TA(ii)")
    if p2 <= 2 or p1 >= 2:
        return Exponent(m, "TA(i)")
    t = q.t
    it = inv(t)
    return _split(
        m, it,
        lambda: Exponent(m + 0.5 - it, "TA(iii)"),
        lambda: Exponent(m * t / 2, "TA(iv)"),
    )


_EXPONENT_OPS = {
    "approximation": approximation_exponent,
    "gelfand": gelfand_exponent,
    "kolmogorov": kolmogorov_exponent,
}


def exponent(params: EmbeddingParams, kind: str) -> Result:
    try:
        op = _EXPONENT_OPS[kind]
    except KeyError:
        raise ValidationError("kind", f"must be one of {FAMILIES}, got {kind!r}") from None
    return op(params)


@dataclass(frozen=True)
class Equivalence:
    pair: str  # "a~c", "a~d" or "c~d"
    subcase: str  # e.g. "(ii)(a)"

    def to_dict(self):
        return {"pair": self.pair, "subcase": self.subcase}


@dataclass(frozen=True)
class EquivalenceReport:
    holds: tuple = ()
    omitted: dict = field(default_factory=dict)

    def pairs(self):
        return {e.pair for e in self.holds}

    def to_dict(self):
        return {"holds": [e.to_dict() for e in self.holds], "omitted": dict(self.omitted)}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(Equivalence(**e) for e in data["holds"]), dict(data["omitted"]))


def _equivalence_subcases(params: EmbeddingParams, q: DerivedQuantities):
    """Sub-case conditions of the comparison list, keyed by pair."""
    p1, p2, d, mu = params.p1, params.p2, params.d, q.mu
    i2 = inv(p2)
    ic1 = inv_conjugate(p1)
    p1c = q.p1_conj
    small_p2 = q.inv_p_tilde > i2 and p2 <= p1  # p_tilde < p2 <= p1
    return {
        "a~c": [
            ("(i)(a)", 2 <= p1 < p2),
            ("(i)(b)", small_p2),
            ("(i)(c)", 1 <= p1 < p1c <= p2 and not on_boundary(mu / d, ic1)),
        ],
        "a~d": [
            ("(ii)(a)", p1 < p2 <= 2),
            ("(ii)(b)", small_p2),
            ("(ii)(c)", p1 < 2 < p2 <= p1c and not on_boundary(mu / d, i2)),
        ],
        "c~d": [
            ("(iii)(a)", small_p2),
            ("(iii)(b)", 1 <= p1 < p1c == p2 and not on_boundary(mu / d, i2)),
        ],
    }


_PAIR_FAMILIES = {
    "a~c": ("approximation", "gelfand"),
    "a~d": ("approximation", "kolmogorov"),
    "c~d": ("gelfand", "kolmogorov"),
}


def _compare(params, q, results) -> EquivalenceReport:
    holds, omitted = [], {}
    for pair, conditions in _equivalence_subcases(params, q).items():
        fams = _PAIR_FAMILIES[pair]
        missing = [f for f in fams if isinstance(results[f], NotCovered)]
        if missing:
            omitted[pair] = results[missing[0]].reason
            continue
        for label, ok in conditions:
            if ok:
                holds.append(Equivalence(pair, label))
                break
    return EquivalenceReport(tuple(holds), omitted)


def compare_widths(params: EmbeddingParams) -> EquivalenceReport:
    """Equivalences between the three width families that the comparison list asserts."""
    q = derive_quantities(params)
    results = {name: op(params) for name, op in _EXPONENT_OPS.items()}
    return _compare(params, q, results)


@dataclass(frozen=True)
class Classification:
    params: EmbeddingParams
    derived: DerivedQuantities
    compact: bool
    limiting: bool
    approximation: Result
    gelfand: Result
    kolmogorov: Result
    equivalences: EquivalenceReport

    def family(self, kind) -> Result:
        return getattr(self, kind)

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "derived": self.derived.to_dict(),
            "compact": self.compact,
            "limiting": self.limiting,
            "families": {k: self.family(k).to_dict() for k in FAMILIES},
            "equivalences": self.equivalences.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        params = EmbeddingParams.from_dict(data["params"])
        fams = {k: _result_from_dict(v) for k, v in data["families"].items()}
        return cls(
            params=params,
            derived=derive_quantities(params),
            compact=bool(data["compact"]),
            limiting=bool(data["limiting"]),
            equivalences=EquivalenceReport.from_dict(data["equivalences"]),
            **fams,
        )


def classify(params: EmbeddingParams) -> Classification:
    """Run the full case analysis; never raises for valid parameters."""
    q = derive_quantities(params)
    compact = check_compact(params)
    limiting = on_boundary(q.delta, params.alpha)
    results = {}
    for name, op in _EXPONENT_OPS.items():
        try:
            results[name] = op(params)
        except NotCompactError:
            results[name] = NotCovered("not-compact")
    return Classification(
        params=params,
        derived=q,
        compact=compact,
        limiting=limiting,
        equivalences=_compare(params, q, results),
        **results,
    )
