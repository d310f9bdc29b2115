"""Block model of the weighted embedding and blockwise rate verification.

The sequence-space picture splits coefficients by smoothness level ``j`` and
by dyadic weight annulus ``i`` (``2^{i-1} <= 2^{-j}|k| < 2^i``; the ball
``|k| < 2^j`` for ``i = 0``).  Each block acts as ``sigma * id`` from
``l_{p1}^{dim}`` to ``l_{p2}^{dim}`` with ``sigma = 2^{-j*delta - i*alpha}``.

Upper bounds for the assembled operator come from allotting ranks to blocks.
Block remainders are combined with a power ``rho``:

* ``"holder"`` (default): ``rho = min(r, u)`` with ``1/r = (1/p2 - 1/p1)_+``
  and ``1/u = (1/q2 - 1/q1)_+``.  A block-diagonal remainder is bounded by
  this mixed norm of its block norms, so the bound stays rigorous;
  ``rho = inf`` means the maximum.
* ``"quasi-triangle"``: ``rho = min(1, p2, q2)``, the power of the target
  quasi-norm.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ._validation import INF, check_positive_int, check_real, inv
from .exceptions import NotApplicableError, NotCompactError, TruncationError, ValidationError
from .finite import KINDS, FiniteEmbedding, width
from .params import EmbeddingParams, Exponent, check_compact, classify, derive_quantities
from .rates import PowerLawRateEstimator

__all__ = [
    "Block",
    "WeightedSequenceModel",
    "IdealNormEstimate",
    "Allocation",
    "RateFit",
    "lattice_ball_count",
    "block_dimension",
    "build_blocks",
    "split_PQ",
    "ideal_norm",
    "block_ideal_norm",
    "remainder_ideal_norm",
    "combination_power",
    "allocate_ranks",
    "exhaustive_allocation",
    "assemble_upper_bound",
    "tail_ideal_norm",
    "tail_power",
    "default_beta",
    "verify_exponent",
    "DEFAULT_GRID",
]

DEFAULT_MAX_LEVEL = 14
DEFAULT_GRID = tuple(2 ** k for k in range(4, 13))
COMBINE_MODES = ("holder", "quasi-triangle")

# largest radius exponent counted point by point, per dimension
_EXACT_COUNT_LIMIT = {2: 20, 3: 12}


# ---------------------------------------------------------------------------
# lattice counting
# ---------------------------------------------------------------------------

def _isqrt_array(m):
    """Elementwise integer square root of non-negative int64 values."""
    r = np.floor(np.sqrt(m.astype(float))).astype(np.int64)
    r -= (r * r > m)
    r += ((r + 1) * (r + 1) <= m)
    return r


def _disc_count(rsq_minus_one, radius):
    """``#{(x, y) : x^2 + y^2 <= rsq_minus_one}`` for ``|x|, |y| < radius``."""
    total = 0
    chunk = 1 << 20
    for start in range(0, radius, chunk):
        x = np.arange(start, min(radius, start + chunk), dtype=np.int64)
        rest = rsq_minus_one - x * x
        ok = rest >= 0
        cols = 2 * _isqrt_array(rest[ok]) + 1
        weights = np.where(x[ok] == 0, 1, 2)
        total += int((cols * weights).sum())
    return total


@lru_cache(maxsize=None)
def lattice_ball_count(radius_exponent: int, d: int) -> int:
    """``#{k in Z^d : |k| < 2^e}``.

    Exact in ``d = 1``, by column sums in ``d = 2`` and by disc sums in
    ``d = 3`` while the radius is small enough; the rounded ball volume
    otherwise (and always for ``d > 3``).
    """
    e = check_positive_int(radius_exponent, "radius_exponent", minimum=0)
    d = check_positive_int(d, "d")
    R = 1 << e
    if d == 1:
        return 2 * R - 1
    if d in _EXACT_COUNT_LIMIT and e <= _EXACT_COUNT_LIMIT[d]:
        top = R * R - 1
        if d == 2:
            return _disc_count(top, R)
        return sum((1 if z == 0 else 2) * _disc_count(top - z * z, R) for z in range(R))
    volume = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
    return max(1, round(volume * float(R) ** d))


def block_dimension(j: int, i: int, d: int) -> int:
    """Lattice points with ``2^{i-1} <= 2^{-j}|k| < 2^i`` (``|k| < 2^j`` for ``i = 0``)."""
    if i == 0:
        return lattice_ball_count(j, d)
    return max(1, lattice_ball_count(i + j, d) - lattice_ball_count(i + j - 1, d))


# ---------------------------------------------------------------------------
# model and blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    """``sigma * id`` on ``dim`` coefficients at level ``j``, annulus ``i``."""

    j: int
    i: int
    dim: int
    sigma: float

    @property
    def level(self):
        return self.j + self.i

    def embedding(self, p_src, p_dst) -> FiniteEmbedding:
        return FiniteEmbedding(self.dim, p_src, p_dst, scale=self.sigma)


@dataclass(frozen=True)
class WeightedSequenceModel:
    """Truncation of the block family to ``j <= J`` and ``i <= I``."""

    params: EmbeddingParams
    J: int
    I: int

    def __post_init__(self):
        if not isinstance(self.params, EmbeddingParams):
            raise ValidationError("params", "expected EmbeddingParams")
        object.__setattr__(self, "J", check_positive_int(self.J, "J", minimum=0))
        object.__setattr__(self, "I", check_positive_int(self.I, "I", minimum=0))


def build_blocks(model: WeightedSequenceModel) -> list:
    """One :class:`Block` per ``(j, i)`` with ``j <= J`` and ``i <= I``."""
    params = model.params
    if not check_compact(params):
        raise NotCompactError("the embedding is not compact; block factors do not decay")
    q = derive_quantities(params)
    return [
        Block(j, i, block_dimension(j, i, params.d), 2.0 ** (-j * q.delta - i * params.alpha))
        for j in range(model.J + 1)
        for i in range(model.I + 1)
    ]


def split_PQ(blocks: Sequence[Block], M: int):
    """Blocks with ``j + i <= M`` and the rest."""
    top = max((b.level for b in blocks), default=0)
    M = check_positive_int(M, "M", minimum=0)
    if M > top:
        raise ValidationError("M", f"must satisfy 0 <= M <= J + I = {top}")
    P = [b for b in blocks if b.level <= M]
    Q = [b for b in blocks if b.level > M]
    return P, Q


# ---------------------------------------------------------------------------
# ideal quasi-norms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdealNormEstimate:
    """``sup_n n^{1/r} s_n`` over a table, with the combining power used."""

    r: float
    kind: str
    value: float
    rho: float = 1.0
    argmax_n: Optional[int] = None

    def to_dict(self):
        out = asdict(self)
        out["rho"] = "inf" if self.rho == INF else self.rho
        return out


def ideal_norm(widths, r, kind="approximation", rho=1.0) -> IdealNormEstimate:
    """Weak-type ideal quasi-norm of a tabulated sequence ``s_1, s_2, ...``."""
    s = np.asarray(list(widths), dtype=float)
    if s.size == 0:
        raise ValidationError("widths", "table is empty")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ValidationError("widths", "must be finite and non-negative")
    if np.any(np.diff(s) > 1e-12 * max(1.0, s[0])):
        raise ValidationError("widths", "must be non-increasing")
    r = check_real(r, "r")
    if r <= 0:
        raise ValidationError("r", f"must be > 0, got {r}")
    scaled = np.arange(1, s.size + 1) ** (1.0 / r) * s
    k = int(np.argmax(scaled))
    return IdealNormEstimate(r=r, kind=kind, value=float(scaled[k]), rho=rho, argmax_n=k + 1)


def _power_sum(values, rho):
    values = [v for v in values if v > 0]
    if not values:
        return 0.0
    if rho == INF:
        return max(values)
    top = max(values)
    return top * sum((v / top) ** rho for v in values) ** (1.0 / rho)


# ---------------------------------------------------------------------------
# per-block widths
# ---------------------------------------------------------------------------

def _width_regime(p_src, p_dst, kind):
    if p_dst <= p_src:
        return "dominance" if kind == "kolmogorov" and p_dst < 1 else "exact-formula"
    return "envelope"


class _BlockWidths:
    """Upper values ``s_n(block)`` with a threshold search."""

    def __init__(self, block, p_src, p_dst, kind):
        self.block = block
        self.dim = block.dim
        self.source = _width_regime(p_src, p_dst, kind)
        self.exponent = inv(p_dst) - inv(p_src)
        if self.source != "envelope":
            self._emb = None
        else:
            self._emb = block.embedding(p_src, p_dst)
            self._kind = kind
            self._norm = self._emb.norm

    def value(self, n):
        if n > self.dim:
            return 0.0
        if self._emb is None:
            # approximation numbers bound Kolmogorov numbers from above when p_dst < 1
            return self.block.sigma * float(self.dim - n + 1) ** self.exponent
        return min(self._norm, width(self._emb, n, self._kind).bound)

    def first_index_at_most(self, t):
        """Some ``n`` with ``s_n <= t``, the smallest one in the exact regimes."""
        if t <= 0:
            return self.dim + 1
        sigma = self.block.sigma
        if self._emb is None:
            if sigma <= t:
                return 1
            if self.exponent == 0:
                return self.dim + 1
            keep = math.floor((t / sigma) ** (1.0 / self.exponent) * (1 + 1e-14))
            n = max(1, self.dim + 1 - min(keep, self.dim))
            while n > 1 and self.value(n - 1) <= t:
                n -= 1
            while self.value(n) > t:
                n += 1
            return n
        lo, hi = 0, self.dim + 1
        if self.value(1) <= t:
            return 1
        lo = 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.value(mid) <= t:
                hi = mid
            else:
                lo = mid
        return hi

    def sup_weighted(self, r):
        """``sup_n n^{1/r} s_n``, analytic in the exact regimes."""
        if self._emb is None:
            a, e = 1.0 / r, self.exponent
            peak = (self.dim + 1) * a / (a + e)
            cands = {1, self.dim, min(self.dim, max(1, math.floor(peak))), min(self.dim, max(1, math.ceil(peak)))}
            return max(n ** a * self.value(n) for n in cands)
        grid = np.unique(np.geomspace(1, self.dim, num=min(self.dim, 64)).round().astype(np.int64))
        return max(float(n) ** (1.0 / r) * self.value(int(n)) for n in grid)


def _check_kind(kind):
    if kind not in KINDS:
        raise ValidationError("kind", f"must be one of {KINDS}, got {kind!r}")


def block_ideal_norm(block: Block, r, *, p_src, p_dst, kind="approximation") -> float:
    _check_kind(kind)
    return _BlockWidths(block, p_src, p_dst, kind).sup_weighted(r)


def remainder_ideal_norm(blocks, M, r, *, p_src, p_dst, kind="approximation", rho=1.0) -> IdealNormEstimate:
    """Ideal-norm estimate of the ``Q`` side of :func:`split_PQ`, unit constants."""
    _, Q = split_PQ(blocks, M)
    value = _power_sum([block_ideal_norm(b, r, p_src=p_src, p_dst=p_dst, kind=kind) for b in Q], rho)
    return IdealNormEstimate(r=r, kind=kind, value=value, rho=rho)


# ---------------------------------------------------------------------------
# rank allocation
# ---------------------------------------------------------------------------

def combination_power(p_src, p_dst, q_src=2.0, q_dst=2.0, mode="holder") -> float:
    """Power used to combine block remainders (``inf`` means maximum)."""
    if mode not in COMBINE_MODES:
        raise ValidationError("combine", f"must be one of {COMBINE_MODES}, got {mode!r}")
    if mode == "quasi-triangle":
        return min(1.0, p_dst, q_dst)
    gap = max(0.0, inv(p_dst) - inv(p_src), inv(q_dst) - inv(q_src))
    return INF if gap == 0 else 1.0 / gap


@dataclass(frozen=True)
class Allocation:
    """Indices ``n_b`` per block (``n_b - 1`` ranks spent) and the combined bound."""

    indices: tuple
    bound: float
    rho: float

    @property
    def ranks_used(self):
        return sum(n - 1 for n in self.indices)


def _threshold_allocation(tables, budget):
    """Optimal allocation for the maximum: bisect the common threshold."""
    def cost(t):
        return sum(tab.first_index_at_most(t) - 1 for tab in tables)

    values = [tab.value(1) for tab in tables]
    hi = max(values, default=0.0)
    if hi == 0 or cost(0.0) <= budget:
        return [tab.first_index_at_most(0.0) for tab in tables]
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cost(mid) <= budget:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return [tab.first_index_at_most(hi) for tab in tables]


def _greedy_fill(tables, indices, budget, rho):
    """Marginal-gain waterfilling on ``sum s^rho`` from a starting allocation."""
    remaining = budget - sum(n - 1 for n in indices)
    powered = [tab.value(n) ** rho for tab, n in zip(tables, indices)]

    def best_move(b):
        tab, n, cur = tables[b], indices[b], powered[b]
        if cur == 0 or remaining <= 0:
            return None
        span = tab.dim + 1 - n
        steps = {span, remaining}
        c = 1
        while c < span:
            steps.add(c)
            c *= 2
        best = None
        for c in steps:
            c = min(c, span, remaining)
            if c <= 0:
                continue
            gain = cur - tab.value(n + c) ** rho
            if gain > 0 and (best is None or gain / c > best[0]):
                best = (gain / c, c)
        return best

    heap = []
    for b in range(len(tables)):
        move = best_move(b)
        if move:
            heap.append((-move[0], b, move[1]))
    heapq.heapify(heap)
    while heap and remaining > 0:
        _, b, c = heapq.heappop(heap)
        if c > remaining:
            move = best_move(b)
            if move:
                heapq.heappush(heap, (-move[0], b, move[1]))
            continue
        indices[b] += c
        remaining -= c
        powered[b] = tables[b].value(indices[b]) ** rho
        move = best_move(b)
        if move:
            heapq.heappush(heap, (-move[0], b, move[1]))
    return indices


def _objective(tables, indices, rho):
    return _power_sum([tab.value(n) for tab, n in zip(tables, indices)], rho)


def _tables(blocks, p_src, p_dst, kind):
    _check_kind(kind)
    return [_BlockWidths(b, p_src, p_dst, kind) for b in blocks]


def allocate_ranks(blocks, n_budget, *, p_src, p_dst, kind="approximation", rho=None) -> Allocation:
    """Near-optimal allocation with ``sum(n_b - 1) <= n_budget - 1``.

    The maximum (``rho = inf``) is solved exactly by threshold bisection.
    Finite ``rho`` uses greedy waterfilling followed by one local-exchange
    sweep that frees each funded block in turn and refills greedily.
    """
    n_budget = check_positive_int(n_budget, "n_budget")
    rho = combination_power(p_src, p_dst) if rho is None else rho
    tables = _tables(blocks, p_src, p_dst, kind)
    budget = n_budget - 1
    if rho == INF:
        indices = _threshold_allocation(tables, budget)
    else:
        indices = _greedy_fill(tables, [1] * len(tables), budget, rho)
        best = _objective(tables, indices, rho)
        for b in range(len(tables)):
            if indices[b] == 1:
                continue
            trial = list(indices)
            trial[b] = 1
            trial = _greedy_fill(tables, trial, budget, rho)
            val = _objective(tables, trial, rho)
            if val < best * (1 - 1e-13):
                indices, best = trial, val
    return Allocation(tuple(indices), _objective(tables, indices, rho), rho)


def exhaustive_allocation(blocks, n_budget, *, p_src, p_dst, kind="approximation", rho=None) -> Allocation:
    """Best allocation by enumeration; meant for a handful of small blocks."""
    n_budget = check_positive_int(n_budget, "n_budget")
    rho = combination_power(p_src, p_dst) if rho is None else rho
    tables = _tables(blocks, p_src, p_dst, kind)
    budget = n_budget - 1
    best = None
    ranges = [range(1, min(t.dim + 1, budget + 1) + 1) for t in tables]
    for indices in itertools.product(*ranges):
        if sum(indices) - len(indices) > budget:
            continue
        val = _objective(tables, indices, rho)
        if best is None or val < best.bound:
            best = Allocation(tuple(indices), val, rho)
    return best


def assemble_upper_bound(blocks, M=None, n_budget=1, *, p_src=2.0, p_dst=2.0, kind="approximation",
                         rho=None) -> float:
    """Upper bound for ``s_{n_budget}`` of the truncated block operator.

    Ranks go to the blocks with ``j + i <= M`` (all blocks when ``M`` is
    None); the remaining blocks are charged at their norm.
    """
    n_budget = check_positive_int(n_budget, "n_budget")
    rho = combination_power(p_src, p_dst) if rho is None else rho
    if M is None:
        P, Q = list(blocks), []
    else:
        P, Q = split_PQ(blocks, M)
    funded = allocate_ranks(P, n_budget, p_src=p_src, p_dst=p_dst, kind=kind, rho=rho).bound
    charged = [t.value(1) for t in _tables(Q, p_src, p_dst, kind)]
    return _power_sum([funded] + charged, rho)


# ---------------------------------------------------------------------------
# truncation tail
# ---------------------------------------------------------------------------

def default_beta(p1, p2):
    """Decay exponent ``1/beta`` of the finite-dimensional widths used for the tail.

    ``1/p1 - 1/p2`` when ``p2 <= p1`` (possibly negative), ``1/max(2, p1)``
    for ``p2 = inf`` and ``0`` otherwise, where only the norm bound is used.
    """
    if p2 <= p1:
        return inv(p1) - inv(p2)
    if p2 == INF:
        return 1.0 / max(2.0, p1)
    return 0.0


def tail_power(inv_s, rho):
    """Power combining block ideal norms: ``1/power = 1/s + 1/rho``.

    Spreading ranks over blocks with ``s_n(T_b) <= L_b n^{-1/s}`` and
    combining their errors with power ``rho`` gives this power by Hölder.
    """
    return 1.0 / (inv_s + (0.0 if rho == INF else 1.0 / rho))


def tail_ideal_norm(params, J, I, inv_s, inv_beta, rho):
    """Ideal-norm estimate of all blocks with ``j > J`` or ``i > I``.

    Each block is bounded by ``sigma * dim^{1/s - 1/beta}`` with
    ``dim <= 2^{(j+i+1)d}``; the blocks are combined with
    :func:`tail_power`, which turns the sum into a double geometric series.
    Returns ``(level_part, annulus_part)``; combine them with the same power.
    """
    q = derive_quantities(params)
    d = params.d
    x = inv_s - inv_beta
    if d * x >= q.mu:
        raise ValidationError("s", f"tail series diverges: d*(1/s - 1/beta) = {d * x} >= mu = {q.mu}")
    power = tail_power(inv_s, rho)
    scale = 2.0 ** (power * d * x)
    a_j = 2.0 ** (power * (d * x - q.delta))
    a_i = 2.0 ** (power * (d * x - params.alpha))
    level = scale * a_j ** (J + 1) / (1 - a_j) / (1 - a_i)
    annulus = scale * (1 - a_j ** (J + 1)) / (1 - a_j) * a_i ** (I + 1) / (1 - a_i)
    return level ** (1 / power), annulus ** (1 / power)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateFit:
    """Least-squares slope of an assembled bound against ``n`` on log-log axes."""

    samples: tuple
    slope: float
    intercept: float
    max_residual: float
    predicted_kappa: float
    tolerance: float
    verdict: str
    kind: str = "kolmogorov"
    case: str = ""
    shape_only: bool = False
    width_source: str = "exact-formula"
    J: int = 0
    I: int = 0
    rho: float = 1.0
    inv_beta: float = 0.0
    inv_s: float = 0.0
    remainder: float = 0.0
    n_fitted: int = 0
    constants_undetermined: bool = False

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        out = asdict(self)
        out["samples"] = [list(s) for s in self.samples]
        out["rho"] = "inf" if self.rho == INF else self.rho
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["samples"] = tuple((int(n), float(b)) for n, b in data["samples"])
        data["rho"] = INF if data["rho"] == "inf" else float(data["rho"])
        return cls(**data)


def _check_grid(n_grid):
    grid = [check_positive_int(n, "n_grid") for n in n_grid]
    if len(grid) < 2 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("n_grid", "needs at least two strictly increasing indices")
    return grid


def verify_exponent(
    params: EmbeddingParams,
    kind: str = "kolmogorov",
    n_grid: Sequence[int] = DEFAULT_GRID,
    tolerance: float = 0.1,
    *,
    allow_envelope: bool = False,
    combine: str = "holder",
    rho: Optional[float] = None,
    inv_beta: Optional[float] = None,
    inv_s: Optional[float] = None,
    initial_level: int = 8,
    max_J: int = DEFAULT_MAX_LEVEL,
    max_I: int = DEFAULT_MAX_LEVEL,
    trim: float = 0.1,
) -> RateFit:
    """Fit the decay of assembled block bounds and compare with the predicted exponent.

    The truncation grows from ``initial_level`` until the estimated tail
    changes the combined bound at the largest grid index by less than
    ``tolerance / 10`` (relative).

    Raises
    ------
    NotApplicableError
        The classifier does not cover ``params``, or the regime needs
        envelopes and ``allow_envelope`` is false.
    TruncationError
        ``max_J`` or ``max_I`` is reached before the tail target.
    """
    _check_kind(kind)
    tolerance = check_real(tolerance, "tolerance")
    if tolerance <= 0:
        raise ValidationError("tolerance", f"must be > 0, got {tolerance}")
    grid = _check_grid(n_grid)
    result = classify(params).family(kind)
    if not isinstance(result, Exponent):
        raise NotApplicableError(f"classification not covered: {result.reason}")
    p1, p2 = params.p1, params.p2
    source = _width_regime(p1, p2, kind)
    if source == "envelope" and not allow_envelope:
        raise NotApplicableError("p1 < p2 needs envelope widths; pass allow_envelope=True for a shape-only fit")
    if rho is None:
        rho = combination_power(p1, p2, params.q1, params.q2, combine)
    q = derive_quantities(params)
    inv_beta = default_beta(p1, p2) if inv_beta is None else float(inv_beta)
    lo, hi = max(0.0, inv_beta), q.mu / params.d + inv_beta
    if inv_s is None:
        inv_s = 0.5 * (lo + hi)
    if not lo < inv_s < hi:
        raise ValidationError("s", f"1/s = {inv_s} must lie strictly inside ({lo}, {hi})")

    target = tolerance / 10
    J = I = min(check_positive_int(initial_level, "initial_level", minimum=0), max_J, max_I)
    n_top = grid[-1]
    while True:
        blocks = build_blocks(WeightedSequenceModel(params, J, I))
        top = allocate_ranks(blocks, n_top, p_src=p1, p_dst=p2, kind=kind, rho=rho).bound
        level, annulus = tail_ideal_norm(params, J, I, inv_s, inv_beta, rho)
        tail = _power_sum([level, annulus], tail_power(inv_s, rho)) * n_top ** (-inv_s)
        remainder = _power_sum([top, tail], rho) / top - 1 if top > 0 else INF
        if remainder < target:
            break
        grow_j = level >= annulus
        if grow_j and J >= max_J and I < max_I and annulus > 0:
            grow_j = False
        elif not grow_j and I >= max_I and J < max_J and level > 0:
            grow_j = True
        if grow_j and J < max_J:
            J += 1
        elif not grow_j and I < max_I:
            I += 1
        else:
            limit = "J" if grow_j else "I"
            cap = max_J if grow_j else max_I
            if top == 0:
                detail = f"the truncated model has at most {n_top - 1} coefficients"
            else:
                detail = f"remainder {remainder:.3g} >= target {target:.3g}"
            raise TruncationError(limit, f"{detail} with {limit} at its maximum {cap}")

    bounds = [allocate_ranks(blocks, n, p_src=p1, p_dst=p2, kind=kind, rho=rho).bound for n in grid]
    est = PowerLawRateEstimator(trim=trim).fit(np.array(grid)[:, None], bounds)
    kappa = result.kappa
    return RateFit(
        samples=tuple(zip(grid, (float(b) for b in bounds))),
        slope=est.slope_,
        intercept=est.intercept_,
        max_residual=est.max_residual_,
        predicted_kappa=kappa,
        tolerance=tolerance,
        verdict="pass" if abs(est.slope_ + kappa) <= tolerance else "fail",
        kind=kind,
        case=result.case,
        shape_only=source == "envelope",
        width_source=source,
        J=J,
        I=I,
        rho=rho,
        inv_beta=inv_beta,
        inv_s=inv_s,
        remainder=remainder,
        n_fitted=est.n_fitted_,
        constants_undetermined=source == "envelope",
    )
