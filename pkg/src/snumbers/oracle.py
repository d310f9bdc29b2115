"""Direct numerical evaluation of Gelfand and Kolmogorov numbers at desk scale.

Both numbers are infima over subspaces:

* ``c_n = inf { ||id restricted to M|| : codim M < n }``
* ``d_n = inf { sup_{x in B_p} dist_q(x, L) : dim L < n }``

The infimum is searched by randomized multi-start Nelder-Mead over a chart
of the Grassmannian (a random coordinate permutation of ``[I; B]`` followed
by QR).  The inner supremum is computed exactly whenever the relevant convex
body has a finite extreme set we can enumerate:

* Gelfand, ``p_src in {1, inf}``: vertices of ``M cap B_p`` by support /
  active-set enumeration; ``p_src = 2`` with ``p_dst in {1, 2, inf}`` by
  closed forms;
* Kolmogorov, ``p_src <= 1``: the unit vectors; ``p_src = inf``: sign vectors;
  ``p_src = p_dst = 2``: spectral norm of the orthogonal projector.

Other exponents fall back to a boundary sample with local refinement, which
approaches the supremum from below.  The reported number is the inner value
at the best subspace found, hence an upper estimate of the infimum.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np
from scipy import optimize

from ._validation import INF, check_positive_int, conjugate
from .exceptions import NotApplicableError, ValidationError
from .finite import FiniteEmbedding, WidthResult

__all__ = ["MAX_DIMENSION", "subspace_search_oracle", "gelfand_objective", "kolmogorov_objective",
           "kolmogorov_dual_objective"]

MAX_DIMENSION = 6


def _pnorm(X, p, axis=-1):
    X = np.abs(X)
    if p == INF:
        return X.max(axis=axis)
    if p == 1:
        return X.sum(axis=axis)
    if p == 2:
        return np.sqrt((X * X).sum(axis=axis))
    return (X ** p).sum(axis=axis) ** (1.0 / p)


@lru_cache(maxsize=None)
def _sign_vectors(N):
    """All sign vectors with first entry +1 (the rest follow by symmetry)."""
    tail = np.array(list(itertools.product((1.0, -1.0), repeat=N - 1))).reshape(2 ** (N - 1), N - 1)
    return np.hstack([np.ones((tail.shape[0], 1)), tail])


@lru_cache(maxsize=None)
def _complement_supports(N, k):
    """Index arrays of ``T^c`` for every non-empty support ``T`` with ``|T^c| >= k-1``, grouped by size."""
    groups = []
    for r in range(max(k - 1, 1), N):
        combos = np.array(list(itertools.combinations(range(N), r)), dtype=int)
        groups.append(combos)
    return groups


@lru_cache(maxsize=None)
def _active_sets(N, k):
    return np.array(list(itertools.combinations(range(N), k)), dtype=int)


def _frame(theta, perm, N, k):
    """Orthonormal ``N x k`` frame of the chart point ``theta``."""
    W = np.zeros((N, k))
    W[perm[:k], np.arange(k)] = 1.0
    if N > k:
        W[perm[k:], :] = np.asarray(theta).reshape(N - k, k)
    Q, _ = np.linalg.qr(W)
    return Q


# ---------------------------------------------------------------------------
# Gelfand: sup { ||x||_b : x in M, ||x||_a <= 1 }
# ---------------------------------------------------------------------------

def _gelfand_l1_vertices(U):
    N, k = U.shape
    if k == 1:
        X = U.T
    else:
        cands = []
        for idx in _complement_supports(N, k):
            A = U[idx]  # (C, r, k)
            _, _, Vh = np.linalg.svd(A, full_matrices=True)
            cands.append(Vh[:, -1, :] @ U.T)
        X = np.vstack(cands)
    return X / _pnorm(X, 1)[:, None]


def _gelfand_linf_vertices(U):
    N, k = U.shape
    S = _active_sets(N, k)
    signs = _sign_vectors(k)
    A = U[S]  # (C, k, k)
    Y = np.einsum("cij,sj->csi", np.linalg.pinv(A), signs).reshape(-1, k)
    X = Y @ U.T
    norms = _pnorm(X, INF)
    X = X[norms > 1e-300]
    return X / _pnorm(X, INF)[:, None]


def gelfand_objective(U, a, b, rng=None, samples=256, refine=True):
    """Norm of the identity ``l_a -> l_b`` restricted to ``span(U)`` (orthonormal ``U``).

    Pairs without a closed form use a random sample of ``span(U)``, followed
    by local maximization from the best sample points when ``refine`` is set.
    """
    N, k = U.shape
    if a == 1:
        return float(_pnorm(_gelfand_l1_vertices(U), b).max())
    if a == INF:
        return float(_pnorm(_gelfand_linf_vertices(U), b).max())
    if a == 2 and b == 2:
        return 1.0
    if a == 2 and b == INF:
        return float(np.sqrt((U * U).sum(axis=1)).max())
    if a == 2 and b == 1:
        return float(np.sqrt(((_sign_vectors(N) @ U) ** 2).sum(axis=1)).max())
    return _sampled_ratio_sup(U, a, b, rng, samples, refine)


def _sampled_ratio_sup(U, a, b, rng, samples, refine=True):
    rng = np.random.default_rng(rng)
    k = U.shape[1]

    def ratio(y):
        x = U @ y
        den = _pnorm(x, a)
        return _pnorm(x, b) / den if den > 0 else 0.0

    Y = rng.standard_normal((samples, k))
    X = Y @ U.T
    vals = _pnorm(X, b) / _pnorm(X, a)
    best = float(vals.max())
    if k == 1 or not refine:
        return best
    for i in np.argsort(vals)[-3:]:
        res = optimize.minimize(lambda y: -ratio(y), Y[i], method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14, "maxfev": 4000})
        best = max(best, -float(res.fun))
    return best


# ---------------------------------------------------------------------------
# Kolmogorov: sup_{x in ext B_a} dist_b(x, span V)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cheb_combos(N, m):
    rows = np.array(list(itertools.combinations(range(N), m + 1)), dtype=int)
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=m + 1)))
    R = np.repeat(rows, len(signs), axis=0)
    S = np.tile(signs, (len(rows), 1))
    return R, S


def _dist_inf(X, V):
    """Chebyshev distance of each row of ``X`` to ``span(V)`` by vertex enumeration of the LP."""
    N, m = V.shape
    if m == 0:
        return _pnorm(X, INF)
    R, S = _cheb_combos(N, m)
    A = np.concatenate([V[R], S[:, :, None]], axis=2)  # V_S y + sigma t = x_S
    dets = np.linalg.det(A)
    keep = np.abs(dets) > 1e-12
    A, R = A[keep], R[keep]
    sol = np.einsum("kij,pkj->kpi", np.linalg.inv(A), X[:, R])
    y, t = sol[..., :m], sol[..., m]
    resid = np.abs(X[None, :, :] - y @ V.T).max(axis=2)
    feasible = (t >= -1e-12) & (resid <= t + 1e-10 * (1 + np.abs(t)))
    t = np.where(feasible, resid, np.inf)
    return t.min(axis=0)


def _dist_l1(X, V):
    """Least-absolute-deviation distance: an optimum interpolates ``m`` coordinates."""
    N, m = V.shape
    if m == 0:
        return _pnorm(X, 1)
    rows = _active_sets(N, m)
    A = V[rows]
    keep = np.abs(np.linalg.det(A)) > 1e-12
    A, rows = A[keep], rows[keep]
    y = np.einsum("kij,pkj->kpi", np.linalg.inv(A), X[:, rows])
    return np.abs(X[None, :, :] - y @ V.T).sum(axis=2).min(axis=0)


def _dist_general(X, V, b):
    N, m = V.shape
    if m == 0:
        return _pnorm(X, b)
    out = np.empty(len(X))
    for i, x in enumerate(X):
        y0 = np.linalg.lstsq(V, x, rcond=None)[0]
        res = optimize.minimize(lambda y: float(_pnorm(x - V @ y, b)), y0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14, "maxfev": 2000 * m})
        out[i] = res.fun
    return out


def _dist(X, V, b):
    if b == 2:
        return _pnorm(X - (X @ V) @ V.T, 2)
    if b == INF:
        return _dist_inf(X, V)
    if b == 1:
        return _dist_l1(X, V)
    return _dist_general(X, V, b)


def _exact_extremes(N, a):
    if a <= 1:
        return np.eye(N)
    if a == INF:
        return _sign_vectors(N)
    return None


def _sphere_sample(rng, count, N, a):
    X = rng.standard_normal((count, N))
    return X / _pnorm(X, a)[:, None]


def kolmogorov_objective(V, a, b, extremes=None):
    """Worst distance from the extreme set of ``B_a`` to ``span(V)`` in ``l_b``.

    ``extremes`` overrides the extreme set (used for boundary samples).
    """
    N = V.shape[0]
    if extremes is None:
        if a == 2 and b == 2:
            P = np.eye(N) - V @ V.T
            return float(np.linalg.norm(P, 2)) if V.shape[1] < N else 0.0
        extremes = _exact_extremes(N, a)
        if extremes is None:
            raise ValueError("no finite extreme set; pass a boundary sample")
    return float(_dist(extremes, V, b).max())


def _orthogonal_complement(V):
    N, m = V.shape
    if m == 0:
        return np.eye(N)
    Q, _ = np.linalg.qr(V, mode="complete")
    return Q[:, m:]


def _gelfand_inner_is_exact(a, b):
    return a in (1, INF) or (a == 2 and b in (1, 2, INF))


def kolmogorov_dual_objective(V, a, b):
    """Worst distance through norm duality of the quotient ``l_b / span(V)``.

    ``sup { dist_b(x, L) : ||x||_a <= 1 }`` equals the norm of the identity
    ``l_b' -> l_a'`` restricted to the annihilator of ``L``.
    """
    return gelfand_objective(_orthogonal_complement(V), conjugate(b), conjugate(a))


def _refine_kolmogorov_sup(V, a, b, starts, maxfev=3000):
    """Local maximization of ``dist_b(x, L)`` over the ``l_a`` sphere from ``starts``."""
    def neg(x):
        nx = _pnorm(x, a)
        if nx == 0:
            return 0.0
        return -float(_dist((x / nx)[None, :], V, b)[0])

    best_val, best_pts = 0.0, []
    for x0 in starts:
        res = optimize.minimize(neg, x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14, "maxfev": maxfev})
        x = res.x / _pnorm(res.x, a)
        best_pts.append(x)
        best_val = max(best_val, -float(res.fun), -neg(x0))
    return best_val, np.array(best_pts)


# ---------------------------------------------------------------------------
# outer search
# ---------------------------------------------------------------------------

def _local_chart_search(objective, perm, theta0, N, k, budget, xtol):
    dim = k * (N - k)
    f = lambda th: objective(_frame(th, perm, N, k))
    res = optimize.minimize(f, theta0, method="Nelder-Mead",
                            options={"xatol": xtol, "fatol": 1e-13, "maxiter": budget,
                                     "maxfev": budget * (dim + 1), "adaptive": dim > 4})
    return float(res.fun), res.x


def _minimize_over_charts(objective, N, k, starts, budget, xtol, seed, warm=()):
    """Multi-start Nelder-Mead over Grassmannian charts.

    Returns ``(value, frame, (perm, theta))``.  ``warm`` holds extra
    ``(perm, theta)`` starting points tried before the random ones.
    """
    if k == 0:
        return objective(np.zeros((N, 0))), np.zeros((N, 0)), None
    if k == N:
        return objective(np.eye(N)), np.eye(N), None
    dim = k * (N - k)
    candidates = []
    for perm, theta in warm:
        val, theta = _local_chart_search(objective, perm, theta, N, k, budget, xtol)
        candidates.append((val, perm, theta))
    for child in np.random.SeedSequence(seed).spawn(starts):
        rng = np.random.default_rng(child)
        perm = rng.permutation(N)
        val, theta = _local_chart_search(objective, perm, rng.standard_normal(dim), N, k, budget, xtol)
        candidates.append((val, perm, theta))
    candidates.sort(key=lambda c: c[0])
    best = None
    for val, perm, theta in candidates[:3]:
        # restarts from the converged point escape premature simplex collapse
        for _ in range(5):
            new_val, new_theta = _local_chart_search(objective, perm, theta, N, k, budget, xtol)
            if new_val >= val - 1e-13:
                break
            val, theta = new_val, new_theta
        if best is None or val < best[0]:
            best = (val, perm, theta)
    val, perm, theta = best
    return val, _frame(theta, perm, N, k), (perm, theta)


def _kolmogorov_exchange(N, m, a, b, starts, budget, xtol, seed, samples, rounds, rtol=1e-7):
    """Minimax over a growing boundary sample.

    Each round minimizes the sampled objective, refines the true supremum at
    the minimizer and adds the refined maximizers to the sample.  Stops once
    the sampled and refined values agree.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    pts = _sphere_sample(rng, samples or 64 * N, N, a)
    if m == 0:
        val, _ = _refine_kolmogorov_sup(np.zeros((N, 0)), a, b, pts[np.argsort(_pnorm(pts, b))[-8:]])
        return val
    warm, val = (), None
    for r in range(max(1, rounds)):
        sample = pts
        obj = lambda W: kolmogorov_objective(W, a, b, extremes=sample)
        sampled, V, chart = _minimize_over_charts(obj, N, m, starts if r == 0 else 2, budget, xtol,
                                                  seed + r, warm=warm)
        warm = (chart,)
        dists = _dist(pts, V, b)
        seeds = np.vstack([pts[np.argsort(dists)[-4:]], _sphere_sample(rng, 2, N, a)])
        val, new = _refine_kolmogorov_sup(V, a, b, seeds, maxfev=400 * N)
        pts = np.vstack([pts, new])
        if val - sampled <= rtol * max(val, 1e-300):
            break
    return val


def subspace_search_oracle(
    emb: FiniteEmbedding,
    n: int,
    kind: str,
    budget: int = 400,
    *,
    starts: int = 64,
    xtol: float = 1e-8,
    seed: int = 0,
    samples: int = 0,
    exchange_rounds: int = 12,
    inner: str = "auto",
) -> WidthResult:
    """Upper estimate of ``c_n`` or ``d_n`` by searching over subspaces.

    Parameters
    ----------
    emb : FiniteEmbedding
        Dimension ``N <= 6``; exponents in the Banach range ``[1, inf]``.
    n : int
        Index with ``1 <= n <= N``.
    kind : {"gelfand", "kolmogorov"}
    budget : int
        Nelder-Mead iterations per local search.
    starts : int
        Number of random multi-starts; each uses its own seed-split stream.
    xtol : float
        Simplex step tolerance.
    seed : int
        Root seed; results are deterministic given it.
    samples : int
        Boundary sample size when the source ball has no finite extreme set
        (``0`` picks ``64 * N``).
    exchange_rounds : int
        Rounds of adding refined maximizers to the boundary sample.
    inner : {"auto", "sample"}
        How the Kolmogorov inner supremum is evaluated when the source ball
        has no finite extreme set.  ``"auto"`` uses the dual restricted norm
        whenever that is exact and the boundary-sample exchange otherwise;
        ``"sample"`` always uses the boundary sample.
    """
    if inner not in ("auto", "sample"):
        raise ValidationError("inner", f"must be 'auto' or 'sample', got {inner!r}")
    if kind not in ("gelfand", "kolmogorov"):
        raise ValidationError("kind", f"must be 'gelfand' or 'kolmogorov', got {kind!r}")
    N = emb.N
    if N > MAX_DIMENSION:
        raise NotApplicableError(f"subspace search is limited to N <= {MAX_DIMENSION}, got N={N}")
    n = check_positive_int(n, "n")
    if n > N:
        raise ValidationError("n", f"must satisfy 1 <= n <= N={N}")
    a, b = emb.p_src, emb.p_dst
    if a < 1 or b < 1:
        raise NotApplicableError("the subspace oracle needs p_src, p_dst >= 1 (convex inner problems)")
    budget = check_positive_int(budget, "budget")
    starts = check_positive_int(starts, "starts")

    if kind == "gelfand":
        k = N - n + 1
        rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
        # cheap sampled inner sup during the search; the final frame is refined
        obj = lambda U: gelfand_objective(U, a, b, rng=np.random.default_rng(seed), refine=False)
        val, U, _ = _minimize_over_charts(obj, N, k, starts, budget, xtol, seed)
        val = gelfand_objective(U, a, b, rng=rng, samples=4096)
    else:
        m = n - 1
        exact = (a == 2 and b == 2) or _exact_extremes(N, a) is not None
        if exact:
            obj = lambda V: kolmogorov_objective(V, a, b)
            val, V, _ = _minimize_over_charts(obj, N, m, starts, budget, xtol, seed)
        elif inner == "auto" and _gelfand_inner_is_exact(conjugate(b), conjugate(a)):
            obj = lambda V: kolmogorov_dual_objective(V, a, b)
            val, V, _ = _minimize_over_charts(obj, N, m, starts, budget, xtol, seed)
        else:
            val = _kolmogorov_exchange(N, m, a, b, starts, budget, xtol, seed, samples, exchange_rounds)
    return WidthResult(kind=kind, n=n, method="oracle-subspace", value=emb.scale * float(val))
