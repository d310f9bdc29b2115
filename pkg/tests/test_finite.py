import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snumbers import (
    DiagonalOperator,
    FiniteEmbedding,
    NotApplicableError,
    ValidationError,
    WidthResult,
    approximation_envelope,
    diagonal_spectral_oracle,
    dual_transfer,
    exact_width_nonincreasing,
    gelfand_envelope,
    kolmogorov_envelope,
    reduce_quasi_banach,
    width,
    width_table,
)

INF = math.inf
KINDS = ("approximation", "gelfand", "kolmogorov")
POOL = (0.5, 1.0, 1.5, 2.0, 3.0, INF)


# ---------------------------------------------------------------- exact path

@pytest.mark.parametrize(
    "N, n, p_src, p_dst, expected",
    [(10, 3, INF, 1, 8.0), (5, 5, 3, 3, 1.0), (4, 2, 2, 1, math.sqrt(3))],
)
def test_exact_examples(N, n, p_src, p_dst, expected):
    res = exact_width_nonincreasing(FiniteEmbedding(N, p_src, p_dst), n)
    assert res.is_exact and res.method == "exact-formula"
    assert res.value == pytest.approx(expected, rel=1e-12)


def test_exact_scale_and_rank_zero():
    emb = FiniteEmbedding(6, 2, 1, scale=0.25)
    assert exact_width_nonincreasing(emb, 1).value == pytest.approx(0.25 * 6 ** 0.5)
    assert exact_width_nonincreasing(emb, 7).value == 0.0


def test_exact_refuses_increasing_pair():
    with pytest.raises(NotApplicableError):
        exact_width_nonincreasing(FiniteEmbedding(4, 1, 2), 1)


def test_exact_refuses_kolmogorov_below_one():
    with pytest.raises(NotApplicableError):
        exact_width_nonincreasing(FiniteEmbedding(4, 1, 0.5), 1, kind="kolmogorov")
    assert exact_width_nonincreasing(FiniteEmbedding(4, 1, 0.5), 1, kind="gelfand").value == 4.0


def test_bad_kind():
    with pytest.raises(ValidationError):
        exact_width_nonincreasing(FiniteEmbedding(4, 2, 1), 1, kind="entropy")


# ------------------------------------------------------------------ envelopes

def test_kolmogorov_envelope_l1_linf():
    res = kolmogorov_envelope(FiniteEmbedding(16, 1, INF), 4)
    assert res.constants_undetermined and res.method == "envelope"
    assert res.lower == pytest.approx(0.5, rel=1e-12)
    assert res.upper == pytest.approx(0.5 * math.log(4 * math.e) ** 1.5, rel=1e-12)
    assert res.upper == pytest.approx(1.8431, abs=1e-4)


def test_kolmogorov_envelope_large_p_src():
    res = kolmogorov_envelope(FiniteEmbedding(100, 3, INF), 11)
    assert res.upper == pytest.approx((math.log(11) / 10) ** (1 / 3), rel=1e-12)
    # quoted to two digits as 0.620; the expression itself evaluates to 0.6214
    assert res.upper == pytest.approx(0.620, abs=2e-3)


def test_kolmogorov_envelope_rank_zero_and_refusals():
    assert kolmogorov_envelope(FiniteEmbedding(16, 1, INF), 20).value == 0.0
    with pytest.raises(NotApplicableError):
        kolmogorov_envelope(FiniteEmbedding(8, 0.5, 2), 2)
    with pytest.raises(NotApplicableError):
        kolmogorov_envelope(FiniteEmbedding(8, 1, 3), 2)


def test_gelfand_envelope_examples():
    res = gelfand_envelope(FiniteEmbedding(100, 1, INF), 11)
    assert res.upper == pytest.approx(math.sqrt((math.log(10) + 1) / 10), rel=1e-12)
    # quoted as 0.5754; the expression evaluates to 0.574681
    assert res.upper == pytest.approx(0.5754, abs=1e-3)
    res = gelfand_envelope(FiniteEmbedding(100, 1, 2), 11)
    base = min(1.0, (math.log(10) + 1) / 10)
    assert res.lower == pytest.approx(base ** 0.5) and res.upper == pytest.approx(base ** 0.5)
    res = gelfand_envelope(FiniteEmbedding(8, 0.5, 2), 4)
    assert res.lower == pytest.approx(0.125, rel=1e-12)
    assert res.lower <= res.upper


def test_gelfand_envelope_refuses_out_of_range():
    with pytest.raises(NotApplicableError):
        gelfand_envelope(FiniteEmbedding(8, 1.5, 2), 3)
    with pytest.raises(NotApplicableError):
        gelfand_envelope(FiniteEmbedding(8, 1, 1), 3)


def test_approximation_envelope_examples():
    emb = FiniteEmbedding(16, 1, INF)
    assert approximation_envelope(emb, 2).upper == 1.0
    assert approximation_envelope(emb, 8).upper == pytest.approx(8 ** -0.5)
    assert approximation_envelope(emb, 8).upper == pytest.approx(0.3536, abs=1e-4)
    assert approximation_envelope(emb, 17).value == 0.0
    for lam in (0.0, 1.0, -0.5, 2):
        with pytest.raises(ValidationError):
            approximation_envelope(emb, 2, lam=lam)
    with pytest.raises(NotApplicableError):
        approximation_envelope(FiniteEmbedding(16, 2, INF), 2)


# ----------------------------------------------------------------- reduction

def test_reduce_quasi_banach_examples():
    assert reduce_quasi_banach(FiniteEmbedding(5, 0.5, 2)).p_src == 1.0
    assert reduce_quasi_banach(FiniteEmbedding(5, 0.5, 0.8)).p_src == 0.8
    with pytest.raises(NotApplicableError):
        reduce_quasi_banach(FiniteEmbedding(5, 1, 2))


def test_width_dispatch_uses_reduction():
    res = width(FiniteEmbedding(5, 0.5, 0.8), 2, "kolmogorov")
    # reduced pair (0.8, 0.8): identity widths pinned to 1 on both sides
    assert (res.lower, res.upper) == (1.0, 1.0)
    res = width(FiniteEmbedding(5, 0.5, INF), 1, "kolmogorov")
    assert res.lower <= 1.0 <= res.upper


# ------------------------------------------------------------------ spectral

def test_spectral_examples():
    assert diagonal_spectral_oracle(DiagonalOperator((3, 2, 1)), 2).value == 2
    assert diagonal_spectral_oracle(DiagonalOperator((1,) * 5), 3).value == 1
    assert diagonal_spectral_oracle(DiagonalOperator((3, 2, 1)), 4).value == 0
    with pytest.raises(NotApplicableError):
        diagonal_spectral_oracle(DiagonalOperator((3, 2, 1), p=1), 1)
    with pytest.raises(ValidationError):
        DiagonalOperator((1, -1))


# -------------------------------------------------------------------- duality

def test_dual_transfer_examples():
    emb, kind = dual_transfer(FiniteEmbedding(4, 2, INF), "kolmogorov")
    assert (emb.p_src, emb.p_dst, kind) == (1.0, 2.0, "gelfand")
    emb, kind = dual_transfer(FiniteEmbedding(4, 1, 2), "gelfand")
    assert (emb.p_src, emb.p_dst, kind) == (2.0, INF, "kolmogorov")
    emb, kind = dual_transfer(FiniteEmbedding(4, 2, 2), "gelfand")
    assert (emb.p_src, emb.p_dst, kind) == (2.0, 2.0, "kolmogorov")
    with pytest.raises(NotApplicableError):
        dual_transfer(FiniteEmbedding(4, 0.5, 2), "gelfand")


def test_width_result_round_trip():
    res = gelfand_envelope(FiniteEmbedding(100, 1, INF), 11)
    assert WidthResult.from_dict(res.to_dict()) == res


# ---------------------------------------------------------------- properties

def _tabulated_pairs():
    for p1 in POOL:
        for p2 in POOL:
            for kind in KINDS:
                emb = FiniteEmbedding(12, p1, p2)
                try:
                    yield emb, kind, width_table(emb, kind)
                except NotApplicableError:
                    continue


def test_tabulated_sequences_are_monotone_and_vanish_past_rank():
    count = 0
    for emb, kind, table in _tabulated_pairs():
        count += 1
        for k, res in enumerate(table, start=1):
            assert res.n == k
            if k > emb.N:
                assert res.value == 0.0
            elif res.is_exact:
                assert res.value > 0
        uppers = [r.bound for r in table]
        lowers = [r.value if r.is_exact else r.lower for r in table]
        for seq in (uppers, lowers):
            assert all(a >= b for a, b in zip(seq, seq[1:]))
    assert count >= 30


def test_envelope_lower_below_norm_and_upper():
    for emb, kind, table in _tabulated_pairs():
        for res in table:
            if not res.is_exact:
                assert 0 <= res.lower <= min(emb.norm, res.upper) * (1 + 1e-12)


@settings(max_examples=150, deadline=None, derandomize=True)
@given(st.integers(1, 40), st.sampled_from(POOL), st.sampled_from(POOL), st.floats(0.0, 3.0))
def test_exact_kinds_agree_and_dominance(N, p1, p2, scale):
    if p2 > p1 or p2 < 1:
        return
    emb = FiniteEmbedding(N, p1, p2, scale)
    for n in range(1, N + 2):
        a = exact_width_nonincreasing(emb, n, "approximation").value
        c = exact_width_nonincreasing(emb, n, "gelfand").value
        d = exact_width_nonincreasing(emb, n, "kolmogorov").value
        assert c <= a and d <= a
        assert (n > N) == (a == 0.0) or scale == 0


@pytest.mark.parametrize("p1, p2", [(2, 1), (INF, 1), (3, 1.5), (INF, 2)])
def test_kolmogorov_envelope_brackets_exact_over_dimension_sweep(p1, p2):
    # both paths exist for d_n with 1 <= p_dst <= p_src; at fixed n/N the ratios stay bounded
    lows, highs = [], []
    for N in (8, 16, 32, 64, 128, 256, 512):
        emb = FiniteEmbedding(N, p1, p2)
        n = N // 8
        exact = exact_width_nonincreasing(emb, n, "kolmogorov").value
        env = kolmogorov_envelope(emb, n)
        lows.append(exact / env.lower)
        highs.append(env.upper / exact)
    assert max(lows) / min(lows) < 1.5
    assert max(highs) / min(highs) < 1.5
    assert min(lows) >= 1 - 1e-12


def test_gelfand_envelope_exponents_match_on_both_sides():
    # for p_dst <= 2 the two shapes share the exponent 1/p_src - 1/p_dst; their ratio is constant
    ratios = []
    for N in (100, 1000, 10000):
        res = gelfand_envelope(FiniteEmbedding(N, 1, 2), N // 10 + 1)
        ratios.append(res.upper / res.lower)
    assert np.allclose(ratios, 1.0)


def test_single_envelope_keeps_raw_shape_table_uses_hull():
    emb = FiniteEmbedding(12, 1, INF)
    raw = [kolmogorov_envelope(emb, n).upper for n in (3, 4)]
    assert raw[1] > raw[0]  # the shape switches regime above N/4
    table = width_table(emb, "kolmogorov")
    assert table[3].upper == min(raw[0], emb.norm)
    assert table[0].upper == emb.norm
