import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import binom

from bikebf.decoder import DecoderConfig, decode_and_check
from bikebf.dfr import (
    DfrEstimate,
    ExtrapolationError,
    clopper_pearson,
    estimate_dfr,
    extrapolate,
    gnuplot_script,
    sweep,
)
from bikebf.gf2 import CodeParams, keygen, sample_error
from bikebf.rng import trial_rng
from bikebf.threshold import ThresholdCoefficients


def desk_cfg(t=18, block=1, b="4.70"):
    coeffs = ThresholdCoefficients(Fraction("0.0295"), Fraction(b))
    return DecoderConfig(CodeParams(557, 30, t, delta=3), coeffs, block)


# -- confidence intervals ----------------------------------------------------------


@pytest.mark.parametrize("n", [1, 10, 1000, 10**5])
def test_zero_failures_upper_bound(n):
    lo, hi = clopper_pearson(0, n)
    assert lo == 0.0
    assert hi == pytest.approx(1 - 0.025 ** (1 / n), rel=1e-9)


def test_all_failures_bound_mirrors_zero():
    lo, hi = clopper_pearson(50, 50)
    assert hi == 1.0
    assert lo == pytest.approx(0.025 ** (1 / 50), rel=1e-9)


@given(st.integers(1, 10**6).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_interval_brackets_point(args):
    k, n = args
    lo, hi = clopper_pearson(k, n)
    assert 0 <= lo <= k / n <= hi <= 1


def test_interval_matches_binomial_tails():
    # each bound puts exactly 2.5% in the corresponding binomial tail
    k, n = 7, 200
    lo, hi = clopper_pearson(k, n)
    assert binom.sf(k - 1, n, lo) == pytest.approx(0.025, rel=1e-6)
    assert binom.cdf(k, n, hi) == pytest.approx(0.025, rel=1e-6)


def test_estimate_rejects_bad_counts():
    with pytest.raises(ValueError):
        DfrEstimate.from_counts(13, 0, 0)
    with pytest.raises(ValueError):
        DfrEstimate.from_counts(13, 5, 6)


# -- extrapolation ------------------------------------------------------------------


def test_two_point_example():
    ext = extrapolate([(9000, 2.0**-10), (9200, 2.0**-20)], 128)
    assert ext.slope == pytest.approx(-0.05)
    assert ext.r_star == pytest.approx(11360.0)


def test_uses_two_lowest_points():
    pts = [(8800, 2.0**-3), (9000, 2.0**-10), (9200, 2.0**-20)]
    assert extrapolate(pts, 128).r_star == pytest.approx(11360.0)


def test_fit_all_uses_every_point():
    pts = [(100, 2.0**-1), (200, 2.0**-3), (300, 2.0**-5)]
    ext = extrapolate(pts, 7, fit_all=True)
    assert ext.slope == pytest.approx(-0.02)
    assert ext.r_star == pytest.approx(400.0)


def test_flat_or_rising_dfr_is_an_error():
    with pytest.raises(ExtrapolationError):
        extrapolate([(100, 0.01), (200, 0.01)], 128)
    with pytest.raises(ExtrapolationError):
        extrapolate([(100, 0.01), (200, 0.02)], 128)
    with pytest.raises(ExtrapolationError):
        extrapolate([(100, 0.01), (200, 0.0)], 128)


@given(
    st.integers(10, 10**4),
    st.integers(1, 500),
    st.floats(1e-30, 0.5),
    st.floats(1e-3, 0.999),
)
def test_doubling_shifts_intercept_by_one(r1, gap, p1, ratio):
    pts = [(r1, p1), (r1 + gap, p1 * ratio)]
    base = extrapolate(pts, 128)
    doubled = extrapolate([(r, 2 * p) for r, p in pts], 128)
    assert doubled.slope == pytest.approx(base.slope, rel=1e-9, abs=1e-12)
    assert doubled.intercept == pytest.approx(base.intercept + 1, rel=1e-9, abs=1e-9)


# -- Monte Carlo -----------------------------------------------------------------------


def test_trivial_error_never_fails():
    est = estimate_dfr(desk_cfg(t=0), 101, 50, 1)
    assert est.failures == 0 and est.dfr_point == 0.0


def test_counts_match_direct_loop():
    cfg = desk_cfg(t=18).with_r(353)
    direct = 0
    for i in range(40):
        g = trial_rng(3, i)
        key = keygen(353, 15, g)
        direct += decode_and_check(key, sample_error(353, 18, g), cfg)
    assert estimate_dfr(desk_cfg(), 353, 40, 3).failures == direct


def test_merge_of_halves_equals_whole():
    whole = estimate_dfr(desk_cfg(), 457, 60, 8)
    first = estimate_dfr(desk_cfg(), 457, 30, 8)
    second = estimate_dfr(desk_cfg(), 457, 30, 8, start=30)
    assert first.merge(second) == whole
    with pytest.raises(ValueError):
        first.merge(estimate_dfr(desk_cfg(), 461, 30, 8))


def test_worker_count_does_not_change_results():
    a = estimate_dfr(desk_cfg(), 457, 40, 5, workers=1)
    b = estimate_dfr(desk_cfg(), 457, 40, 5, workers=3)
    assert a == b


def test_sweep_single_r_has_no_extrapolation():
    res = sweep(desk_cfg(), [457], 30, 2)
    assert len(res.estimates) == 1 and res.extrapolation is None


def test_sweep_csv_is_reproducible():
    a = sweep(desk_cfg(), [457, 509], 40, 11).csv()
    b = sweep(desk_cfg(), [457, 509], 40, 11).csv()
    assert a == b
    assert a.splitlines()[0] == "r,trials,failures,dfr,ci_low,ci_high"


def test_sweep_rejects_descending():
    with pytest.raises(ValueError):
        sweep(desk_cfg(), [509, 457], 10, 1)


def test_independent_seeds_agree_statistically():
    # two disjoint seeds estimate the same rate; their intervals must overlap
    a = estimate_dfr(desk_cfg(), 509, 400, 21)
    b = estimate_dfr(desk_cfg(), 509, 400, 22)
    assert a.ci_low <= b.ci_high and b.ci_low <= a.ci_high


@pytest.mark.xfail(
    strict=True,
    reason="at desk-scale waterfall DFRs the column-layered schedule fails less often "
    "than the snapshot schedule; the opposite ordering is only expected near the "
    "security-level operating points",
)
def test_layered_not_better_than_snapshot_at_small_r():
    r, n = 509, 2000
    lay = estimate_dfr(desk_cfg(block=1, b="4.70"), r, n, 31)
    non = estimate_dfr(desk_cfg(block=None, b="5.32"), r, n, 31)
    sigma = math.sqrt(non.dfr_point * (1 - non.dfr_point) / n)
    assert lay.dfr_point >= non.ci_low - 3 * sigma


def test_plot_data_and_script():
    res = sweep(desk_cfg(), [353, 457], 50, 4)
    lines = res.plot_data().splitlines()
    assert lines[0] == "r,log2_dfr,log2_ci_low,log2_ci_high"
    for line, est in zip(lines[1:], [e for e in res.estimates if e.failures]):
        assert float(line.split(",")[1]) == pytest.approx(np.log2(est.dfr_point))
    assert "plot 'x.csv'" in gnuplot_script("x.csv", None)
