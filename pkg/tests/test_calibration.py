import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bikebf.calibration import (
    CalibrationSample,
    DegenerateFitError,
    best_first_threshold,
    calibrate,
    collect_samples,
    least_squares_fit,
    plot_data,
    samples_csv,
)
from bikebf.gf2 import BitVector, CodeParams, keygen, sample_error, syndrome
from bikebf.rng import trial_rng

from reference import dense_h, reference_decode


def S(x, y):
    return CalibrationSample(x, y)


# -- best first threshold ---------------------------------------------------------


def test_zero_error_picks_lowest_candidate():
    key = keygen(13, 3, trial_rng(0, 0))
    sample = best_first_threshold(key, BitVector.zeros(26), 26, (2, 5))
    assert sample == S(0, 2)


def test_thresholds_above_d_flip_nothing():
    # every candidate above d leaves s untouched, so the tie goes to the first of them
    g = trial_rng(0, 1)
    key = keygen(13, 3, g)
    e = sample_error(13, 2, g)
    sample = best_first_threshold(key, e, 26, (4, 9))
    assert sample == S(syndrome(key, e).weight, 4)


def test_empty_range_rejected():
    key = keygen(13, 3, trial_rng(0, 0))
    with pytest.raises(ValueError):
        best_first_threshold(key, BitVector.zeros(26), 26, (5, 4))


def oracle_best(key, e, block, lo, hi):
    H = dense_h(key.r, key.h0_support, key.h1_support)
    s0 = syndrome(key, e).to_array()
    best = None
    for T in range(lo, hi + 1):
        # a = 0, b = T, delta = 0 gives a constant first-iteration threshold T
        e_est, _, thr = reference_decode(H, s0, 0, T, 0, 1, block)
        assert thr == [T]
        weight = int(((H @ e_est + s0) % 2).sum())
        if best is None or weight < best[0]:
            best = (weight, T)
    return best[1]


@pytest.mark.parametrize("block", [None, 1, 3])
@pytest.mark.parametrize("seed", range(15))
def test_best_threshold_matches_exhaustive_oracle(block, seed):
    g = trial_rng(300, seed)
    key = keygen(13, 3, g)
    e = sample_error(13, int(g.integers(1, 5)), g)
    b = 26 if block is None else block
    got = best_first_threshold(key, e, b, (1, 3))
    assert got.initial_syndrome_weight == syndrome(key, e).weight
    assert got.best_threshold == oracle_best(key, e, block, 1, 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9))
def test_snapshot_fast_path_agrees_with_oracle_mid_size(seed):
    g = trial_rng(301, seed)
    r = int(g.integers(17, 60))
    key = keygen(r, 5, g)
    e = sample_error(r, int(g.integers(1, 8)), g)
    got = best_first_threshold(key, e, 2 * r, (1, 5))
    assert got.best_threshold == oracle_best(key, e, None, 1, 5)


# -- least squares --------------------------------------------------------------------


def test_two_point_fit():
    fit = least_squares_fit([S(100, 30), S(200, 40)], r_prime=7)
    assert fit.a == pytest.approx(0.1, abs=1e-12)
    assert fit.b == pytest.approx(20.0, abs=1e-9)
    assert (fit.r_prime, fit.num_samples) == (7, 2)


def test_three_point_fit():
    fit = least_squares_fit([S(0, 1), S(1, 0), S(2, 1)])
    assert fit.a == pytest.approx(0.0, abs=1e-12)
    assert fit.b == pytest.approx(2 / 3, abs=1e-12)


def test_planted_line_recovered_exactly():
    # y = 3x/128 + 5 is exact in binary floating point
    samples = [S(x, 3 * x // 128 + 5) for x in range(0, 4096, 128)]
    fit = least_squares_fit(samples)
    assert fit.a == pytest.approx(3 / 128, rel=1e-12)
    assert fit.b == pytest.approx(5.0, rel=1e-12)


def test_degenerate_inputs():
    with pytest.raises(DegenerateFitError):
        least_squares_fit([S(5, 30)])
    with pytest.raises(DegenerateFitError):
        least_squares_fit([S(5, 30), S(5, 40), S(5, 41)])


pairs = st.lists(st.tuples(st.integers(0, 5000), st.integers(0, 80)), min_size=2, max_size=60).filter(
    lambda ps: len({x for x, _ in ps}) > 1
)


@given(pairs)
def test_residuals_satisfy_normal_equations(ps):
    fit = least_squares_fit([S(x, y) for x, y in ps])
    x = np.array([p[0] for p in ps], dtype=float)
    y = np.array([p[1] for p in ps], dtype=float)
    res = y - (fit.a * x + fit.b)
    scale = 1 + np.abs(y).sum() + np.abs(x * y).sum()
    assert abs(res.sum()) <= 1e-8 * scale
    assert abs((res * x).sum()) <= 1e-8 * scale * (1 + x.max())


@given(pairs, st.randoms(use_true_random=False))
def test_fit_ignores_sample_order(ps, rnd):
    shuffled = list(ps)
    rnd.shuffle(shuffled)
    f1 = least_squares_fit([S(x, y) for x, y in ps])
    f2 = least_squares_fit([S(x, y) for x, y in shuffled])
    assert f1.a == pytest.approx(f2.a, rel=1e-9, abs=1e-12)
    assert f1.b == pytest.approx(f2.b, rel=1e-9, abs=1e-9)


# -- end to end ------------------------------------------------------------------------


def test_calibrate_reproducible_and_worker_independent():
    params = CodeParams(101, 10, 6)
    f1, s1 = calibrate(101, params, 200, 4, t_range=(1, 5))
    f2, s2 = calibrate(101, params, 200, 4, t_range=(1, 5), workers=2)
    assert s1 == s2 and f1 == f2
    assert samples_csv(s1) == samples_csv(s2)
    assert all(1 <= s.best_threshold <= 5 for s in s1)


def test_sample_i_uses_stream_i():
    params = CodeParams(53, 6, 4)
    samples = collect_samples(53, params, 5, 9, t_range=(1, 3))
    g = trial_rng(9, 3)
    key = keygen(53, 3, g)
    e = sample_error(53, 4, g)
    assert samples[3] == best_first_threshold(key, e, 106, (1, 3))


def test_calibrate_needs_enough_samples():
    with pytest.raises(ValueError):
        calibrate(53, CodeParams(53, 6, 4), 10, 1, t_range=(1, 3))


def test_output_formats():
    samples = [S(10, 3), S(20, 4)]
    fit = least_squares_fit(samples, 53)
    assert samples_csv(samples) == "syndrome_weight,best_threshold\n10,3\n20,4\n"
    assert fit.summary_line().startswith("53,")
    lines = plot_data(samples, fit).splitlines()
    assert lines[1] == "sample,10,3"
    assert lines[-1].startswith("fit,20,")
