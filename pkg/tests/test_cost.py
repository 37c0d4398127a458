import time

import pytest
from hypothesis import given, strategies as st

from bikebf.cost import (
    LOGIC_XORS_LAYERED,
    LOGIC_XORS_NONLAYERED,
    ceil_log2,
    cost_report,
    latency,
    ram_sizes,
    total_area,
)

LAYERED_COLUMN = [12992, 25984, 12992, 1988, 40964, 3780, 34503, 115304]
NONLAYERED_COLUMN = [12095, 24192, 24192, 1988, 50372, 5134, 42913, 107352]


def column(report):
    return [value for _, value in report.rows()]


def test_layered_column():
    start = time.perf_counter()
    assert column(cost_report(12992, 142, 32, True)) == LAYERED_COLUMN
    assert time.perf_counter() - start < 1.0


def test_nonlayered_column():
    assert column(cost_report(12095, 142, 32, False)) == NONLAYERED_COLUMN


def test_default_logic_counts():
    assert cost_report(12992, 142, 32, True).logic_xors == LOGIC_XORS_LAYERED
    assert cost_report(12095, 142, 32, False).logic_xors == LOGIC_XORS_NONLAYERED
    assert cost_report(12992, 142, 32, True, logic_xors=0).total_area_xors == 30723


def test_ceil_log2():
    assert [ceil_log2(r) for r in (1, 2, 3, 4, 5, 12992, 16384, 16385)] == [0, 1, 2, 2, 3, 14, 14, 15]


def test_degenerate_r_equals_L():
    assert ram_sizes(32, 6, 32, True) == (64, 64, 2 * 5 * 3)
    assert ram_sizes(32, 6, 32, False) == (64, 128, 30)


@given(st.integers(1, 64), st.integers(1, 200).map(lambda d: 2 * d))
def test_latency_at_r_equal_L(L, w):
    assert latency(L, w, L) == 2 * w


def test_latency_scales_with_iterations():
    assert latency(12992, 142, 32, iterations=7) == 7 * 115304


@given(st.integers(1, 30000), st.integers(1, 150).map(lambda d: 2 * d), st.sampled_from([1, 8, 16, 32, 64, 128]))
def test_nonlayered_syndrome_ram_is_twice_layered(r, w, L):
    lay = ram_sizes(r, w, L, True)
    non = ram_sizes(r, w, L, False)
    assert non[1] == 2 * lay[1]
    assert non[0] == lay[0] and non[2] == lay[2]


@given(st.integers(1, 30000), st.integers(1, 150).map(lambda d: 2 * d), st.sampled_from([1, 8, 32, 64]))
def test_monotone_in_r(r, w, L):
    a, b = ram_sizes(r, w, L, True), ram_sizes(r + 1, w, L, True)
    assert all(x <= y for x, y in zip(a, b))
    assert latency(r, w, L) <= latency(r + 1, w, L)


@given(st.integers(1, 30000), st.integers(1, 150).map(lambda d: 2 * d), st.sampled_from([8, 32, 64]))
def test_rams_hold_the_data(r, w, L):
    e, s, i = ram_sizes(r, w, L, True)
    assert 2 * r <= e < 2 * r + L
    assert e % L == 0 and s % L == 0
    assert s >= r
    assert i == w * ceil_log2(r)


def test_area_rounding():
    assert total_area(4, 0) == 3
    assert total_area(2, 0) == 2  # 1.5 rounds up
    assert total_area(1, 10) == 11  # 0.75 rounds up


def test_bad_arguments():
    with pytest.raises(ValueError):
        ram_sizes(0, 142, 32, True)
    with pytest.raises(ValueError):
        ram_sizes(100, 141, 32, True)
    with pytest.raises(ValueError):
        latency(100, 142, 0)
    with pytest.raises(ValueError):
        total_area(-1, 0)


def test_table_layout():
    lines = cost_report(12992, 142, 32, True).table().splitlines()
    assert lines[0].split() == ["r", "value", "12992"]
    assert lines[-1].endswith("115304")
