"""Spectrogram series: per-year counts and windowed median deviation."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crkit.model import CitedReference, Dataset
from crkit.spectroscopy import SpectrumPoint, median_deviation, spectrogram, year_counts

from conftest import make_dataset


def series(counts: list[int], start: int = 1950) -> tuple[SpectrumPoint, ...]:
    return tuple(SpectrumPoint(rpy=start + i, n_cr=c) for i, c in enumerate(counts))


def test_demo_cohort_single_point(demo_dataset):
    assert year_counts(demo_dataset) == (SpectrumPoint(rpy=1980, n_cr=280),)


def test_counts_zero_filled():
    crs = {
        "a": CitedReference(id="a", rpy=1950, n_cr=4, per_year={1980: 4}),
        "b": CitedReference(id="b", rpy=1952, n_cr=1, per_year={1981: 1}),
    }
    ds = make_dataset(crs, citing_year_range=(1980, 1985), rpy_range=(1950, 1952))
    assert [(p.rpy, p.n_cr) for p in year_counts(ds)] == [(1950, 4), (1951, 0), (1952, 1)]


def test_empty_dataset_zero_series():
    ds = make_dataset({}, citing_year_range=None, rpy_range=(1990, 1992))
    assert [(p.rpy, p.n_cr) for p in year_counts(ds)] == [(1990, 0), (1991, 0), (1992, 0)]


def test_no_year_range_no_series():
    assert year_counts(Dataset()) == ()
    assert spectrogram(Dataset()) == ()


def test_median_deviation_center():
    out = median_deviation(series([5, 3, 12, 4, 6]), half_window=2)
    # middle year: median of all five values is 5, so the deviation is +7
    assert out[2].median_dev == 7


def test_median_deviation_truncated_window():
    out = median_deviation(series([5, 3, 12]), half_window=2)
    assert out[0].median_dev == 0  # window {5,3,12}, median 5


def test_constant_series_zero_everywhere():
    out = median_deviation(series([4] * 7))
    assert all(p.median_dev == 0 for p in out)


def test_even_window_uses_lower_middle():
    # first year of a 4-long series with window 2: values {8,2} + {9} -> {2,8,9}? no:
    # window is [0-2, 0+2] -> indexes 0..2 -> {8,2,9}, median 8 -> dev 0.
    # second year: indexes 0..3 -> {8,2,9,1} sorted {1,2,8,9}, lower middle 2 -> dev 0.
    out = median_deviation(series([8, 2, 9, 1]), half_window=2)
    assert out[0].median_dev == 0
    assert out[1].median_dev == 0


def test_rejects_zero_window():
    with pytest.raises(ValueError):
        median_deviation(series([1, 2, 3]), half_window=0)


@given(st.lists(st.integers(0, 100), min_size=1, max_size=20), st.integers(1, 4))
def test_length_preserved(counts, half_window):
    out = median_deviation(series(counts), half_window)
    assert len(out) == len(counts)
    assert [p.rpy for p in out] == [1950 + i for i in range(len(counts))]


@given(
    st.lists(st.integers(0, 100), min_size=1, max_size=20),
    st.integers(1, 4),
    st.integers(-50, 50),
)
def test_translation_equivariance(counts, half_window, shift):
    base = median_deviation(series(counts), half_window)
    moved = median_deviation(
        tuple(SpectrumPoint(p.rpy, p.n_cr + 100 + shift) for p in series(counts)),
        half_window,
    )
    assert [p.median_dev for p in base] == [p.median_dev for p in moved]


@given(st.integers(1, 50), st.integers(1, 20), st.integers(1, 4))
def test_constant_series_sums_to_zero(value, length, half_window):
    out = median_deviation(series([value] * length), half_window)
    assert sum(p.median_dev for p in out) == 0


def test_mass_conservation(demo_dataset):
    assert sum(p.n_cr for p in year_counts(demo_dataset)) == demo_dataset.total_citations()
