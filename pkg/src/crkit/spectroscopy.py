"""Spectrogram series: cited-reference counts per reference publication year
and their deviation from a windowed median."""

from __future__ import annotations

from dataclasses import dataclass, replace


from .model import Dataset


@dataclass(frozen=True)
class SpectrumPoint:
    rpy: int
    n_cr: int
    median_dev: int | None = None


def year_counts(dataset: Dataset) -> tuple[SpectrumPoint, ...]:
    """Total occurrences per reference publication year, zero-filled over
    the dataset's year range, ascending."""
    if dataset.rpy_range is None:
        return ()
    lo, hi = dataset.rpy_range
    counts = dict.fromkeys(range(lo, hi + 1), 0)
    for cr in dataset.crs.values():
        counts[cr.rpy] += cr.n_cr
    return tuple(SpectrumPoint(rpy=year, n_cr=counts[year]) for year in range(lo, hi + 1))


def _median(values: list[int]) -> int:
    # Even-sized windows take the lower-middle element: integer-preserving
    # and deterministic.
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def median_deviation(
    series: tuple[SpectrumPoint, ...], half_window: int = 2
) -> tuple[SpectrumPoint, ...]:
    """Deviation of each year's count from the median over the years within
    `half_window` of it; the window truncates at the series boundaries."""
    if half_window < 1:
        raise ValueError(f"half_window must be >= 1, got {half_window}")
    counts = [p.n_cr for p in series]
    out = []
    for i, point in enumerate(series):
        window = counts[max(0, i - half_window) : i + half_window + 1]
        out.append(replace(point, median_dev=point.n_cr - _median(window)))
    return tuple(out)


def spectrogram(dataset: Dataset, half_window: int = 2) -> tuple[SpectrumPoint, ...]:
    """Complete spectrogram series: counts plus median deviations."""
    series = year_counts(dataset)
    if not series:
        return ()
    return median_deviation(series, half_window)
