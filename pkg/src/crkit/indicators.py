"""Longevity indicators for cited references.

Per cited reference and cohort this module computes:

* N_PYEARS   — number of citing years with at least one citation,
* PERC_PYEAR — N_PYEARS as a percentage of the citing years in which the
               cohort received any citation at all,
* N_TOPf     — number of citing years in which the reference's citation
               count strictly exceeds the cohort's top-f percentile
               threshold for that year.

Thresholds use the rank statistic at 1-based rank k = max(1, floor(q*n))
over the ascending-sorted pool, with q = 1 - f. The pool for year t is the
cohort's cell values from the citing years [t-R, t+R] clipped to the
matrix range, where R is the configurable pooling half-width (R=0 pools
the single year; zero cells enter the pool as-is).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ConfigError, EmptyCohort, EmptyInput
from .model import CitationMatrix, CitedReference

DEFAULT_FRACTIONS = (0.50, 0.25, 0.10)


@dataclass(frozen=True)
class NpctConfig:
    """Percentile-threshold settings: pooling half-width and top fractions."""

    window: int = 0
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS

    def __post_init__(self) -> None:
        if self.window < 0:
            raise ConfigError(f"pooling window must be >= 0, got {self.window}")
        if not self.fractions:
            raise ConfigError("at least one top fraction is required")
        for f in self.fractions:
            if not 0.0 < f < 1.0:
                raise ConfigError(f"top fraction must lie in (0, 1), got {f}")


@dataclass(frozen=True)
class IndicatorSet:
    """Computed indicator values for one cited reference."""

    n_pyears: int
    perc_pyear: float
    top_counts: Mapping[float, int] = field(default_factory=dict)

    @property
    def n_top50(self) -> int:
        return self.top_counts.get(0.50, 0)

    @property
    def n_top25(self) -> int:
        return self.top_counts.get(0.25, 0)

    @property
    def n_top10(self) -> int:
        return self.top_counts.get(0.10, 0)


def n_pyears(cr: CitedReference) -> int:
    """Number of citing years in which the reference was cited at all."""
    return sum(1 for count in cr.per_year.values() if count > 0)


def _exact(q: float | Fraction) -> Fraction:
    # str() round-trips the shortest decimal repr, so config literals like
    # 0.9 become exactly 9/10 instead of the nearest binary float.
    return q if isinstance(q, Fraction) else Fraction(str(q))


def percentile_threshold(values: Sequence[int], q: float | Fraction) -> int:
    """Rank-based percentile: the element at 1-based rank max(1, floor(q*n))
    of the ascending sort."""
    if not values:
        raise EmptyInput("percentile of an empty pool")
    q = _exact(q)
    if not 0 < q < 1:
        raise ConfigError(f"percentile must lie in (0, 1), got {q}")
    ordered = sorted(values)
    rank = max(1, int(q * len(ordered)))
    return ordered[rank - 1]


def year_thresholds(matrix: CitationMatrix, fraction: float, window: int = 0) -> list[int]:
    """Per-citing-year thresholds for the top-`fraction` class.

    For column t the pool is every cohort cell from columns [t-R, t+R]
    clipped to the matrix, sorted ascending; the threshold is the
    (1 - fraction) rank statistic of that pool.
    """
    q = 1 - _exact(fraction)
    n_cols = len(matrix.citing_years)
    thresholds = []
    for t in range(n_cols):
        lo = max(0, t - window)
        hi = min(n_cols - 1, t + window)
        pool = [row[j] for row in matrix.cells for j in range(lo, hi + 1)]
        thresholds.append(percentile_threshold(pool, q))
    return thresholds


def above_threshold_flags(
    matrix: CitationMatrix, fraction: float, window: int = 0
) -> dict[str, tuple[int, ...]]:
    """Per-reference 0/1 flags: 1 where the cell strictly exceeds the year's
    threshold."""
    thresholds = year_thresholds(matrix, fraction, window)
    return {
        cr_id: tuple(int(count > thresholds[j]) for j, count in enumerate(row))
        for cr_id, row in zip(matrix.cr_ids, matrix.cells)
    }


def top_counts(matrix: CitationMatrix, cfg: NpctConfig) -> dict[str, dict[float, int]]:
    """N_TOPf for every reference in the cohort, for every configured fraction."""
    counts: dict[str, dict[float, int]] = {cr_id: {} for cr_id in matrix.cr_ids}
    for fraction in cfg.fractions:
        flags = above_threshold_flags(matrix, fraction, cfg.window)
        for cr_id, row in flags.items():
            counts[cr_id][fraction] = sum(row)
    return counts


def cohort_indicators(matrix: CitationMatrix, cfg: NpctConfig) -> dict[str, IndicatorSet]:
    """Full indicator set per reference, computed from the cohort matrix.

    The PERC_PYEAR denominator is the number of citing years in which the
    cohort as a whole received at least one citation.
    """
    denominator = sum(1 for total in matrix.col_totals if total > 0)
    if denominator == 0:
        raise EmptyCohort(
            f"cohort {matrix.rpy} has no citations in any citing year"
        )
    tops = top_counts(matrix, cfg)
    result: dict[str, IndicatorSet] = {}
    for cr_id, row in zip(matrix.cr_ids, matrix.cells):
        cited = sum(1 for count in row if count > 0)
        result[cr_id] = IndicatorSet(
            n_pyears=cited,
            perc_pyear=100.0 * cited / denominator,
            top_counts=tops[cr_id],
        )
    return result
