#!/usr/bin/env python3
"""Walk the classic four-reference demo cohort through the whole stack and
print every derived table: citation matrix, thresholds, indicators,
expected counts, z-values, sequences, and type labels.

Usage: python3 scripts/demo_cohort.py
"""

from __future__ import annotations

from crkit import cfa
from crkit.indicators import NpctConfig, cohort_indicators, year_thresholds
from crkit.model import CitedReference, CitingPublication, Dataset, build_matrix
from crkit.spectroscopy import spectrogram

CELLS = {
    "A": (6, 5, 0, 17, 24, 21),
    "B": (9, 9, 5, 10, 8, 9),
    "C": (20, 34, 0, 16, 5, 6),
    "D": (6, 10, 15, 25, 15, 5),
}
YEARS = range(1980, 1986)


def build() -> Dataset:
    crs = {
        cr_id: CitedReference(
            id=cr_id, rpy=1980, source=f"J {cr_id}",
            n_cr=sum(counts), per_year=dict(zip(YEARS, counts)),
        )
        for cr_id, counts in CELLS.items()
    }
    pubs = {f"p{y}": CitingPublication(id=f"p{y}", pub_year=y) for y in YEARS}
    return Dataset(crs=crs, pubs=pubs, citing_year_range=(1980, 1985), rpy_range=(1980, 1980))


def show(title: str, rows: list[str]) -> None:
    print(f"\n== {title}")
    for row in rows:
        print("  " + row)


def main() -> None:
    dataset = build()
    matrix = build_matrix(dataset, 1980)
    header = "      " + "".join(f"{y:>7}" for y in matrix.citing_years)

    show("observed counts", [header] + [
        f"{cr_id:>4}  " + "".join(f"{c:>7}" for c in matrix.row(cr_id)) + f"   | {t}"
        for cr_id, t in zip(matrix.cr_ids, matrix.row_totals)
    ] + [f" col  " + "".join(f"{t:>7}" for t in matrix.col_totals) + f"   | {matrix.grand_total}"])

    show("top-percentile thresholds", [
        f"top {int(f * 100):>2}%  " + "".join(f"{t:>7}" for t in year_thresholds(matrix, f))
        for f in (0.50, 0.25, 0.10)
    ])

    indicators = cohort_indicators(matrix, NpctConfig())
    show("indicators", [
        f"{cr_id}: N_PYEARS={v.n_pyears}  PERC_PYEAR={v.perc_pyear:6.2f}  "
        f"N_TOP50={v.n_top50}  N_TOP25={v.n_top25}  N_TOP10={v.n_top10}"
        for cr_id, v in indicators.items()
    ])

    result, _, _ = cfa.analyze_matrix(matrix)
    show("expected counts", [header] + [
        f"{cr_id:>4}  " + "".join(f"{e:>7.2f}" for e in row)
        for cr_id, row in zip(result.cr_ids, result.expected)
    ])
    show("z-values", [header] + [
        f"{cr_id:>4}  " + "".join(f"{z:>7.2f}" for z in row)
        for cr_id, row in zip(result.cr_ids, result.z)
    ] + [f"chi-square = {result.chi_square:.2f}  (df = {result.df})"])

    show("impact sequences", [
        f"{cr_id}: {seq.symbols}   -> {cfa.classify(seq)}"
        for cr_id, seq in (
            (c, cfa.sequence(c, result.z_row(c))) for c in result.cr_ids
        )
    ])

    show("spectrogram", [
        f"{p.rpy}: n_cr={p.n_cr} median_dev={p.median_dev}" for p in spectrogram(dataset)
    ])


if __name__ == "__main__":
    main()
