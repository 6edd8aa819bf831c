"""Shared fixtures: the canonical four-reference demo cohort (directly
constructed, as tagged-export text, and as a project document) plus small
builders used across the suite."""

from __future__ import annotations

import pytest

from crkit.ingest import parse_reference
from crkit.model import (
    CitationMatrix,
    CitedReference,
    CitingPublication,
    Dataset,
    RawReference,
    build_matrix,
)

# Citation counts of the demo cohort: four references published in 1980,
# cited 1980-1985. Totals: rows (73, 50, 81, 76), columns
# (41, 58, 20, 68, 52, 41), grand total 280.
DEMO_CELLS = {
    "A": (6, 5, 0, 17, 24, 21),
    "B": (9, 9, 5, 10, 8, 9),
    "C": (20, 34, 0, 16, 5, 6),
    "D": (6, 10, 15, 25, 15, 5),
}
DEMO_YEARS = tuple(range(1980, 1986))

DEMO_REF_STRINGS = {
    "A": "ALDER AB, 1980, J THEOR DYNAMICS",
    "B": "BECKER BC, 1980, ANN REGULARITY",
    "C": "CONWAY CD, 1980, REV EARLY IMPACT",
    "D": "DORAN DE, 1980, STUD STEADY GROWTH",
}


def raw_ref(pub_id: str, text: str) -> RawReference:
    return RawReference(source_pub_id=pub_id, raw_text=text, parsed=parse_reference(text))


def make_dataset(
    crs: dict[str, CitedReference],
    citing_year_range: tuple[int, int] | None,
    rpy_range: tuple[int, int] | None = None,
    pubs: dict[str, CitingPublication] | None = None,
) -> Dataset:
    return Dataset(
        crs=crs,
        pubs=pubs or {},
        citing_year_range=citing_year_range,
        rpy_range=rpy_range,
    )


def make_matrix(
    cells: list[list[int]], rpy: int = 2000, first_year: int = 2000
) -> CitationMatrix:
    """Build a CitationMatrix directly from a cell grid."""
    n_cols = len(cells[0])
    cr_ids = tuple(f"cr-{i:03d}" for i in range(len(cells)))
    rows = tuple(tuple(row) for row in cells)
    row_totals = tuple(sum(row) for row in rows)
    col_totals = tuple(sum(row[j] for row in rows) for j in range(n_cols))
    return CitationMatrix(
        rpy=rpy,
        cr_ids=cr_ids,
        citing_years=tuple(range(first_year, first_year + n_cols)),
        cells=rows,
        row_totals=row_totals,
        col_totals=col_totals,
        grand_total=sum(row_totals),
    )


@pytest.fixture(scope="session")
def demo_dataset() -> Dataset:
    crs = {}
    for cr_id, counts in DEMO_CELLS.items():
        per_year = {year: count for year, count in zip(DEMO_YEARS, counts)}
        crs[cr_id] = CitedReference(
            id=cr_id,
            rpy=1980,
            source=DEMO_REF_STRINGS[cr_id].split(", ")[2],
            authors=(tuple(DEMO_REF_STRINGS[cr_id].split(", ")[0].rsplit(" ", 1)),),
            n_cr=sum(counts),
            per_year=per_year,
        )
    pubs = {
        f"pub-{year}": CitingPublication(id=f"pub-{year}", pub_year=year)
        for year in DEMO_YEARS
    }
    dataset = Dataset(
        crs=crs, pubs=pubs, citing_year_range=(1980, 1985), rpy_range=(1980, 1980)
    )
    dataset.validate()
    return dataset


@pytest.fixture(scope="session")
def demo_matrix(demo_dataset) -> CitationMatrix:
    return build_matrix(demo_dataset, 1980)


@pytest.fixture(scope="session")
def demo_tagged_text() -> str:
    """The demo cohort as a tagged-field export: for every citing year, as
    many publications as the largest count, publication i citing each
    reference whose count exceeds i."""
    records = []
    for j, year in enumerate(DEMO_YEARS):
        n_pubs = max(counts[j] for counts in DEMO_CELLS.values())
        for i in range(n_pubs):
            refs = [
                DEMO_REF_STRINGS[cr_id]
                for cr_id in sorted(DEMO_CELLS)
                if DEMO_CELLS[cr_id][j] > i
            ]
            lines = ["PT J", f"PY {year}"]
            if refs:
                lines.append(f"CR {refs[0]}")
                lines.extend(f"   {r}" for r in refs[1:])
            lines.append("ER")
            records.append("\n".join(lines))
    return "\n".join(records) + "\n"


@pytest.fixture()
def demo_project_path(tmp_path, demo_dataset):
    from crkit.project import save_project

    path = tmp_path / "demo.crproj"
    path.write_bytes(save_project(demo_dataset))
    return path
