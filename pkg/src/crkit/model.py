"""Core domain types: cited references, citing publications, per-cohort
citation matrices, and the mutable analysis dataset.

All types are immutable value objects once constructed and safe to share
across concurrent readers. Dataset mutations (merge, delete, undo) are
functional: each returns a new Dataset and appends a reversible event to
its history.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping

from .errors import EmptyCohort, EmptyHistory, IntegrityError, NotFound

# (last name, initials); initials may be empty for corporate/mononym authors.
Author = tuple[str, str]


@dataclass(frozen=True, eq=True)
class ParsedRef:
    """Structured fields extracted from one reference string."""

    author: str
    year: int
    source: str
    volume: str | None = None
    page: str | None = None
    doi: str | None = None
    title: str | None = None


@dataclass(frozen=True, eq=True)
class RawReference:
    """One reference occurrence as it appeared in an export file."""

    source_pub_id: str
    raw_text: str
    parsed: ParsedRef | None = None


@dataclass(frozen=True, eq=True)
class CitingPublication:
    """A publication in the analyzed set, carrying its raw reference list."""

    id: str
    pub_year: int
    raw_refs: tuple[RawReference, ...] = ()


@dataclass(frozen=True, eq=True)
class CitedReference:
    """One deduplicated cited work.

    n_cr is the total occurrence count across the analyzed set and must
    equal the sum of the per-citing-year counts.
    """

    id: str
    rpy: int
    source: str = ""
    authors: tuple[Author, ...] = ()
    title: str | None = None
    volume: str | None = None
    page: str | None = None
    doi: str | None = None
    n_cr: int = 0
    per_year: Mapping[int, int] = field(default_factory=dict)

    def cited_years(self) -> list[int]:
        """Citing years with at least one citation, ascending."""
        return sorted(y for y, c in self.per_year.items() if c > 0)


@dataclass(frozen=True, eq=True)
class MergeRecord:
    """Pre-merge state of one cluster: the representative and the variants
    that were folded into it."""

    representative_before: CitedReference
    removed: tuple[CitedReference, ...]


@dataclass(frozen=True, eq=True)
class MergeEvent:
    kind = "merge"
    records: tuple[MergeRecord, ...]


@dataclass(frozen=True, eq=True)
class DeleteEvent:
    kind = "delete"
    removed: tuple[CitedReference, ...]


HistoryEvent = MergeEvent | DeleteEvent


@dataclass(frozen=True, eq=True)
class Dataset:
    """Session state: cited references, citing publications, year ranges,
    and the reversible mutation history."""

    crs: Mapping[str, CitedReference] = field(default_factory=dict)
    pubs: Mapping[str, CitingPublication] = field(default_factory=dict)
    citing_year_range: tuple[int, int] | None = None
    rpy_range: tuple[int, int] | None = None
    history: tuple[HistoryEvent, ...] = ()

    def total_citations(self) -> int:
        return sum(cr.n_cr for cr in self.crs.values())

    def cohort_ids(self, rpy: int) -> list[str]:
        """Ids of cited references published in `rpy`, ascending."""
        return sorted(cr_id for cr_id, cr in self.crs.items() if cr.rpy == rpy)

    def cohort_years(self) -> list[int]:
        """Distinct reference publication years present, ascending."""
        return sorted({cr.rpy for cr in self.crs.values()})

    def validate(self) -> None:
        """Check structural invariants; raises IntegrityError on violation."""
        for cr_id, cr in self.crs.items():
            if cr.id != cr_id:
                raise IntegrityError(f"cr key {cr_id!r} does not match id {cr.id!r}")
            if cr.n_cr != sum(cr.per_year.values()):
                raise IntegrityError(f"{cr_id}: n_cr != sum of per-year counts")
            if any(c < 0 for c in cr.per_year.values()):
                raise IntegrityError(f"{cr_id}: negative per-year count")
            if self.citing_year_range is not None:
                lo, hi = self.citing_year_range
                bad = [y for y in cr.per_year if not lo <= y <= hi]
                if bad:
                    raise IntegrityError(f"{cr_id}: citing years {bad} outside {lo}-{hi}")
            if self.rpy_range is not None:
                lo, hi = self.rpy_range
                if not lo <= cr.rpy <= hi:
                    raise IntegrityError(f"{cr_id}: rpy {cr.rpy} outside {lo}-{hi}")
        if self.pubs:
            years = [p.pub_year for p in self.pubs.values()]
            derived = (min(years), max(years))
            if self.citing_year_range != derived:
                raise IntegrityError(
                    f"citing_year_range {self.citing_year_range} != derived {derived}"
                )


@dataclass(frozen=True, eq=True)
class CitationMatrix:
    """Cross-classification of one reference-publication-year cohort:
    rows are cited references, columns are consecutive citing years,
    cells are citation counts.

    Citations recorded for a year earlier than the cohort year are counted
    in the first column (a cited work cannot be cited before it exists in
    the dataset's view); each such remap is reported in `warnings`.
    """

    rpy: int
    cr_ids: tuple[str, ...]
    citing_years: tuple[int, ...]
    cells: tuple[tuple[int, ...], ...]
    row_totals: tuple[int, ...]
    col_totals: tuple[int, ...]
    grand_total: int
    warnings: tuple[str, ...] = ()

    def row(self, cr_id: str) -> tuple[int, ...]:
        return self.cells[self.cr_ids.index(cr_id)]

    def iter_cells(self) -> Iterator[tuple[int, int, int]]:
        """Yields (row index, column index, count)."""
        for i, row in enumerate(self.cells):
            for j, count in enumerate(row):
                yield i, j, count


def build_matrix(dataset: Dataset, rpy: int) -> CitationMatrix:
    """Build the citation matrix for one cohort year.

    Rows are the cohort's cited references in ascending id order; columns
    run from max(rpy, first citing year) through the last citing year,
    with zero cells materialized. Raises EmptyCohort when the cohort has
    no members or no citing-year column.
    """
    ids = dataset.cohort_ids(rpy)
    if not ids:
        raise EmptyCohort(f"no cited reference with publication year {rpy}")
    if dataset.citing_year_range is None:
        raise EmptyCohort("dataset has no citing publications, so no citing years")
    y_min, y_max = dataset.citing_year_range
    first = max(rpy, y_min)
    if first > y_max:
        raise EmptyCohort(f"cohort year {rpy} lies after the last citing year {y_max}")
    years = tuple(range(first, y_max + 1))

    warnings: list[str] = []
    cells: list[tuple[int, ...]] = []
    for cr_id in ids:
        cr = dataset.crs[cr_id]
        row = [0] * len(years)
        for year, count in sorted(cr.per_year.items()):
            if count == 0:
                continue
            if year < first:
                row[0] += count
                warnings.append(
                    f"{cr_id}: {count} citation(s) dated {year} precede cohort year "
                    f"{rpy}; counted in {first}"
                )
            else:
                row[year - first] += count
        cells.append(tuple(row))

    row_totals = tuple(sum(row) for row in cells)
    col_totals = tuple(sum(row[j] for row in cells) for j in range(len(years)))
    return CitationMatrix(
        rpy=rpy,
        cr_ids=tuple(ids),
        citing_years=years,
        cells=tuple(cells),
        row_totals=row_totals,
        col_totals=col_totals,
        grand_total=sum(row_totals),
        warnings=tuple(warnings),
    )


def _merged_cr(representative: CitedReference, members: tuple[CitedReference, ...]) -> CitedReference:
    per_year = dict(representative.per_year)
    n_cr = representative.n_cr
    for member in members:
        for year, count in member.per_year.items():
            per_year[year] = per_year.get(year, 0) + count
        n_cr += member.n_cr
    return replace(representative, n_cr=n_cr, per_year=per_year)


def apply_merge(dataset: Dataset, groups: list[tuple[str, list[str]]]) -> Dataset:
    """Fold each (representative id, member ids) group onto its representative.

    Member counts are summed element-wise into the representative and the
    members removed; one reversible MergeEvent covers the whole call.
    Raises NotFound when any referenced id is missing.
    """
    crs = dict(dataset.crs)
    records: list[MergeRecord] = []
    for rep_id, member_ids in groups:
        missing = [i for i in [rep_id, *member_ids] if i not in crs]
        if missing:
            raise NotFound(f"unknown cited reference id(s): {', '.join(sorted(missing))}")
        rep = crs[rep_id]
        members = tuple(crs[i] for i in member_ids)
        records.append(MergeRecord(representative_before=rep, removed=members))
        crs[rep_id] = _merged_cr(rep, members)
        for member_id in member_ids:
            del crs[member_id]
    event = MergeEvent(records=tuple(records))
    return replace(dataset, crs=crs, history=dataset.history + (event,))


def apply_delete(dataset: Dataset, cr_ids: list[str]) -> Dataset:
    """Remove the given cited references, recording a reversible DeleteEvent."""
    missing = [i for i in cr_ids if i not in dataset.crs]
    if missing:
        raise NotFound(f"unknown cited reference id(s): {', '.join(sorted(missing))}")
    crs = dict(dataset.crs)
    removed = tuple(crs.pop(i) for i in sorted(set(cr_ids)))
    event = DeleteEvent(removed=removed)
    return replace(dataset, crs=crs, history=dataset.history + (event,))


def undo_last(dataset: Dataset) -> Dataset:
    """Reverse the most recent mutation exactly; raises EmptyHistory if none."""
    if not dataset.history:
        raise EmptyHistory("no mutation to undo")
    event = dataset.history[-1]
    crs = dict(dataset.crs)
    if isinstance(event, MergeEvent):
        # Reverse cluster by cluster, last first, restoring pre-merge rows.
        for record in reversed(event.records):
            rep = record.representative_before
            crs[rep.id] = rep
            for member in record.removed:
                crs[member.id] = member
    else:
        for cr in event.removed:
            crs[cr.id] = cr
    return replace(dataset, crs=crs, history=dataset.history[:-1])
