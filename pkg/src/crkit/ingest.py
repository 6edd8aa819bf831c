"""Parsers for bibliographic export files and occurrence aggregation.

Two input formats are supported:

* Tagged-field export — records separated by a line ``ER``; a field is a
  2-character tag, a space, and a value; continuation lines start with
  three spaces. ``PY`` carries the publication year; each ``CR`` line or
  continuation is one cited-reference string.
* Reference CSV — RFC-4180 file with required columns ``Year`` and
  ``References``; references inside a cell are separated by ``"; "``
  applied outside double quotes.

Both use one reference grammar, comma-space separated::

    AUTHOR, YEAR[, TITLE], SOURCE[, V<volume>][, P<page>][, DOI <doi>]

YEAR must be a 4-digit number no later than next year. The optional TITLE
segment appears when two untagged segments follow the year (CSV exports
commonly carry titles; tagged exports do not). Unrecognized trailing
segments are ignored — the grammar is deliberately lenient. Unparseable
references are retained (visible for manual curation) with a warning.

Parsers never raise on malformed content beyond a missing record
delimiter / header: any byte input yields a Dataset plus a report, or a
single FormatError.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from datetime import date

from .errors import FormatError
from .model import (
    Author,
    CitedReference,
    CitingPublication,
    Dataset,
    ParsedRef,
    RawReference,
)

_YEAR_MIN = 1000
_TAG_LINE = re.compile(r"^([A-Z0-9]{2})( (.*))?$")
_VOLUME = re.compile(r"^V(\w+)$")
_PAGE = re.compile(r"^P(\w+)$")
_DOI = re.compile(r"^DOI (.+)$")
_INITIALS = re.compile(r"^[A-Z\-\.]{1,5}$")


@dataclass
class ParseReport:
    n_records: int = 0
    n_pubs: int = 0
    n_refs: int = 0
    n_parsed: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass
class AggregateReport:
    n_occurrences: int = 0
    n_kept: int = 0
    n_filtered: int = 0
    n_unparsed: int = 0
    n_crs: int = 0


def _max_year() -> int:
    return date.today().year + 1


def _valid_year(token: str) -> int | None:
    # isdigit() alone admits unicode digits that int() rejects
    if len(token) == 4 and token.isascii() and token.isdigit():
        year = int(token)
        if _YEAR_MIN <= year <= _max_year():
            return year
    return None


def parse_reference(text: str) -> ParsedRef | None:
    """Parse one reference string per the grammar; None when it does not fit."""
    segments = [s.strip() for s in text.split(", ")]
    if len(segments) < 3:
        return None
    author = segments[0]
    year = _valid_year(segments[1])
    if author == "" or year is None:
        return None

    volume = page = doi = None
    plain: list[str] = []
    for segment in segments[2:]:
        if (m := _VOLUME.match(segment)) and segment[1:].isalnum() and segment[1].isdigit():
            if volume is None:
                volume = m.group(1)
            continue
        if (m := _PAGE.match(segment)) and segment[1:].isalnum() and segment[1].isdigit():
            if page is None:
                page = m.group(1)
            continue
        if m := _DOI.match(segment):
            if doi is None:
                doi = m.group(1)
            continue
        plain.append(segment)
    if not plain or not plain[0]:
        return None
    if len(plain) >= 2:
        title, source = plain[0], plain[1]
    else:
        title, source = None, plain[0]
    return ParsedRef(
        author=author, year=year, source=source,
        volume=volume, page=page, doi=doi, title=title,
    )


def parse_authors(author_segment: str) -> tuple[Author, ...]:
    """Split an author segment like ``LOTKA AJ`` into (last name, initials);
    semicolons separate multiple authors."""
    authors = []
    for part in author_segment.split(";"):
        tokens = part.split()
        if not tokens:
            continue
        if len(tokens) >= 2 and _INITIALS.match(tokens[-1]):
            authors.append((" ".join(tokens[:-1]), tokens[-1]))
        else:
            authors.append((" ".join(tokens), ""))
    return tuple(authors)


def _decode(text: str | bytes) -> str:
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    return text.lstrip("﻿")


def _pub_id(n: int) -> str:
    return f"pub-{n:06d}"


def _dataset_from_pubs(pubs: list[CitingPublication]) -> Dataset:
    years = [p.pub_year for p in pubs]
    return Dataset(
        crs={},
        pubs={p.id: p for p in pubs},
        citing_year_range=(min(years), max(years)) if years else None,
        rpy_range=None,
    )


def parse_tagged(text: str | bytes) -> tuple[Dataset, ParseReport]:
    """Parse a tagged-field export into citing publications with raw
    references. Raises FormatError when no record delimiter exists."""
    content = _decode(text)
    report = ParseReport()
    lines = content.splitlines()
    if not any(line.rstrip() == "ER" for line in lines):
        raise FormatError("no record delimiter (ER line) found")

    pubs: list[CitingPublication] = []
    record_lines: list[str] = []
    records: list[list[str]] = []
    for line in lines:
        if line.rstrip() == "ER":
            records.append(record_lines)
            record_lines = []
        else:
            record_lines.append(line)
    if any(line.strip() for line in record_lines):
        report.warnings.append("trailing record without ER terminator was parsed")
        records.append(record_lines)

    for number, record in enumerate(records, start=1):
        fields: list[tuple[str, list[str]]] = []
        for line in record:
            if m := _TAG_LINE.match(line):
                fields.append((m.group(1), [m.group(3) or ""]))
            elif line.startswith("   ") and fields:
                fields[-1][1].append(line[3:])
            elif line.strip():
                report.warnings.append(
                    f"record {number}: unrecognized line {line[:40]!r} ignored"
                )
        if not fields:
            continue
        report.n_records += 1

        pub_year = None
        ref_texts: list[str] = []
        for tag, values in fields:
            if tag == "PY" and pub_year is None:
                pub_year = _valid_year(values[0].strip())
            elif tag == "CR":
                ref_texts.extend(v for v in (v.strip() for v in values) if v)
        if pub_year is None:
            # Header-only records (no references) drop silently; losing
            # references is worth a warning.
            if ref_texts:
                report.warnings.append(
                    f"record {number}: missing or invalid PY; {len(ref_texts)} reference(s) skipped"
                )
            continue

        pub_id = _pub_id(len(pubs) + 1)
        refs = []
        for ref_text in ref_texts:
            parsed = parse_reference(ref_text)
            report.n_refs += 1
            if parsed is None:
                report.warnings.append(
                    f"record {number}: unparseable reference {ref_text[:60]!r}"
                )
            else:
                report.n_parsed += 1
            refs.append(RawReference(source_pub_id=pub_id, raw_text=ref_text, parsed=parsed))
        pubs.append(CitingPublication(id=pub_id, pub_year=pub_year, raw_refs=tuple(refs)))

    report.n_pubs = len(pubs)
    return _dataset_from_pubs(pubs), report


def split_references_cell(cell: str) -> list[str]:
    """Split a references cell on '; ' occurring outside double quotes;
    fully quoted pieces are unwrapped."""
    pieces: list[str] = []
    buffer: list[str] = []
    in_quotes = False
    i = 0
    while i < len(cell):
        char = cell[i]
        if char == '"':
            in_quotes = not in_quotes
            buffer.append(char)
            i += 1
        elif not in_quotes and cell.startswith("; ", i):
            pieces.append("".join(buffer))
            buffer = []
            i += 2
        else:
            buffer.append(char)
            i += 1
    pieces.append("".join(buffer))

    out = []
    for piece in pieces:
        piece = piece.strip()
        if len(piece) >= 2 and piece[0] == '"' and piece[-1] == '"':
            piece = piece[1:-1].strip()
        if piece:
            out.append(piece)
    return out


def parse_refcsv(text: str | bytes) -> tuple[Dataset, ParseReport]:
    """Parse a reference CSV into citing publications with raw references.
    Raises FormatError when the required Year/References columns are absent."""
    content = _decode(text)
    report = ParseReport()
    try:
        rows = list(csv.reader(io.StringIO(content)))
    except csv.Error as exc:
        raise FormatError(f"unreadable CSV: {exc}") from exc
    if not rows:
        raise FormatError("empty file: no header row")

    header = [h.strip().casefold() for h in rows[0]]
    try:
        year_col = header.index("year")
        refs_col = header.index("references")
    except ValueError:
        raise FormatError("header must contain Year and References columns") from None

    pubs: list[CitingPublication] = []
    for number, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        report.n_records += 1
        if len(row) <= max(year_col, refs_col):
            report.warnings.append(f"row {number}: too few columns; skipped")
            continue
        pub_year = _valid_year(row[year_col].strip())
        if pub_year is None:
            report.warnings.append(f"row {number}: missing or invalid Year; skipped")
            continue
        pub_id = _pub_id(len(pubs) + 1)
        refs = []
        for ref_text in split_references_cell(row[refs_col]):
            parsed = parse_reference(ref_text)
            report.n_refs += 1
            if parsed is None:
                report.warnings.append(
                    f"row {number}: unparseable reference {ref_text[:60]!r}"
                )
            else:
                report.n_parsed += 1
            refs.append(RawReference(source_pub_id=pub_id, raw_text=ref_text, parsed=parsed))
        pubs.append(CitingPublication(id=pub_id, pub_year=pub_year, raw_refs=tuple(refs)))

    report.n_pubs = len(pubs)
    return _dataset_from_pubs(pubs), report


def _fold(text: str | None) -> str:
    return " ".join((text or "").casefold().split())


def aggregate(
    dataset: Dataset, rpy_range: tuple[int, int] | None = None
) -> tuple[Dataset, AggregateReport]:
    """Collapse identical reference occurrences into CitedReferences.

    The aggregation key is the case-folded, whitespace-collapsed
    (author, year, source, volume, page) tuple; fuzzy variant matching is
    a separate stage. Occurrences outside `rpy_range` are dropped and
    counted in the report. Ids are assigned in sorted key order, so
    aggregation is deterministic.
    """
    report = AggregateReport()
    groups: dict[tuple, dict] = {}
    for pub_id in sorted(dataset.pubs):
        pub = dataset.pubs[pub_id]
        for ref in pub.raw_refs:
            if ref.parsed is None:
                report.n_unparsed += 1
                continue
            parsed = ref.parsed
            report.n_occurrences += 1
            if rpy_range is not None and not rpy_range[0] <= parsed.year <= rpy_range[1]:
                report.n_filtered += 1
                continue
            report.n_kept += 1
            key = (
                _fold(parsed.author),
                parsed.year,
                _fold(parsed.source),
                _fold(parsed.volume),
                _fold(parsed.page),
            )
            group = groups.setdefault(
                key,
                {"first": parsed, "title": None, "doi": None, "per_year": {}},
            )
            group["per_year"][pub.pub_year] = group["per_year"].get(pub.pub_year, 0) + 1
            if group["title"] is None and parsed.title:
                group["title"] = parsed.title
            if group["doi"] is None and parsed.doi:
                group["doi"] = parsed.doi

    crs = {}
    for n, key in enumerate(sorted(groups), start=1):
        group = groups[key]
        first: ParsedRef = group["first"]
        cr_id = f"cr-{n:06d}"
        per_year = dict(sorted(group["per_year"].items()))
        crs[cr_id] = CitedReference(
            id=cr_id,
            rpy=first.year,
            source=first.source,
            authors=parse_authors(first.author),
            title=group["title"],
            volume=first.volume,
            page=first.page,
            doi=group["doi"],
            n_cr=sum(per_year.values()),
            per_year=per_year,
        )
    report.n_crs = len(crs)

    if rpy_range is None:
        rpy_range = (
            (min(cr.rpy for cr in crs.values()), max(cr.rpy for cr in crs.values()))
            if crs
            else None
        )
    out = Dataset(
        crs=crs,
        pubs=dataset.pubs,
        citing_year_range=dataset.citing_year_range,
        rpy_range=rpy_range,
        history=dataset.history,
    )
    return out, report
