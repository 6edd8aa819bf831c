"""Native project format: a versioned, self-describing JSON document.

The document has four payload sections — ``meta`` (year ranges), ``pubs``,
``crs``, and ``history`` — plus a CRC-32 checksum over the canonical
(compact, key-sorted) serialization of the payload. Serialization is
deterministic: saving the same dataset twice yields identical bytes, and
``load(save(d)) == d`` including history. Raw reference strings are stored
verbatim and re-parsed on load, which keeps the file diffable.
"""

from __future__ import annotations

import json
import zlib
from typing import Any

from .errors import IntegrityError, VersionError
from .ingest import parse_reference
from .model import (
    CitedReference,
    CitingPublication,
    Dataset,
    DeleteEvent,
    HistoryEvent,
    MergeEvent,
    MergeRecord,
    RawReference,
)

FORMAT_MARKER = "crkit-project"
SCHEMA_VERSION = 1


def _cr_to_doc(cr: CitedReference) -> dict[str, Any]:
    return {
        "id": cr.id,
        "rpy": cr.rpy,
        "source": cr.source,
        "authors": [[last, initials] for last, initials in cr.authors],
        "title": cr.title,
        "volume": cr.volume,
        "page": cr.page,
        "doi": cr.doi,
        "n_cr": cr.n_cr,
        "per_year": {str(year): count for year, count in sorted(cr.per_year.items())},
    }


def _cr_from_doc(doc: dict[str, Any]) -> CitedReference:
    try:
        return CitedReference(
            id=doc["id"],
            rpy=int(doc["rpy"]),
            source=doc["source"],
            authors=tuple((last, initials) for last, initials in doc["authors"]),
            title=doc["title"],
            volume=doc["volume"],
            page=doc["page"],
            doi=doc["doi"],
            n_cr=int(doc["n_cr"]),
            per_year={int(year): int(count) for year, count in doc["per_year"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed cited-reference entry: {exc}") from exc


def _event_to_doc(event: HistoryEvent) -> dict[str, Any]:
    if isinstance(event, MergeEvent):
        return {
            "kind": "merge",
            "records": [
                {
                    "representative": _cr_to_doc(record.representative_before),
                    "removed": [_cr_to_doc(cr) for cr in record.removed],
                }
                for record in event.records
            ],
        }
    return {"kind": "delete", "removed": [_cr_to_doc(cr) for cr in event.removed]}


def _event_from_doc(doc: dict[str, Any]) -> HistoryEvent:
    kind = doc.get("kind")
    if kind == "merge":
        return MergeEvent(
            records=tuple(
                MergeRecord(
                    representative_before=_cr_from_doc(record["representative"]),
                    removed=tuple(_cr_from_doc(cr) for cr in record["removed"]),
                )
                for record in doc["records"]
            )
        )
    if kind == "delete":
        return DeleteEvent(removed=tuple(_cr_from_doc(cr) for cr in doc["removed"]))
    raise IntegrityError(f"unknown history event kind: {kind!r}")


def _payload(dataset: Dataset) -> dict[str, Any]:
    return {
        "meta": {
            "citing_year_range": list(dataset.citing_year_range)
            if dataset.citing_year_range
            else None,
            "rpy_range": list(dataset.rpy_range) if dataset.rpy_range else None,
        },
        "pubs": [
            {
                "id": pub.id,
                "pub_year": pub.pub_year,
                "refs": [ref.raw_text for ref in pub.raw_refs],
            }
            for pub_id, pub in sorted(dataset.pubs.items())
        ],
        "crs": [_cr_to_doc(cr) for _, cr in sorted(dataset.crs.items())],
        "history": [_event_to_doc(event) for event in dataset.history],
    }


def _checksum(payload: dict[str, Any]) -> int:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return zlib.crc32(canonical.encode("utf-8"))


def save_project(dataset: Dataset) -> bytes:
    """Serialize to the project document; deterministic byte-for-byte."""
    payload = _payload(dataset)
    doc = {
        "format": FORMAT_MARKER,
        "version": SCHEMA_VERSION,
        **payload,
        "checksum": _checksum(payload),
    }
    return (json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def load_project(data: bytes | str) -> Dataset:
    """Reconstruct a dataset from a project document.

    Raises VersionError for an unrecognized marker or schema version and
    IntegrityError for anything corrupt (unparseable JSON, checksum
    mismatch, malformed entries, violated invariants).
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except ValueError as exc:
        raise IntegrityError(f"not a parseable project document: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_MARKER:
        raise VersionError("not a recognized project document")
    if doc.get("version") != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema version: {doc.get('version')!r}")

    try:
        payload = {key: doc[key] for key in ("meta", "pubs", "crs", "history")}
    except KeyError as exc:
        raise IntegrityError(f"missing section: {exc}") from exc
    if doc.get("checksum") != _checksum(payload):
        raise IntegrityError("checksum mismatch: document was modified or truncated")

    try:
        pubs = {}
        for entry in payload["pubs"]:
            refs = tuple(
                RawReference(
                    source_pub_id=entry["id"],
                    raw_text=text,
                    parsed=parse_reference(text),
                )
                for text in entry["refs"]
            )
            pub = CitingPublication(
                id=entry["id"], pub_year=int(entry["pub_year"]), raw_refs=refs
            )
            pubs[pub.id] = pub
        crs = {}
        for entry in payload["crs"]:
            cr = _cr_from_doc(entry)
            if cr.id in crs:
                raise IntegrityError(f"duplicate cited-reference id {cr.id!r}")
            crs[cr.id] = cr
        meta = payload["meta"]
        dataset = Dataset(
            crs=crs,
            pubs=pubs,
            citing_year_range=tuple(meta["citing_year_range"])
            if meta.get("citing_year_range")
            else None,
            rpy_range=tuple(meta["rpy_range"]) if meta.get("rpy_range") else None,
            history=tuple(_event_from_doc(event) for event in payload["history"]),
        )
    except IntegrityError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed project document: {exc}") from exc
    dataset.validate()
    return dataset
