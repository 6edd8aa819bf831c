"""CSV exports: the indicator table, the spectrogram series, and merge
proposals for offline review."""

from __future__ import annotations

import csv
import io
from typing import Mapping

from .analysis import CrAnalysis
from .dedup import ClusterProposal
from .model import CitedReference, Dataset
from .spectroscopy import SpectrumPoint

EXPORT_COLUMNS = (
    "CR", "RPY", "N_CR", "N_PYEARS", "PERC_PYEAR",
    "N_TOP50", "N_TOP25", "N_TOP10", "SEQUENCE", "TYPE",
)


def cr_label(cr: CitedReference) -> str:
    """Human-readable reference string rebuilt from the stored fields."""
    authors = "; ".join(
        f"{last} {initials}".strip() for last, initials in cr.authors
    )
    parts = [p for p in (authors, str(cr.rpy), cr.source) if p]
    if cr.volume:
        parts.append(f"V{cr.volume}")
    if cr.page:
        parts.append(f"P{cr.page}")
    return ", ".join(parts)


def sorted_cr_ids(dataset: Dataset) -> list[str]:
    """Deterministic export order: year ascending, occurrences descending,
    id ascending."""
    return sorted(
        dataset.crs,
        key=lambda cr_id: (dataset.crs[cr_id].rpy, -dataset.crs[cr_id].n_cr, cr_id),
    )


def export_table(dataset: Dataset, analyses: Mapping[str, CrAnalysis]) -> str:
    """Indicator table as CSV text, one row per cited reference."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(EXPORT_COLUMNS)
    for cr_id in sorted_cr_ids(dataset):
        cr = dataset.crs[cr_id]
        a = analyses[cr_id]
        writer.writerow(
            [
                cr_label(cr),
                cr.rpy,
                cr.n_cr,
                a.indicators.n_pyears,
                f"{a.indicators.perc_pyear:.2f}",
                a.indicators.n_top50,
                a.indicators.n_top25,
                a.indicators.n_top10,
                a.sequence,
                a.type_label,
            ]
        )
    return out.getvalue()


def spectrogram_csv(series: tuple[SpectrumPoint, ...]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["RPY", "N_CR", "MEDIAN_DEV"])
    for point in series:
        writer.writerow([point.rpy, point.n_cr, point.median_dev])
    return out.getvalue()


def proposals_csv(dataset: Dataset, proposals: list[ClusterProposal]) -> str:
    """Merge proposals flattened to one row per member, for offline review."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["CLUSTER", "MEMBER_ID", "MEMBER", "RPY", "N_CR", "IS_REPRESENTATIVE", "BEST_SCORE"]
    )
    for number, proposal in enumerate(proposals, start=1):
        for member_id in proposal.member_ids:
            cr = dataset.crs[member_id]
            scores = [
                s for a, b, s in proposal.pair_scores if member_id in (a, b)
            ]
            writer.writerow(
                [
                    number,
                    member_id,
                    cr_label(cr),
                    cr.rpy,
                    cr.n_cr,
                    int(member_id == proposal.representative_id),
                    f"{max(scores):.4f}" if scores else "",
                ]
            )
    return out.getvalue()
