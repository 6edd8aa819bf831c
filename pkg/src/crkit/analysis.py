"""Whole-dataset analysis: per-cohort matrices, indicators, configural
frequency analysis, impact sequences, type labels, and the spectrogram.

Every computed value is recomputed from scratch on each call; both the
batch pipeline and the curation service run this after any dataset or
settings change, so cached views can never drift from the data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import cfa
from .errors import EmptyCohort
from .indicators import IndicatorSet, NpctConfig, cohort_indicators
from .model import CitationMatrix, Dataset, build_matrix
from .spectroscopy import SpectrumPoint, spectrogram


@dataclass(frozen=True)
class AnalysisSettings:
    npct: NpctConfig = field(default_factory=NpctConfig)
    z_threshold: float = 1.0
    classifier: cfa.ClassifierParams = field(default_factory=cfa.ClassifierParams)
    spectrum_half_window: int = 2


@dataclass(frozen=True)
class CrAnalysis:
    """Everything the indicator table shows for one cited reference."""

    indicators: IndicatorSet
    sequence: str
    type_label: cfa.TypeLabel


@dataclass(frozen=True)
class CohortAnalysis:
    """Per-cohort artifacts; `cfa_result` covers the pruned matrix (all-zero
    rows and columns excluded) and is None for degenerate cohorts."""

    matrix: CitationMatrix
    indicators: dict[str, IndicatorSet]
    cfa_result: cfa.CfaResult | None
    sequences: dict[str, cfa.Sequence]
    labels: dict[str, cfa.TypeLabel]
    dropped_rows: tuple[str, ...]
    dropped_cols: tuple[int, ...]


@dataclass(frozen=True)
class AnalysisBundle:
    per_cr: dict[str, CrAnalysis]
    cohorts: dict[int, CohortAnalysis]
    spectrum: tuple[SpectrumPoint, ...]
    warnings: tuple[str, ...]


def analyze_cohort(dataset: Dataset, rpy: int, settings: AnalysisSettings) -> CohortAnalysis:
    matrix = build_matrix(dataset, rpy)
    indicator_sets = cohort_indicators(matrix, settings.npct)

    cfa_result, dropped_rows, dropped_cols = cfa.analyze_matrix(matrix)
    sequences = {}
    labels: dict[str, cfa.TypeLabel] = {}
    for cr_id in cfa_result.cr_ids:
        seq = cfa.sequence(cr_id, cfa_result.z_row(cr_id), settings.z_threshold)
        sequences[cr_id] = seq
        labels[cr_id] = cfa.classify(seq, settings.classifier)
    for cr_id in dropped_rows:
        labels[cr_id] = "unclassified"

    return CohortAnalysis(
        matrix=matrix,
        indicators=indicator_sets,
        cfa_result=cfa_result,
        sequences=sequences,
        labels=labels,
        dropped_rows=dropped_rows,
        dropped_cols=dropped_cols,
    )


def compute_all(dataset: Dataset, settings: AnalysisSettings) -> AnalysisBundle:
    """Analyze every cohort present in the dataset."""
    per_cr: dict[str, CrAnalysis] = {}
    cohorts: dict[int, CohortAnalysis] = {}
    warnings: list[str] = []
    for rpy in dataset.cohort_years():
        try:
            cohort = analyze_cohort(dataset, rpy, settings)
        except EmptyCohort as exc:
            # Degenerate cohort (no citing-year overlap or zero citations):
            # indicator rows still appear, with empty analysis values.
            warnings.append(f"cohort {rpy}: {exc}")
            for cr_id in dataset.cohort_ids(rpy):
                per_cr[cr_id] = CrAnalysis(
                    indicators=IndicatorSet(n_pyears=0, perc_pyear=0.0),
                    sequence="",
                    type_label="unclassified",
                )
            continue
        cohorts[rpy] = cohort
        warnings.extend(cohort.matrix.warnings)
        for cr_id in cohort.matrix.cr_ids:
            seq = cohort.sequences.get(cr_id)
            per_cr[cr_id] = CrAnalysis(
                indicators=cohort.indicators[cr_id],
                sequence=seq.symbols if seq else "",
                type_label=cohort.labels[cr_id],
            )
    return AnalysisBundle(
        per_cr=per_cr,
        cohorts=cohorts,
        spectrum=spectrogram(dataset, settings.spectrum_half_window),
        warnings=tuple(warnings),
    )
