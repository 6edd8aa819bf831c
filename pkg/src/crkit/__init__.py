"""Cited-reference analytics toolkit.

Ingests bibliographic export files, deduplicates cited-reference variants,
and characterizes long-lived influence through spectrogram series,
percentile-based longevity indicators, and citation-dynamics typing.
Ships a batch CLI (``crkit``) and a session-scoped curation service.
"""

from .analysis import AnalysisBundle, AnalysisSettings, compute_all
from .cfa import CfaResult, ClassifierParams, Sequence, classify
from .dedup import ClusterProposal, SimilarityConfig, cluster, match_pairs, merge, similarity
from .indicators import IndicatorSet, NpctConfig, cohort_indicators, percentile_threshold
from .ingest import aggregate, parse_refcsv, parse_tagged
from .model import (
    CitationMatrix,
    CitedReference,
    CitingPublication,
    Dataset,
    build_matrix,
)
from .project import load_project, save_project
from .spectroscopy import SpectrumPoint, median_deviation, year_counts

__version__ = "0.1.0"

__all__ = [
    "AnalysisBundle",
    "AnalysisSettings",
    "CfaResult",
    "CitationMatrix",
    "CitedReference",
    "CitingPublication",
    "ClassifierParams",
    "ClusterProposal",
    "Dataset",
    "IndicatorSet",
    "NpctConfig",
    "Sequence",
    "SimilarityConfig",
    "SpectrumPoint",
    "aggregate",
    "build_matrix",
    "classify",
    "cluster",
    "cohort_indicators",
    "compute_all",
    "load_project",
    "match_pairs",
    "median_deviation",
    "merge",
    "parse_refcsv",
    "parse_tagged",
    "percentile_threshold",
    "save_project",
    "similarity",
    "year_counts",
    "__version__",
]
