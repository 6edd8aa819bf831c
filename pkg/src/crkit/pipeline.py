"""Batch pipeline: ingest -> filter -> cluster -> merge -> indicators ->
sequence typing -> export, with a per-stage report.

Every stage is deterministic (sorted iteration everywhere, no randomness),
so identical inputs and configuration produce byte-identical outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import AnalysisSettings, compute_all
from .dedup import SimilarityConfig, cluster, match_pairs, merge
from .errors import ConfigError, IoError
from .export import export_table, proposals_csv, spectrogram_csv
from .ingest import aggregate, parse_refcsv, parse_tagged
from .model import CitingPublication, Dataset, RawReference
from .project import load_project, save_project

FORMATS = ("tagged", "refcsv", "project")


@dataclass(frozen=True)
class PipelineConfig:
    inputs: tuple[str, ...]
    format: str
    rpy_range: tuple[int, int] | None = None
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    auto_accept: bool = False
    settings: AnalysisSettings = field(default_factory=AnalysisSettings)
    out_csv: str | None = None
    out_project: str | None = None
    out_spectrogram: str | None = None
    proposals_out: str | None = None

    def validate(self) -> None:
        if not self.inputs:
            raise ConfigError("at least one input file is required")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.format == "project" and len(self.inputs) > 1:
            raise ConfigError("project input accepts exactly one file")
        if self.rpy_range is not None and self.rpy_range[0] > self.rpy_range[1]:
            raise ConfigError(f"rpy range is not well-ordered: {self.rpy_range}")


@dataclass
class PipelineReport:
    stages: list[tuple[str, dict]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    outputs: dict[str, str] = field(default_factory=dict)
    stopped_for_review: bool = False

    def add_stage(self, name: str, **counts) -> None:
        self.stages.append((name, counts))

    def to_json(self) -> str:
        return json.dumps(
            {
                "stages": [{"stage": name, **counts} for name, counts in self.stages],
                "warnings": self.warnings,
                "outputs": self.outputs,
                "stopped_for_review": self.stopped_for_review,
            },
            indent=2,
        )

    def to_text(self) -> str:
        lines = []
        for name, counts in self.stages:
            details = ", ".join(f"{key}={value}" for key, value in counts.items())
            lines.append(f"{name:<12} {details}")
        for warning in self.warnings:
            lines.append(f"warning: {warning}")
        for kind, path in self.outputs.items():
            lines.append(f"wrote {kind}: {path}")
        if self.stopped_for_review:
            lines.append("stopped: proposals await review (re-run with --auto-accept to merge)")
        return "\n".join(lines) + "\n"


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _write(path: str, text: str | bytes) -> None:
    try:
        data = text.encode("utf-8") if isinstance(text, str) else text
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _combine(datasets: list[Dataset]) -> Dataset:
    """Renumber publications sequentially across input files."""
    pubs: dict[str, CitingPublication] = {}
    for dataset in datasets:
        for _, pub in sorted(dataset.pubs.items()):
            new_id = f"pub-{len(pubs) + 1:06d}"
            pubs[new_id] = CitingPublication(
                id=new_id,
                pub_year=pub.pub_year,
                raw_refs=tuple(
                    RawReference(new_id, ref.raw_text, ref.parsed) for ref in pub.raw_refs
                ),
            )
    years = [p.pub_year for p in pubs.values()]
    return Dataset(
        crs={},
        pubs=pubs,
        citing_year_range=(min(years), max(years)) if years else None,
    )


def run(config: PipelineConfig) -> PipelineReport:
    """Execute the batch pipeline; raises ConfigError / FormatError /
    VersionError / IntegrityError / IoError with stage attribution."""
    config.validate()
    report = PipelineReport()

    if config.format == "project":
        dataset = load_project(_read(config.inputs[0]))
        if config.rpy_range is not None:
            lo, hi = config.rpy_range
            kept = {i: cr for i, cr in dataset.crs.items() if lo <= cr.rpy <= hi}
            dataset = Dataset(
                crs=kept,
                pubs=dataset.pubs,
                citing_year_range=dataset.citing_year_range,
                rpy_range=config.rpy_range,
                history=dataset.history,
            )
        report.add_stage(
            "load", files=1, pubs=len(dataset.pubs), crs=len(dataset.crs)
        )
    else:
        parse = parse_tagged if config.format == "tagged" else parse_refcsv
        parsed = []
        n_refs = 0
        for path in config.inputs:
            part, part_report = parse(_read(path))
            parsed.append(part)
            n_refs += part_report.n_refs
            report.warnings.extend(f"{path}: {w}" for w in part_report.warnings)
        combined = _combine(parsed)
        report.add_stage("ingest", files=len(config.inputs), pubs=len(combined.pubs), refs=n_refs)

        dataset, agg_report = aggregate(combined, config.rpy_range)
        report.add_stage(
            "aggregate",
            occurrences=agg_report.n_occurrences,
            kept=agg_report.n_kept,
            filtered=agg_report.n_filtered,
            unparsed=agg_report.n_unparsed,
            crs=agg_report.n_crs,
        )

    pairs = match_pairs(dataset, config.similarity)
    proposals = cluster(dataset, pairs)
    report.add_stage("cluster", pairs=len(pairs), proposals=len(proposals))

    if proposals and not config.auto_accept:
        path = config.proposals_out or "proposals.csv"
        _write(path, proposals_csv(dataset, proposals))
        report.outputs["proposals"] = path
        report.stopped_for_review = True
        return report

    if proposals:
        before = dataset.total_citations()
        dataset = merge(dataset, proposals)
        assert dataset.total_citations() == before  # merges move counts, never change them
    report.add_stage(
        "merge",
        merged=sum(len(p.member_ids) - 1 for p in proposals),
        crs=len(dataset.crs),
        total_citations=dataset.total_citations(),
    )

    bundle = compute_all(dataset, config.settings)
    report.warnings.extend(bundle.warnings)
    report.add_stage("analyze", cohorts=len(bundle.cohorts), crs=len(bundle.per_cr))

    if config.out_csv:
        _write(config.out_csv, export_table(dataset, bundle.per_cr))
        report.outputs["csv"] = config.out_csv
    if config.out_spectrogram:
        _write(config.out_spectrogram, spectrogram_csv(bundle.spectrum))
        report.outputs["spectrogram"] = config.out_spectrogram
    if config.out_project:
        _write(config.out_project, save_project(dataset))
        report.outputs["project"] = config.out_project
    return report
