"""Session-scoped curation service.

Each session holds one dataset plus its analysis settings. After every
mutation (merge, delete, undo, settings change) all indicator values,
sequences, and the spectrogram are recomputed before the response is
returned, so clients always read values consistent with the data.

Mutations on a session are serialized by a per-session lock (single
writer); queries read the last committed snapshot and may run
concurrently. Sessions are in-memory; persistence is the downloadable
project document.
"""

from __future__ import annotations

import hashlib
import itertools
import threading
from dataclasses import dataclass, replace

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import errors
from .analysis import AnalysisBundle, AnalysisSettings, compute_all
from .cfa import ClassifierParams
from .dedup import ClusterProposal, SimilarityConfig, cluster, match_pairs
from .errors import (
    BadQuery,
    ConfigError,
    CrkitError,
    NotFound,
)
from .export import EXPORT_COLUMNS, cr_label, export_table, sorted_cr_ids
from .indicators import NpctConfig
from .ingest import aggregate, parse_refcsv, parse_tagged
from .model import Dataset, apply_delete, undo_last
from .pipeline import FORMATS
from .project import load_project, save_project


@dataclass(frozen=True)
class SessionState:
    """One committed snapshot: dataset, settings, derived values, and the
    proposals offered since the snapshot was taken."""

    dataset: Dataset
    settings: AnalysisSettings
    similarity: SimilarityConfig
    bundle: AnalysisBundle
    proposals: dict[str, ClusterProposal]


class Session:
    def __init__(self, state: SessionState) -> None:
        self.state = state
        self.lock = threading.Lock()


class SessionStore:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def create(self, state: SessionState) -> str:
        with self._lock:
            session_id = f"s{next(self._counter)}"
            self._sessions[session_id] = Session(state)
            return session_id

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise NotFound(f"unknown session {session_id!r}")
        return session


class UploadBody(BaseModel):
    format: str
    content: str
    rpy_range: tuple[int, int] | None = None


class SettingsBody(BaseModel):
    npct_range: int | None = None
    percentiles: list[int] | None = None
    z_threshold: float | None = None
    hot_window: int | None = None
    sleep_years: int | None = None
    min_seq_len: int | None = None
    cluster_threshold: float | None = None
    year_tolerance: int | None = None
    weights: tuple[float, float, float] | None = None


class MergeBody(BaseModel):
    proposal_ids: list[str]


class DeleteBody(BaseModel):
    cr_ids: list[str]


_ERROR_STATUS = {
    errors.NotFound: 404,
    errors.EmptyCohort: 404,
    errors.BadQuery: 400,
    errors.FormatError: 400,
    errors.VersionError: 400,
    errors.IntegrityError: 400,
    errors.ConfigError: 400,
    errors.StaleProposal: 409,
    errors.EmptyHistory: 409,
}

_ERROR_CODE = {
    errors.NotFound: "not_found",
    errors.EmptyCohort: "empty_cohort",
    errors.BadQuery: "bad_query",
    errors.FormatError: "format_error",
    errors.VersionError: "version_error",
    errors.IntegrityError: "integrity_error",
    errors.ConfigError: "config_error",
    errors.StaleProposal: "stale_proposal",
    errors.EmptyHistory: "empty_history",
}


def _proposal_id(proposal: ClusterProposal) -> str:
    digest = hashlib.sha1(",".join(proposal.member_ids).encode("utf-8")).hexdigest()
    return f"p-{digest[:12]}"


def _make_state(
    dataset: Dataset, settings: AnalysisSettings, similarity: SimilarityConfig
) -> SessionState:
    return SessionState(
        dataset=dataset,
        settings=settings,
        similarity=similarity,
        bundle=compute_all(dataset, settings),
        proposals={},
    )


def _summary(session_id: str, state: SessionState) -> dict:
    return {
        "session_id": session_id,
        "n_crs": len(state.dataset.crs),
        "n_pubs": len(state.dataset.pubs),
        "total_citations": state.dataset.total_citations(),
        "citing_year_range": state.dataset.citing_year_range,
        "rpy_range": state.dataset.rpy_range,
        "history_depth": len(state.dataset.history),
    }


def _cr_row(state: SessionState, cr_id: str) -> dict:
    cr = state.dataset.crs[cr_id]
    analysis = state.bundle.per_cr[cr_id]
    return {
        "id": cr_id,
        "CR": cr_label(cr),
        "RPY": cr.rpy,
        "N_CR": cr.n_cr,
        "N_PYEARS": analysis.indicators.n_pyears,
        "PERC_PYEAR": round(analysis.indicators.perc_pyear, 2),
        "N_TOP50": analysis.indicators.n_top50,
        "N_TOP25": analysis.indicators.n_top25,
        "N_TOP10": analysis.indicators.n_top10,
        "SEQUENCE": analysis.sequence,
        "TYPE": analysis.type_label,
    }


def _parse_filter(term: str) -> tuple[str, str]:
    if ":" in term:
        key, _, value = term.partition(":")
        return key.strip(), value.strip()
    return "text", term.strip()


def _apply_filters(rows: list[dict], filter_expr: str | None) -> list[dict]:
    if not filter_expr:
        return rows
    for term in filter_expr.split(","):
        key, value = _parse_filter(term)
        if key == "rpy":
            try:
                year = int(value)
            except ValueError:
                raise BadQuery(f"rpy filter needs an integer year, got {value!r}") from None
            rows = [r for r in rows if r["RPY"] == year]
        elif key == "type":
            rows = [r for r in rows if r["TYPE"] == value]
        elif key == "min_n_cr":
            try:
                floor = int(value)
            except ValueError:
                raise BadQuery(f"min_n_cr filter needs an integer, got {value!r}") from None
            rows = [r for r in rows if r["N_CR"] >= floor]
        elif key == "text":
            needle = value.casefold()
            rows = [r for r in rows if needle in r["CR"].casefold()]
        else:
            raise BadQuery(f"unknown filter key {key!r}")
    return rows


def create_app() -> FastAPI:
    app = FastAPI(title="crkit curation service")
    store = SessionStore()

    @app.exception_handler(CrkitError)
    async def handle_domain_error(request: Request, exc: CrkitError):
        return JSONResponse(
            status_code=_ERROR_STATUS.get(type(exc), 500),
            content={"code": _ERROR_CODE.get(type(exc), "internal"), "message": str(exc)},
        )

    @app.post("/sessions", status_code=201)
    def create_session(body: UploadBody):
        if body.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {body.format!r}")
        if body.format == "project":
            dataset = load_project(body.content)
        else:
            parse = parse_tagged if body.format == "tagged" else parse_refcsv
            parsed, _report = parse(body.content)
            dataset, _agg = aggregate(parsed, body.rpy_range)
        state = _make_state(dataset, AnalysisSettings(), SimilarityConfig())
        session_id = store.create(state)
        return _summary(session_id, state)

    @app.get("/sessions/{session_id}")
    def session_summary(session_id: str):
        return _summary(session_id, store.get(session_id).state)

    @app.get("/sessions/{session_id}/spectrogram")
    def spectrogram_view(
        session_id: str,
        from_year: int | None = Query(default=None, alias="from"),
        to_year: int | None = Query(default=None, alias="to"),
    ):
        state = store.get(session_id).state
        points = [
            {"rpy": p.rpy, "n_cr": p.n_cr, "median_dev": p.median_dev}
            for p in state.bundle.spectrum
            if (from_year is None or p.rpy >= from_year)
            and (to_year is None or p.rpy <= to_year)
        ]
        return {"points": points}

    @app.get("/sessions/{session_id}/crs")
    def crs_view(
        session_id: str,
        sort: str = "RPY",
        dir: str = "asc",
        filter: str | None = None,
        page: int = 1,
        page_size: int = 50,
    ):
        state = store.get(session_id).state
        if sort not in EXPORT_COLUMNS:
            raise BadQuery(f"unknown sort column {sort!r}; one of {EXPORT_COLUMNS}")
        if dir not in ("asc", "desc"):
            raise BadQuery(f"dir must be asc or desc, got {dir!r}")
        if page < 1 or page_size < 1:
            raise BadQuery("page and page_size must be >= 1")
        rows = [_cr_row(state, cr_id) for cr_id in sorted_cr_ids(state.dataset)]
        rows = _apply_filters(rows, filter)
        reverse = dir == "desc"
        # Ties always break by ascending id so pagination is stable.
        rows.sort(key=lambda r: r["id"])
        rows.sort(key=lambda r: r[sort], reverse=reverse)
        start = (page - 1) * page_size
        return {
            "total": len(rows),
            "page": page,
            "page_size": page_size,
            "rows": rows[start : start + page_size],
        }

    @app.get("/sessions/{session_id}/proposals")
    def proposals_view(session_id: str, threshold: float | None = None):
        session = store.get(session_id)
        with session.lock:
            state = session.state
            cfg = state.similarity
            if threshold is not None:
                cfg = replace(cfg, threshold=threshold)
            found = cluster(state.dataset, match_pairs(state.dataset, cfg))
            proposals = {_proposal_id(p): p for p in found}
            session.state = replace(state, proposals=proposals)
        return {
            "proposals": [
                {
                    "id": pid,
                    "member_ids": list(p.member_ids),
                    "representative_id": p.representative_id,
                    "members": [_cr_row(session.state, m) for m in p.member_ids],
                    "pairs": [
                        {"a": a, "b": b, "score": round(s, 4)} for a, b, s in p.pair_scores
                    ],
                }
                for pid, p in sorted(proposals.items(), key=lambda kv: kv[1].member_ids)
            ]
        }

    @app.post("/sessions/{session_id}/merge")
    def merge_action(session_id: str, body: MergeBody):
        from .dedup import merge as apply_proposals

        session = store.get(session_id)
        with session.lock:
            state = session.state
            try:
                accepted = [state.proposals[pid] for pid in body.proposal_ids]
            except KeyError as exc:
                raise errors.StaleProposal(
                    f"unknown or outdated proposal id {exc.args[0]!r}; re-fetch proposals"
                ) from exc
            dataset = apply_proposals(state.dataset, accepted)
            session.state = _make_state(dataset, state.settings, state.similarity)
        return _summary(session_id, session.state)

    @app.post("/sessions/{session_id}/delete")
    def delete_action(session_id: str, body: DeleteBody):
        session = store.get(session_id)
        with session.lock:
            state = session.state
            dataset = apply_delete(state.dataset, body.cr_ids)
            session.state = _make_state(dataset, state.settings, state.similarity)
        return _summary(session_id, session.state)

    @app.post("/sessions/{session_id}/undo")
    def undo_action(session_id: str):
        session = store.get(session_id)
        with session.lock:
            state = session.state
            dataset = undo_last(state.dataset)
            session.state = _make_state(dataset, state.settings, state.similarity)
        return _summary(session_id, session.state)

    @app.put("/sessions/{session_id}/settings")
    def update_settings(session_id: str, body: SettingsBody):
        session = store.get(session_id)
        with session.lock:
            state = session.state
            npct = state.settings.npct
            if body.npct_range is not None:
                npct = replace(npct, window=body.npct_range)
            if body.percentiles is not None:
                if any(not 0 < p < 100 for p in body.percentiles):
                    raise ConfigError("percentiles must lie strictly between 0 and 100")
                npct = replace(npct, fractions=tuple(p / 100 for p in body.percentiles))
            classifier = state.settings.classifier
            if body.hot_window is not None:
                classifier = replace(classifier, hot_window=body.hot_window)
            if body.sleep_years is not None:
                classifier = replace(classifier, sleep_years=body.sleep_years)
            if body.min_seq_len is not None:
                classifier = replace(classifier, min_length=body.min_seq_len)
            settings = AnalysisSettings(
                npct=npct,
                z_threshold=body.z_threshold
                if body.z_threshold is not None
                else state.settings.z_threshold,
                classifier=classifier,
                spectrum_half_window=state.settings.spectrum_half_window,
            )
            similarity = state.similarity
            if body.cluster_threshold is not None:
                similarity = replace(similarity, threshold=body.cluster_threshold)
            if body.year_tolerance is not None:
                similarity = replace(similarity, year_tolerance=body.year_tolerance)
            if body.weights is not None:
                title_w, author_w, source_w = body.weights
                similarity = replace(
                    similarity,
                    title_weight=title_w,
                    author_weight=author_w,
                    source_weight=source_w,
                )
            session.state = _make_state(state.dataset, settings, similarity)
        return _summary(session_id, session.state)

    @app.get("/sessions/{session_id}/cohorts/{rpy}/cfa")
    def cohort_cfa_view(session_id: str, rpy: int):
        state = store.get(session_id).state
        cohort = state.bundle.cohorts.get(rpy)
        if cohort is None:
            raise NotFound(f"no analyzed cohort for publication year {rpy}")
        matrix, result = cohort.matrix, cohort.cfa_result
        return {
            "rpy": rpy,
            "cr_ids": list(result.cr_ids),
            "citing_years": list(result.citing_years),
            "observed": [
                [matrix.cells[matrix.cr_ids.index(cr_id)][matrix.citing_years.index(year)]
                 for year in result.citing_years]
                for cr_id in result.cr_ids
            ],
            "expected": [list(row) for row in result.expected],
            "z": [list(row) for row in result.z],
            "chi_square": result.chi_square,
            "df": result.df,
            "low_expected_cells": [list(cell) for cell in result.low_expected_cells],
            "dropped_rows": list(cohort.dropped_rows),
            "dropped_cols": list(cohort.dropped_cols),
            "sequences": {
                cr_id: {"symbols": seq.symbols, "type": cohort.labels[cr_id]}
                for cr_id, seq in sorted(cohort.sequences.items())
            },
        }

    @app.get("/sessions/{session_id}/export.csv")
    def export_view(session_id: str):
        state = store.get(session_id).state
        csv_text = export_table(state.dataset, state.bundle.per_cr)
        return Response(content=csv_text, media_type="text/csv; charset=utf-8")

    @app.get("/sessions/{session_id}/project")
    def project_view(session_id: str):
        state = store.get(session_id).state
        return Response(
            content=save_project(state.dataset),
            media_type="application/json; charset=utf-8",
        )

    return app
