"""Project document round-trips, versioning, and corruption detection."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crkit.analysis import AnalysisSettings, compute_all
from crkit.dedup import SimilarityConfig, cluster, match_pairs, merge
from crkit.errors import IntegrityError, VersionError
from crkit.export import export_table
from crkit.ingest import aggregate
from crkit.model import CitingPublication, Dataset, apply_delete, apply_merge
from crkit.project import load_project, save_project

from conftest import raw_ref


def test_roundtrip_demo(demo_dataset):
    data = save_project(demo_dataset)
    loaded = load_project(data)
    assert loaded == demo_dataset
    assert save_project(loaded) == data  # byte-identical re-save


def test_roundtrip_preserves_history(demo_dataset):
    mutated = apply_delete(apply_merge(demo_dataset, [("D", ["B"])]), ["A"])
    loaded = load_project(save_project(mutated))
    assert loaded == mutated
    assert len(loaded.history) == 2


def test_truncated_document(demo_dataset):
    data = save_project(demo_dataset)
    with pytest.raises(IntegrityError):
        load_project(data[: len(data) // 2])


def test_checksum_tamper(demo_dataset):
    doc = json.loads(save_project(demo_dataset))
    doc["crs"][0]["n_cr"] += 1
    with pytest.raises(IntegrityError):
        load_project(json.dumps(doc))


def test_unknown_marker():
    with pytest.raises(VersionError):
        load_project(json.dumps({"format": "something-else", "version": 1}))


def test_unknown_version(demo_dataset):
    doc = json.loads(save_project(demo_dataset))
    doc["version"] = 99
    with pytest.raises(VersionError):
        load_project(json.dumps(doc))


def test_not_json():
    with pytest.raises(IntegrityError):
        load_project(b"\x00\x01 definitely not a project")


def test_merged_project_recomputes_identically(demo_dataset):
    cfg = SimilarityConfig(threshold=0.0)
    proposals = cluster(demo_dataset, match_pairs(demo_dataset, cfg))
    merged = merge(demo_dataset, proposals)
    reloaded = load_project(save_project(merged))
    settings_ = AnalysisSettings()
    table_a = export_table(merged, compute_all(merged, settings_).per_cr)
    table_b = export_table(reloaded, compute_all(reloaded, settings_).per_cr)
    assert table_a == table_b


REF_POOL = (
    "AAA A, 1991, J ONE",
    "BBB B, 1992, J TWO, V3, P44",
    "CCC C, 1993, REV THREE, DOI 10.1/X",
    "DDD D, 1991, J ONE",
    "EEE E, 1992, SOME TITLE HERE, J FOUR",
    "NOT A REFERENCE",
)


@st.composite
def reachable_datasets(draw) -> Dataset:
    """Datasets as produced by parsing + aggregation + optional mutations."""
    n_pubs = draw(st.integers(0, 4))
    pubs = {}
    for i in range(1, n_pubs + 1):
        pub_id = f"pub-{i:06d}"
        refs = draw(st.lists(st.sampled_from(REF_POOL), max_size=4))
        pubs[pub_id] = CitingPublication(
            id=pub_id,
            pub_year=draw(st.integers(1995, 2000)),
            raw_refs=tuple(raw_ref(pub_id, t) for t in refs),
        )
    years = [p.pub_year for p in pubs.values()]
    base = Dataset(
        crs={}, pubs=pubs,
        citing_year_range=(min(years), max(years)) if years else None,
    )
    dataset, _ = aggregate(base)
    ids = sorted(dataset.crs)
    if len(ids) >= 2 and draw(st.booleans()):
        rep, member = draw(st.sampled_from([(a, b) for a in ids for b in ids if a != b]))
        dataset = apply_merge(dataset, [(rep, [member])])
    remaining = sorted(dataset.crs)
    if remaining and draw(st.booleans()):
        dataset = apply_delete(dataset, [draw(st.sampled_from(remaining))])
    return dataset


@settings(max_examples=100, deadline=None)
@given(reachable_datasets())
def test_roundtrip_property(dataset):
    data = save_project(dataset)
    loaded = load_project(data)
    assert loaded == dataset
    assert save_project(loaded) == data
