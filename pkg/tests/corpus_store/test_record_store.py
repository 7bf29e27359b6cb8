"""
Tests for the binary record store and its offset index.
"""

import json

import pytest

from counterclaim.corpus_store import CorpusStore, CorpusStoreError, ingest
from counterclaim.corpus_store.record_store import INDEX_FILE, RECORDS_FILE


@pytest.fixture
def corpus():
    """A small ingested corpus with non-ASCII text."""
    lines = [
        json.dumps({"id": f"doc-{i}", "title": f"Title {i} ünïcode", "abstract": f"Abstract {i}", "source": "litcovid"})
        for i in range(25)
    ]
    return ingest(lines)


def test_write_then_get(tmp_path, corpus):
    store = CorpusStore.write(tmp_path / "store", corpus)

    doc = store.get("doc-7")

    assert doc == corpus.get("doc-7")
    assert store.get("missing") is None
    assert len(store) == 25


def test_require_unknown_raises(tmp_path, corpus):
    store = CorpusStore.write(tmp_path, corpus)

    with pytest.raises(CorpusStoreError):
        store.require("nope")


def test_open_uses_index(tmp_path, corpus):
    CorpusStore.write(tmp_path, corpus)

    store = CorpusStore.open(tmp_path)

    assert store.doc_ids == corpus.doc_ids
    assert store.require("doc-24").title == "Title 24 ünïcode"


def test_missing_index_is_rebuilt(tmp_path, corpus):
    CorpusStore.write(tmp_path, corpus)
    (tmp_path / INDEX_FILE).unlink()

    store = CorpusStore.open(tmp_path)

    assert store.require("doc-3") == corpus.get("doc-3")
    assert (tmp_path / INDEX_FILE).exists()


def test_corrupt_index_is_rebuilt(tmp_path, corpus):
    CorpusStore.write(tmp_path, corpus)
    (tmp_path / INDEX_FILE).write_bytes(b"garbage")

    store = CorpusStore.open(tmp_path)

    assert store.doc_ids == corpus.doc_ids


def test_load_corpus_round_trip(tmp_path, corpus):
    CorpusStore.write(tmp_path, corpus)

    loaded = CorpusStore.open(tmp_path).load_corpus()

    assert loaded.to_records() == corpus.to_records()


def test_bad_magic_raises(tmp_path):
    (tmp_path / RECORDS_FILE).write_bytes(b"XXXX\x01\x00")

    with pytest.raises(CorpusStoreError):
        CorpusStore.open(tmp_path)


def test_missing_store_raises(tmp_path):
    with pytest.raises(CorpusStoreError):
        CorpusStore.open(tmp_path / "empty")
