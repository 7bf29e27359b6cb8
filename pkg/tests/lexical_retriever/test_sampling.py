"""
Tests for positive and negative sampling.
"""

import pytest

from counterclaim.corpus_store import Corpus, EvidenceDocument
from counterclaim.lexical_retriever import (
    SamplingError,
    build_index,
    retrieve_top_m,
    sample_contrast_sets,
    sample_negatives,
    sample_positives,
)


@pytest.fixture
def index():
    """20 documents: 14 mention "measles", 6 do not."""
    docs = [EvidenceDocument(doc_id=f"m{i:02d}", title=f"measles vaccine {' '.join(['dose'] * i)}") for i in range(14)]
    docs += [EvidenceDocument(doc_id=f"z{i:02d}", title=f"unrelated topic t{i}") for i in range(6)]
    return build_index(Corpus(docs))


def test_negatives_come_from_zero_score_pool(index):
    negatives = sample_negatives(index, "measles", k=4, seed=1)

    assert len(negatives) == 4
    assert len({doc.doc_id for doc in negatives}) == 4
    assert all(doc.doc_id.startswith("z") for doc in negatives)
    assert all(doc.score == 0.0 for doc in negatives)


def test_negatives_fixed_seed_is_reproducible(index):
    first = sample_negatives(index, "measles", k=4, seed=9)
    second = sample_negatives(index, "measles", k=4, seed=9)

    assert first == second


def test_negatives_fill_from_bottom_decile(index):
    exclude = {f"z{i:02d}" for i in range(4)}

    negatives = sample_negatives(index, "measles", k=4, exclude=exclude, seed=2)

    ids = [doc.doc_id for doc in negatives]
    assert ids[:2] == ["z04", "z05"]
    assert all(doc_id not in exclude for doc_id in ids)
    assert all(doc.score > 0 for doc in negatives[2:])


def test_positives_skip_gold(index):
    top = [hit.doc_id for hit in retrieve_top_m(index, "measles dose", 5)]

    positives = sample_positives(index, "measles dose", k=4, exclude={top[0]})

    assert [doc.doc_id for doc in positives] == top[1:5]


def test_positives_deterministic(index):
    assert sample_positives(index, "measles", 4) == sample_positives(index, "measles", 4)


def test_contrast_sets_are_disjoint(index):
    gold = {"m05"}

    positives, negatives = sample_contrast_sets(index, "measles dose", k=4, gold_ids=gold, seed=3)

    pos_ids = {doc.doc_id for doc in positives}
    neg_ids = {doc.doc_id for doc in negatives}
    assert not pos_ids & neg_ids
    assert not (pos_ids | neg_ids) & gold
    assert len(pos_ids) == len(neg_ids) == 4


def test_corpus_too_small_raises():
    small = build_index(Corpus([EvidenceDocument(doc_id=f"d{i}", title=f"w{i}") for i in range(5)]))

    with pytest.raises(SamplingError):
        sample_negatives(small, "w1", k=4, exclude={"d1"}, seed=0)
