"""
Tests for index construction, BM25 scoring, top-m retrieval and persistence.
"""

import math
import random
from collections import Counter

import pytest

from counterclaim.corpus_store import Corpus, EvidenceDocument, evidence_text
from counterclaim.lexical_retriever import (
    Bm25Params,
    IndexBuildError,
    Stage,
    bm25_score,
    build_index,
    load_index,
    retrieve_top_m,
    save_index,
    tokenize,
)
from counterclaim.storage import ArtifactFormatError

VOCAB = [f"w{i}" for i in range(40)]


def make_corpus(texts, prefix="d"):
    """Corpus with one document per title text and empty abstracts."""
    return Corpus(EvidenceDocument(doc_id=f"{prefix}{i:04d}", title=text) for i, text in enumerate(texts))


def random_corpus(rng, n_docs):
    texts = []
    for _ in range(n_docs):
        length = rng.randint(1, 12)
        texts.append(" ".join(rng.choice(VOCAB) for _ in range(length)) + f" u{rng.random()}")
    return make_corpus(texts)


def oracle_score(corpus, query_tokens, position, k1=1.2, b=0.75):
    """Independent per-document BM25 straight from the formula."""
    docs = [tokenize(evidence_text(doc)) for doc in corpus]
    n = len(docs)
    avg = sum(len(d) for d in docs) / n
    counts = Counter(docs[position])
    total = 0.0
    for term in query_tokens:
        df = sum(1 for d in docs if term in d)
        tf = counts.get(term, 0)
        if df == 0 or tf == 0:
            continue
        idf = math.log((n - df + 0.5) / (df + 0.5) + 1)
        total += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(docs[position]) / avg))
    return total


class TestBuildIndex:
    def test_single_document_counts(self):
        """1-doc corpus "a b a" -> postings a=[(0,2)], b=[(0,1)], avg length 3."""
        index = build_index(make_corpus(["a b a"]), remove_stopwords=False)

        assert index.postings_list("a") == [(0, 2)]
        assert index.postings_list("b") == [(0, 1)]
        assert index.avg_doc_length == 3
        assert index.doc_count == 1

    def test_identical_documents_share_postings(self):
        corpus = Corpus(
            [EvidenceDocument(doc_id="x", title="fever cough"), EvidenceDocument(doc_id="y", title="fever cough", abstract=".")]
        )

        index = build_index(corpus)

        assert index.postings_list("fever") == [(0, 1), (1, 1)]
        assert index.postings_list("cough") == [(0, 1), (1, 1)]

    def test_invariants(self):
        corpus = random_corpus(random.Random(3), 200)

        index = build_index(corpus)

        assert index.avg_doc_length == pytest.approx(index.doc_lengths.mean())
        for term, df in index.vocabulary.items():
            postings = index.postings_list(term)
            assert len(postings) == df
            assert [d for d, _ in postings] == sorted(d for d, _ in postings)
            assert all(d < index.doc_count for d, _ in postings)

    def test_every_document_reachable(self):
        corpus = random_corpus(random.Random(4), 50)
        index = build_index(corpus)

        reachable = {d for term in index.vocabulary for d, _ in index.postings_list(term)}

        assert reachable == set(range(50))

    def test_empty_corpus_raises(self):
        with pytest.raises(IndexBuildError):
            build_index(Corpus([]))

    def test_sharded_build_matches_single_shard(self):
        corpus = random_corpus(random.Random(5), 120)

        single = build_index(corpus)
        sharded = build_index(corpus, shard_size=17)

        assert single.vocabulary == sharded.vocabulary
        for term in single.vocabulary:
            assert single.postings_list(term) == sharded.postings_list(term)
        assert list(single.doc_lengths) == list(sharded.doc_lengths)


class TestBm25Score:
    @pytest.fixture
    def covid_corpus(self):
        """Three short documents about covid and vaccines."""
        return Corpus(
            [
                EvidenceDocument(doc_id="c1", title="Covid vaccine trial", abstract="The vaccine reduced covid cases."),
                EvidenceDocument(doc_id="c2", title="Masks", abstract="Masks reduce covid transmission indoors."),
                EvidenceDocument(doc_id="c3", title="Vitamin D", abstract="No effect on respiratory infection."),
            ]
        )

    def test_no_shared_terms_scores_zero(self, covid_corpus):
        index = build_index(covid_corpus)
        assert bm25_score(index, ["zebra"], 0) == 0.0

    def test_empty_query_scores_zero(self, covid_corpus):
        index = build_index(covid_corpus)
        assert bm25_score(index, [], 1) == 0.0

    def test_matches_formula_oracle(self, covid_corpus):
        index = build_index(covid_corpus)
        query = tokenize("covid vaccine")

        for position in range(3):
            expected = oracle_score(covid_corpus, query, position)
            assert bm25_score(index, query, position, Bm25Params(k1=1.2, b=0.75)) == pytest.approx(expected, abs=1e-12)

    def test_scores_are_non_negative(self):
        corpus = random_corpus(random.Random(6), 60)
        index = build_index(corpus)

        scores = index.score_all(VOCAB[:10])

        assert (scores >= 0).all()

    def test_extra_occurrence_never_lowers_score(self):
        """Adding a query-term occurrence to a document never decreases its score."""
        base = ["w1 w2 w3", "w1 w4", "w5 w6 w7 w8"]
        boosted = ["w1 w2 w3", "w1 w1 w4", "w5 w6 w7 w8"]
        query = ["w1"]

        before = oracle_score(make_corpus(base), query, 1)
        after = oracle_score(make_corpus(boosted), query, 1)
        indexed = bm25_score(build_index(make_corpus(boosted)), query, 1)

        assert after >= before
        assert indexed == pytest.approx(after, abs=1e-12)


class TestRetrieveTopM:
    def test_matches_exhaustive_ranking(self):
        """Indexed top-20 equals exhaustive per-document scoring on random corpora."""
        rng = random.Random(11)
        for _ in range(20):
            corpus = random_corpus(rng, rng.randint(5, 300))
            index = build_index(corpus)
            for _ in range(50):
                query = [rng.choice(VOCAB) for _ in range(rng.randint(1, 4))]
                exhaustive = sorted(
                    ((bm25_score(index, query, i), index.doc_ids[i]) for i in range(index.doc_count)),
                    key=lambda pair: (-pair[0], pair[1]),
                )[:20]

                hits = retrieve_top_m(index, " ".join(query), 20)

                assert [h.doc_id for h in hits] == [doc_id for _, doc_id in exhaustive]
                for hit, (score, _) in zip(hits, exhaustive):
                    assert abs(hit.score - score) <= 1e-12

    def test_small_corpus_top_three(self):
        corpus = make_corpus(["w1 w2", "w1", "w3 w4 w5", "w1 w1 w2", "w2"])
        index = build_index(corpus)

        hits = retrieve_top_m(index, "w1 w2", 3)

        scores = sorted(((bm25_score(index, ["w1", "w2"], i), corpus[i].doc_id) for i in range(5)), key=lambda p: (-p[0], p[1]))
        assert [h.doc_id for h in hits] == [doc_id for _, doc_id in scores[:3]]
        assert all(h.stage == Stage.LEXICAL for h in hits)

    def test_ties_broken_by_doc_id(self):
        corpus = Corpus(
            [
                EvidenceDocument(doc_id="zeta", title="w7 w8"),
                EvidenceDocument(doc_id="alpha", title="w7 w9"),
            ]
        )
        index = build_index(corpus)

        hits = retrieve_top_m(index, "w7", 2)

        assert hits[0].score == hits[1].score
        assert [h.doc_id for h in hits] == ["alpha", "zeta"]

    def test_zero_score_documents_pad_the_tail(self):
        corpus = make_corpus(["w1", "w2", "w3", "w4"])
        index = build_index(corpus)

        hits = retrieve_top_m(index, "w2", 3)

        assert [h.doc_id for h in hits] == ["d0001", "d0000", "d0002"]
        assert hits[1].score == 0.0 and hits[2].score == 0.0

    def test_m_must_be_positive(self):
        index = build_index(make_corpus(["w1"]))
        with pytest.raises(ValueError):
            retrieve_top_m(index, "w1", 0)


class TestPersistence:
    def test_round_trip_gives_identical_scores(self, tmp_path):
        rng = random.Random(21)
        corpus = random_corpus(rng, 10_000)
        index = build_index(corpus)
        path = save_index(index, tmp_path / "index.ccaf")

        loaded = load_index(path)

        assert loaded.doc_ids == index.doc_ids
        for _ in range(25):
            query = [rng.choice(VOCAB) for _ in range(3)]
            assert (loaded.score_all(query) == index.score_all(query)).all()

    def test_wrong_kind_is_rejected(self, tmp_path):
        from counterclaim.storage import write_artifact

        path = write_artifact(tmp_path / "x.ccaf", "dense-scorer", 1, {}, {})

        with pytest.raises(ArtifactFormatError):
            load_index(path)
