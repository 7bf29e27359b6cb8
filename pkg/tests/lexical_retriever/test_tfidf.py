"""
Tests for the TF-IDF baseline.
"""

from counterclaim.corpus_store import Corpus, EvidenceDocument
from counterclaim.lexical_retriever import Stage, TfidfRetriever


def test_best_match_ranks_first():
    corpus = Corpus(
        [
            EvidenceDocument(doc_id="a", title="hydroxychloroquine trial outcomes"),
            EvidenceDocument(doc_id="b", title="mask mandates and transmission"),
            EvidenceDocument(doc_id="c", title="vaccine efficacy in adults"),
        ]
    )
    retriever = TfidfRetriever(corpus)

    hits = retriever.retrieve("does hydroxychloroquine work", 2)

    assert hits[0].doc_id == "a"
    assert hits[0].stage == Stage.LEXICAL
    assert len(hits) == 2


def test_zero_scores_tie_by_doc_id():
    corpus = Corpus([EvidenceDocument(doc_id=name, title=f"topic {name}x") for name in ["q", "b", "m"]])
    retriever = TfidfRetriever(corpus)

    hits = retriever.retrieve("nothing matches", 3)

    assert [h.doc_id for h in hits] == ["b", "m", "q"]
