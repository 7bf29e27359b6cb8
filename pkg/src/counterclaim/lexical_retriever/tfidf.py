"""
TF-IDF cosine baseline over the shared tokenizer.

Used to compare lexical scorers on the same evaluation set; it is not part of
the two-stage pipeline.
"""

from typing import List

import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.metrics.pairwise import linear_kernel

from counterclaim.corpus_store import Corpus
from counterclaim.logger import configure_logging

from .errors.lexical_errors import IndexBuildError
from .models.retrieval_models import ScoredDocument, Stage
from .tokenizer import analyzer

log = configure_logging(__name__)


class TfidfRetriever:
    """
    Ranks documents by cosine similarity of L2-normalized TF-IDF vectors.

    Attributes:
        doc_ids: Document ids in corpus order
        vectorizer: Fitted scikit-learn TfidfVectorizer
    """

    def __init__(self, corpus: Corpus, remove_stopwords: bool = True):
        if len(corpus) == 0:
            raise IndexBuildError("Cannot fit TF-IDF on an empty corpus")
        self.doc_ids = corpus.doc_ids
        self.vectorizer = TfidfVectorizer(analyzer=analyzer(remove_stopwords))
        self.matrix = self.vectorizer.fit_transform(corpus.texts())
        self._id_rank = np.empty(len(self.doc_ids), dtype=np.int64)
        self._id_rank[np.argsort(np.asarray(self.doc_ids, dtype=np.str_), kind="stable")] = np.arange(len(self.doc_ids))
        log.fine(f"TF-IDF fitted on {len(self.doc_ids)} documents, {len(self.vectorizer.vocabulary_)} terms")

    def scores(self, query_text: str) -> np.ndarray:
        return linear_kernel(self.vectorizer.transform([query_text]), self.matrix).ravel()

    def retrieve(self, query_text: str, m: int) -> List[ScoredDocument]:
        """Top-m documents by descending cosine, ties by ascending doc_id."""
        scores = self.scores(query_text)
        order = np.lexsort((self._id_rank, -scores))[:m]
        return [ScoredDocument(doc_id=self.doc_ids[i], score=float(scores[i]), stage=Stage.LEXICAL) for i in order]
