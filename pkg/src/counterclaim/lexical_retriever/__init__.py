"""
Lexical retriever: tokenization, BM25 inverted index, TF-IDF baseline and the
positive/negative sampling used to train the dense scorer.
"""

from .errors import IndexBuildError, SamplingError
from .inverted_index import (
    InvertedIndex,
    bm25_score,
    build_index,
    load_index,
    retrieve_top_m,
    save_index,
)
from .models import Bm25Params, ScoredDocument, Stage
from .sampling import sample_contrast_sets, sample_negatives, sample_positives
from .tfidf import TfidfRetriever
from .tokenizer import STOPWORDS, STOPWORDS_VERSION, analyzer, tokenize

__all__ = [
    "Bm25Params",
    "ScoredDocument",
    "Stage",
    "IndexBuildError",
    "SamplingError",
    "InvertedIndex",
    "build_index",
    "bm25_score",
    "retrieve_top_m",
    "save_index",
    "load_index",
    "sample_positives",
    "sample_negatives",
    "sample_contrast_sets",
    "TfidfRetriever",
    "STOPWORDS",
    "STOPWORDS_VERSION",
    "analyzer",
    "tokenize",
]
