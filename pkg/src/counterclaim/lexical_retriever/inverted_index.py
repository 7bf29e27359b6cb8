# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from counterclaim.corpus_store import Corpus, evidence_text
from counterclaim.storage import read_artifact, write_artifact

from .errors.lexical_errors import IndexBuildError
from .models.retrieval_models import Bm25Params, ScoredDocument, Stage
from .tokenizer import STOPWORDS_VERSION, tokenize

INDEX_KIND = "inverted-index"
INDEX_VERSION = 1

Posting = Tuple[np.ndarray, np.ndarray]


class InvertedIndex:
    """
    Immutable BM25 inverted index over a corpus.

    doc_index i refers to the i-th document of the indexed corpus and to
    doc_ids[i]. Postings are stored per term as two aligned int64 arrays
    (doc indexes ascending, term frequencies). Safe for concurrent queries.

    Attributes:
        doc_ids: Document ids in corpus order
        doc_lengths: Token count per document
        avg_doc_length: Mean of doc_lengths
        doc_count: Number of documents
        params: Default BM25 parameters
        remove_stopwords: Tokenizer setting used at build time, reused for queries
    """

    def __init__(
        self,
        doc_ids: Sequence[str],
        doc_lengths: np.ndarray,
        postings: Dict[str, Posting],
        params: Optional[Bm25Params] = None,
        remove_stopwords: bool = True,
    ):
        self.doc_ids: List[str] = list(doc_ids)
        self.doc_lengths = np.asarray(doc_lengths, dtype=np.int64)
        self.doc_count = len(self.doc_ids)
        self.avg_doc_length = float(self.doc_lengths.sum()) / self.doc_count
        self.postings = postings
        self.params = params or Bm25Params()
        self.remove_stopwords = remove_stopwords
        self._positions = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}
        # Position of each document in ascending doc_id order, used for ties
        self.id_rank = np.empty(self.doc_count, dtype=np.int64)
        self.id_rank[np.argsort(np.asarray(self.doc_ids, dtype=np.str_), kind="stable")] = np.arange(self.doc_count)

    @property
    def vocabulary(self) -> Dict[str, int]:
        """Term -> document frequency."""
        return {term: len(docs) for term, (docs, _) in self.postings.items()}

    def postings_list(self, term: str) -> List[Tuple[int, int]]:
        """Postings of one term as (doc_index, term_frequency) pairs."""
        if term not in self.postings:
            return []
        docs, tfs = self.postings[term]
        return [(int(d), int(t)) for d, t in zip(docs, tfs)]

    def position_of(self, doc_id: str) -> Optional[int]:
        return self._positions.get(doc_id)

    def tokenize_query(self, text: str) -> List[str]:
        return tokenize(text, remove_stopwords=self.remove_stopwords)

    def idf(self, term: str) -> float:
        """ln((N - df + 0.5) / (df + 0.5) + 1); 0 for unseen terms."""
        posting = self.postings.get(term)
        if posting is None:
            return 0.0
        df = len(posting[0])
        return math.log((self.doc_count - df + 0.5) / (df + 0.5) + 1.0)

    def score_all(self, query_tokens: Iterable[str], params: Optional[Bm25Params] = None) -> np.ndarray:
        """
        BM25 score of every document for a tokenized query.

        Repeated query terms contribute once per occurrence, exactly as
        bm25_score sums them.
        """
        params = params or self.params
        k1, b = params.k1, params.b
        scores = np.zeros(self.doc_count, dtype=np.float64)
        for term in query_tokens:
            posting = self.postings.get(term)
            if posting is None:
                continue
            docs, tfs = posting
            idf = self.idf(term)
            tf = tfs.astype(np.float64)
            dl = self.doc_lengths[docs].astype(np.float64)
            scores[docs] += idf * (tf * (k1 + 1)) / (tf + k1 * (1 - b + b * dl / self.avg_doc_length))
        return scores

    def rank(self, scores: np.ndarray, m: int, candidates: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Indexes of the m best documents by descending score, ties by ascending doc_id.

        Args:
            scores: Score per document
            m: How many to return (capped at the number of candidates)
            candidates: Restrict to these doc indexes; default is every document
        """
        if candidates is None:
            candidates = np.arange(self.doc_count)
        m = min(m, len(candidates))
        if m <= 0:
            return np.empty(0, dtype=np.int64)
        candidate_scores = scores[candidates]
        if m < len(candidates):
            threshold = np.partition(candidate_scores, len(candidates) - m)[len(candidates) - m]
            keep = candidate_scores >= threshold
            candidates = candidates[keep]
            candidate_scores = candidate_scores[keep]
        order = np.lexsort((self.id_rank[candidates], -candidate_scores))
        return candidates[order[:m]]


# ------------------ Building ------------------ #
def _count_shard(args: Tuple[int, List[str], bool]) -> Tuple[int, List[int], Dict[str, List[Tuple[int, int]]]]:
    start, texts, remove_stopwords = args
    lengths: List[int] = []
    shard_postings: Dict[str, List[Tuple[int, int]]] = {}
    for offset, text in enumerate(texts):
        tokens = tokenize(text, remove_stopwords=remove_stopwords)
        lengths.append(len(tokens))
        for term, tf in Counter(tokens).items():
            shard_postings.setdefault(term, []).append((start + offset, tf))
    return start, lengths, shard_postings


def build_index(
    corpus: Corpus,
    params: Optional[Bm25Params] = None,
    remove_stopwords: bool = True,
    workers: int = 1,
    shard_size: int = 50_000,
) -> InvertedIndex:
    """
    Build a BM25 inverted index over evidence_text of every document.

    Documents are tokenized in shards; with workers > 1 the shards are counted
    in a process pool. Shards are merged in corpus order, so the result does
    not depend on the worker count.

    Args:
        corpus: Non-empty corpus
        params: BM25 parameters stored as the index default
        remove_stopwords: Tokenizer setting, reused for queries
        workers: Worker processes for shard counting
        shard_size: Documents per shard

    Returns:
        InvertedIndex: The built index

    Raises:
        IndexBuildError: If the corpus is empty
    """
    if len(corpus) == 0:
        raise IndexBuildError("Cannot index an empty corpus")

    log.step(f"Indexing {len(corpus)} documents")
    texts = corpus.texts()
    jobs = [(start, texts[start:start + shard_size], remove_stopwords) for start in range(0, len(texts), shard_size)]

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(_count_shard, jobs))
    else:
        shards = [_count_shard(job) for job in jobs]

    lengths: List[int] = []
    merged: Dict[str, List[Tuple[int, int]]] = {}
    for _, shard_lengths, shard_postings in sorted(shards, key=lambda shard: shard[0]):
        lengths.extend(shard_lengths)
        for term, entries in shard_postings.items():
            merged.setdefault(term, []).extend(entries)

    postings: Dict[str, Posting] = {}
    for term in sorted(merged):
        entries = merged[term]
        postings[term] = (
            np.fromiter((d for d, _ in entries), dtype=np.int64, count=len(entries)),
            np.fromiter((t for _, t in entries), dtype=np.int64, count=len(entries)),
        )

    index = InvertedIndex(corpus.doc_ids, np.asarray(lengths, dtype=np.int64), postings, params, remove_stopwords)
    empty = int((index.doc_lengths == 0).sum())
    if empty:
        log.warning(f"{empty} documents tokenize to nothing and are unreachable by term")
    log.success(f"Indexed {index.doc_count} documents, {len(postings)} terms, avg length {index.avg_doc_length:.1f}")
    return index


# ------------------ Scoring ------------------ #
def bm25_score(
    index: InvertedIndex,
    query_tokens: Sequence[str],
    doc_index: int,
    params: Optional[Bm25Params] = None,
) -> float:
    """
    Okapi BM25 score of one document, computed term by term.

    score = sum over query terms t of
        IDF(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avglen))
    with IDF(t) = ln((N - df + 0.5) / (df + 0.5) + 1).
    """
    params = params or index.params
    k1, b = params.k1, params.b
    dl = float(index.doc_lengths[doc_index])
    score = 0.0
    for term in query_tokens:
        posting = index.postings.get(term)
        if posting is None:
            continue
        docs, tfs = posting
        at = int(np.searchsorted(docs, doc_index))
        if at == len(docs) or docs[at] != doc_index:
            continue
        tf = float(tfs[at])
        score += index.idf(term) * (tf * (k1 + 1)) / (tf + k1 * (1 - b + b * dl / index.avg_doc_length))
    return score


def retrieve_top_m(
    index: InvertedIndex,
    query_text: str,
    m: int,
    params: Optional[Bm25Params] = None,
) -> List[ScoredDocument]:
    """
    The m highest-scoring documents for a query.

    Ordered by descending BM25 score, ties by ascending doc_id. When fewer than
    m documents match, zero-score documents pad the tail in doc_id order, so
    exactly min(m, doc_count) documents come back.

    Raises:
        ValueError: If m < 1
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    scores = index.score_all(index.tokenize_query(query_text), params)
    top = index.rank(scores, m)
    return [ScoredDocument(doc_id=index.doc_ids[i], score=float(scores[i]), stage=Stage.LEXICAL) for i in top]


# ------------------ Persistence ------------------ #
def save_index(index: InvertedIndex, path: Union[str, Path]) -> Path:
    """Write the index to the versioned artifact container."""
    terms = list(index.postings)
    sizes = np.asarray([len(index.postings[t][0]) for t in terms], dtype=np.int64)
    empty = np.empty(0, dtype=np.int64)
    arrays = {
        "doc_ids": np.asarray(index.doc_ids, dtype=np.str_),
        "doc_lengths": index.doc_lengths,
        "terms": np.asarray(terms, dtype=np.str_),
        "posting_sizes": sizes,
        "posting_docs": np.concatenate([index.postings[t][0] for t in terms]) if terms else empty,
        "posting_tfs": np.concatenate([index.postings[t][1] for t in terms]) if terms else empty,
    }
    metadata = {
        "k1": index.params.k1,
        "b": index.params.b,
        "remove_stopwords": index.remove_stopwords,
        "stopwords_version": STOPWORDS_VERSION,
        "doc_count": index.doc_count,
    }
    return write_artifact(path, INDEX_KIND, INDEX_VERSION, metadata, arrays)


def load_index(path: Union[str, Path]) -> InvertedIndex:
    """
    Read an index written by save_index.

    Raises:
        ArtifactFormatError: On a missing or foreign file
    """
    metadata, arrays = read_artifact(path, INDEX_KIND, INDEX_VERSION)
    if metadata.get("stopwords_version") != STOPWORDS_VERSION:
        log.warning(
            f"{path} was built with stopword list v{metadata.get('stopwords_version')}, "
            f"queries use v{STOPWORDS_VERSION}"
        )
    bounds = np.concatenate([[0], np.cumsum(arrays["posting_sizes"])])
    postings = {
        str(term): (arrays["posting_docs"][lo:hi], arrays["posting_tfs"][lo:hi])
        for term, lo, hi in zip(arrays["terms"].tolist(), bounds[:-1], bounds[1:])
    }
    return InvertedIndex(
        doc_ids=[str(doc_id) for doc_id in arrays["doc_ids"].tolist()],
        doc_lengths=arrays["doc_lengths"],
        postings=postings,
        params=Bm25Params(k1=metadata["k1"], b=metadata["b"]),
        remove_stopwords=metadata["remove_stopwords"],
    )
