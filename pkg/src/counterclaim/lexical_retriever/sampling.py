"""
Positive and negative sampling for dense-retriever training.

Positives are the best BM25 matches for a claim; negatives come from the
low-relevance end: documents that share no term with the claim, topped up
from the bottom decile of nonzero scores when there are too few of those.
"""

import math
from typing import AbstractSet, List, Optional, Tuple

import numpy as np

from .errors.lexical_errors import SamplingError
from .inverted_index import InvertedIndex
from .models.retrieval_models import ScoredDocument, Stage


def _check_size(index: InvertedIndex, k: int, exclude: AbstractSet[str]) -> np.ndarray:
    if k < 1:
        raise SamplingError("k must be at least 1")
    excluded = sum(1 for doc_id in exclude if index.position_of(doc_id) is not None)
    if index.doc_count <= k + excluded:
        raise SamplingError(
            f"Corpus of {index.doc_count} documents is too small to sample {k} outside {excluded} excluded"
        )
    mask = np.ones(index.doc_count, dtype=bool)
    for doc_id in exclude:
        position = index.position_of(doc_id)
        if position is not None:
            mask[position] = False
    return np.flatnonzero(mask)


def _scored(index: InvertedIndex, scores: np.ndarray, positions) -> List[ScoredDocument]:
    return [ScoredDocument(doc_id=index.doc_ids[i], score=float(scores[i]), stage=Stage.LEXICAL) for i in positions]


def sample_positives(
    index: InvertedIndex,
    claim_text: str,
    k: int,
    exclude: AbstractSet[str] = frozenset(),
) -> List[ScoredDocument]:
    """
    The top-k BM25 documents for the claim, skipping excluded ids.

    Deterministic: ties break by document order, so no seed is taken.

    Raises:
        SamplingError: If doc_count <= k + |exclude|
    """
    allowed = _check_size(index, k, exclude)
    scores = index.score_all(index.tokenize_query(claim_text))
    return _scored(index, scores, index.rank(scores, k, candidates=allowed))


def sample_negatives(
    index: InvertedIndex,
    claim_text: str,
    k: int,
    exclude: AbstractSet[str] = frozenset(),
    seed: Optional[int] = None,
) -> List[ScoredDocument]:
    """
    k distinct low-relevance documents drawn uniformly with a seeded generator.

    The pool is every non-excluded document scoring 0 against the claim. If
    it holds fewer than k documents, all of them are taken and the rest are
    drawn from the bottom decile (at least as many as still needed) of the
    nonzero-scoring documents.

    Raises:
        SamplingError: If doc_count <= k + |exclude|
    """
    allowed = _check_size(index, k, exclude)
    rng = np.random.default_rng(seed)
    scores = index.score_all(index.tokenize_query(claim_text))

    zero_pool = allowed[scores[allowed] == 0.0]
    if len(zero_pool) >= k:
        picked = rng.choice(zero_pool, size=k, replace=False)
        return _scored(index, scores, picked)

    needed = k - len(zero_pool)
    nonzero = allowed[scores[allowed] > 0.0]
    ascending = nonzero[np.lexsort((index.id_rank[nonzero], scores[nonzero]))]
    decile = ascending[: max(needed, math.ceil(0.1 * len(ascending)))]
    filler = rng.choice(decile, size=needed, replace=False)
    return _scored(index, scores, np.concatenate([zero_pool, filler]))


def sample_contrast_sets(
    index: InvertedIndex,
    claim_text: str,
    k: int,
    gold_ids: AbstractSet[str],
    seed: Optional[int] = None,
) -> Tuple[List[ScoredDocument], List[ScoredDocument]]:
    """
    Positives and negatives for one training claim, disjoint from each other and from the gold ids.
    """
    positives = sample_positives(index, claim_text, k, exclude=gold_ids)
    taken = set(gold_ids) | {doc.doc_id for doc in positives}
    negatives = sample_negatives(index, claim_text, k, exclude=taken, seed=seed)
    return positives, negatives
