"""
Hashed features of a (claim, evidence, response) triple.

Each segment contributes its word unigrams and bigrams, prefixed with the
segment letter so the same word counts separately in the claim ("c:"), the
evidence ("e:") and the response ("r:"). Evidence items are tokenized one by
one, so no bigram spans two documents. Rows are L2-normalized.
"""

from typing import List, Sequence, Tuple

import numpy as np
from sklearn.feature_extraction.text import HashingVectorizer

from counterclaim.lexical_retriever import tokenize

FeedbackInput = Tuple[str, Tuple[str, ...], str]


def _segment_terms(prefix: str, text: str) -> List[str]:
    tokens = tokenize(text, remove_stopwords=False)
    terms = [f"{prefix}:{token}" for token in tokens]
    terms += [f"{prefix}:{a}_{b}" for a, b in zip(tokens, tokens[1:])]
    return terms


def feedback_terms(item: FeedbackInput) -> List[str]:
    """Segment-prefixed unigram and bigram terms of one triple."""
    claim, evidence, response = item
    terms = _segment_terms("c", claim)
    for text in evidence:
        terms += _segment_terms("e", text)
    return terms + _segment_terms("r", response)


def as_input(claim: str, evidence: Sequence[str], response: str) -> FeedbackInput:
    return (claim, tuple(evidence), response)


class FeedbackFeaturizer:
    """HashingVectorizer over feedback_terms."""

    def __init__(self, n_features: int):
        self.n_features = n_features
        self.vectorizer = HashingVectorizer(
            n_features=n_features,
            analyzer=feedback_terms,
            alternate_sign=False,
            norm="l2",
            dtype=np.float64,
        )

    def transform(self, items: Sequence[FeedbackInput]) -> np.ndarray:
        """Dense (len(items), n_features) matrix."""
        return self.vectorizer.transform(list(items)).toarray()
