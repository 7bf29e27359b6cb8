"""
Text featurizers feeding the dense scorer.

HashedFeaturizer counts tokens into `dim` buckets with scikit-learn's
HashingVectorizer (no sign flipping, no normalization). ExternalVectors looks up
precomputed vectors, e.g. from a pretrained encoder, keyed by the SHA-256 of
the text.
"""

import hashlib
import json
from pathlib import Path
from typing import Dict, Sequence, Union

import numpy as np
from sklearn.feature_extraction.text import HashingVectorizer

from counterclaim.lexical_retriever import analyzer

from .errors.dense_errors import EmbeddingError
from .models.dense_models import EmbeddingConfig, FeaturizerKind


def text_id(text: str) -> str:
    """Key used for a text in an external vectors file."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class HashedFeaturizer:
    """Hashed bag-of-words token counts."""

    def __init__(self, dim: int, remove_stopwords: bool = True):
        self.dim = dim
        self.vectorizer = HashingVectorizer(
            n_features=dim,
            analyzer=analyzer(remove_stopwords),
            alternate_sign=False,
            norm=None,
            dtype=np.float64,
        )

    def bucket(self, token: str) -> int:
        """Bucket a single token hashes to."""
        return int(self.vectorizer.transform([token]).indices[0])

    def features(self, texts: Sequence[str]) -> np.ndarray:
        """Dense (len(texts), dim) float64 count matrix."""
        return self.vectorizer.transform(list(texts)).toarray()


class ExternalVectors:
    """
    Vectors supplied from a JSON-lines file of {"text_id": ..., "vector": [...]}.

    Raises:
        EmbeddingError: On a malformed file, a wrong-sized vector, or an unknown text
    """

    def __init__(self, path: Union[str, Path], dim: int):
        self.dim = dim
        self.vectors: Dict[str, np.ndarray] = {}
        try:
            with open(path, "r", encoding="utf-8") as handle:
                for number, line in enumerate(handle, start=1):
                    if not line.strip():
                        continue
                    record = json.loads(line)
                    vector = np.asarray(record["vector"], dtype=np.float64)
                    if vector.shape != (dim,):
                        raise EmbeddingError(f"{path}:{number} has a vector of shape {vector.shape}, expected ({dim},)")
                    self.vectors[str(record["text_id"])] = vector
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise EmbeddingError(f"Cannot load external vectors from {path}: {e}") from e

    def features(self, texts: Sequence[str]) -> np.ndarray:
        rows = []
        for text in texts:
            vector = self.vectors.get(text_id(text))
            if vector is None:
                raise EmbeddingError(f"No external vector for text_id {text_id(text)}")
            rows.append(vector)
        return np.vstack(rows) if rows else np.zeros((0, self.dim))


def make_featurizer(config: EmbeddingConfig):
    if config.featurizer == FeaturizerKind.EXTERNAL_VECTORS:
        return ExternalVectors(config.vectors_path, config.dim)
    return HashedFeaturizer(config.dim, config.remove_stopwords)
