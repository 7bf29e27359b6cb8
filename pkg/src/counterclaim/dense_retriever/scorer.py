"""
Dense claim-evidence scorer.

embed(text) = normalize(W @ features(text)); relevance(a, b) is the cosine of
the two embeddings divided by the temperature. W is a square float64 matrix
and the only trainable parameter.
"""

import json
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import torch
from torch import nn

from counterclaim.storage import read_artifact, write_artifact

from .errors.dense_errors import EmbeddingError
from .featurizer import make_featurizer
from .models.dense_models import EmbeddingConfig, ProjectionInit

SCORER_KIND = "dense-scorer"
SCORER_VERSION = 1

# Embeddings with norm below this fall back to the first basis vector
ZERO_NORM = 1e-12


class DenseScorer(nn.Module):
    """
    Trainable projection over text features.

    Texts whose projected features vanish (e.g. a text that tokenizes to
    nothing) embed to the first basis vector e_0. Immutable in practice once
    training ends; inference runs under torch.no_grad and is safe to share
    between threads.

    Attributes:
        config: Embedding configuration
        projection: dim x dim float64 parameter
        featurizer: HashedFeaturizer or ExternalVectors
    """

    def __init__(self, config: Optional[EmbeddingConfig] = None, projection: Optional[torch.Tensor] = None):
        super().__init__()
        self.config = config or EmbeddingConfig()
        dim = self.config.dim
        if projection is None:
            if self.config.init == ProjectionInit.RANDOM:
                generator = torch.Generator().manual_seed(self.config.seed)
                projection = torch.randn(dim, dim, generator=generator, dtype=torch.float64) / dim**0.5
            else:
                projection = torch.eye(dim, dtype=torch.float64)
        if tuple(projection.shape) != (dim, dim):
            raise EmbeddingError(f"projection must be {dim}x{dim}, got {tuple(projection.shape)}")
        self.projection = nn.Parameter(projection.detach().clone().to(torch.float64))
        self.featurizer = make_featurizer(self.config)

    @classmethod
    def identity(cls, config: Optional[EmbeddingConfig] = None) -> "DenseScorer":
        config = config or EmbeddingConfig()
        return cls(config, torch.eye(config.dim, dtype=torch.float64))

    @property
    def temperature(self) -> float:
        return self.config.temperature

    def features(self, texts: Sequence[str]) -> torch.Tensor:
        return torch.from_numpy(self.featurizer.features(texts))

    def embed_features(self, features: torch.Tensor) -> torch.Tensor:
        """Project and L2-normalize a (n, dim) feature matrix, differentiably."""
        projected = features @ self.projection.T
        norms = projected.norm(dim=1, keepdim=True)
        fallback = torch.zeros_like(projected)
        fallback[:, 0] = 1.0
        degenerate = norms < ZERO_NORM
        safe_norms = torch.where(degenerate, torch.ones_like(norms), norms)
        return torch.where(degenerate, fallback, projected / safe_norms)

    def embed_texts(self, texts: Sequence[str]) -> torch.Tensor:
        return self.embed_features(self.features(texts))

    def check_finite(self) -> bool:
        return bool(torch.isfinite(self.projection).all())


# ------------------ Operations ------------------ #
def embed(scorer: DenseScorer, text: str) -> np.ndarray:
    """Unit-norm embedding of one text."""
    with torch.no_grad():
        return scorer.embed_texts([text])[0].numpy().copy()


def relevance(scorer: DenseScorer, a: str, b: str) -> float:
    """cosine(embed(a), embed(b)) / temperature; symmetric, in [-1/t, 1/t]."""
    with torch.no_grad():
        vectors = scorer.embed_texts([a, b])
        return float(torch.dot(vectors[0], vectors[1])) / scorer.temperature


def relevance_many(scorer: DenseScorer, query: str, texts: Sequence[str]) -> np.ndarray:
    """Relevance of one query against many texts."""
    if not texts:
        return np.zeros(0)
    with torch.no_grad():
        vectors = scorer.embed_texts([query, *texts])
        return (vectors[1:] @ vectors[0]).numpy() / scorer.temperature


def cosine_many(scorer: DenseScorer, query: str, texts: Sequence[str]) -> np.ndarray:
    """Raw cosine of one query against many texts, without the temperature."""
    return relevance_many(scorer, query, texts) * scorer.temperature


# ------------------ Persistence ------------------ #
def save_scorer(scorer: DenseScorer, path: Union[str, Path]) -> Path:
    metadata = {"config": json.loads(scorer.config.model_dump_json())}
    arrays = {"projection": scorer.projection.detach().numpy()}
    return write_artifact(path, SCORER_KIND, SCORER_VERSION, metadata, arrays)


def load_scorer(path: Union[str, Path]) -> DenseScorer:
    """
    Read a scorer checkpoint.

    Raises:
        ArtifactFormatError: On a missing or foreign file
    """
    metadata, arrays = read_artifact(path, SCORER_KIND, SCORER_VERSION)
    config = EmbeddingConfig.model_validate(metadata["config"])
    return DenseScorer(config, torch.from_numpy(arrays["projection"]))


def rank_by_relevance(scorer: DenseScorer, query: str, doc_ids: List[str], texts: Sequence[str]) -> List[int]:
    """Positions into doc_ids ordered by descending relevance, ties by ascending doc_id."""
    scores = relevance_many(scorer, query, texts)
    return sorted(range(len(doc_ids)), key=lambda i: (-scores[i], doc_ids[i]))
