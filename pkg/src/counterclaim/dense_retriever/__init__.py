"""
Dense retriever: trainable claim-evidence relevance scorer.
"""

from .errors import DatasetValidationError, EmbeddingError, RetrieverTrainingError
from .featurizer import ExternalVectors, HashedFeaturizer, text_id
from .loss import LossResult, batch_texts, loss_from_features, loss_from_scores, ranking_contrastive_loss
from .models import (
    ENCODER_LEARNING_RATES,
    MARGIN_GRID,
    ContrastiveForm,
    EmbeddingConfig,
    FeaturizerKind,
    ProjectionInit,
    RetrieverExample,
    RetrieverTrainBatch,
    RetrieverTrainConfig,
    TrainingTrace,
)
from .scorer import (
    DenseScorer,
    cosine_many,
    embed,
    load_scorer,
    rank_by_relevance,
    relevance,
    relevance_many,
    save_scorer,
)
from .trainer import train, validate_dataset

__all__ = [
    "DatasetValidationError",
    "EmbeddingError",
    "RetrieverTrainingError",
    "ExternalVectors",
    "HashedFeaturizer",
    "text_id",
    "LossResult",
    "batch_texts",
    "loss_from_features",
    "loss_from_scores",
    "ranking_contrastive_loss",
    "ENCODER_LEARNING_RATES",
    "MARGIN_GRID",
    "ContrastiveForm",
    "EmbeddingConfig",
    "FeaturizerKind",
    "ProjectionInit",
    "RetrieverExample",
    "RetrieverTrainBatch",
    "RetrieverTrainConfig",
    "TrainingTrace",
    "DenseScorer",
    "cosine_many",
    "embed",
    "load_scorer",
    "rank_by_relevance",
    "relevance",
    "relevance_many",
    "save_scorer",
    "train",
    "validate_dataset",
]
