"""
Models for the dense retriever.
"""

from .dense_models import (
    MARGIN_GRID,
    ENCODER_LEARNING_RATES,
    ContrastiveForm,
    EmbeddingConfig,
    FeaturizerKind,
    ProjectionInit,
    RetrieverExample,
    RetrieverTrainBatch,
    RetrieverTrainConfig,
    TrainingTrace,
)

__all__ = [
    "MARGIN_GRID",
    "ENCODER_LEARNING_RATES",
    "ContrastiveForm",
    "EmbeddingConfig",
    "FeaturizerKind",
    "ProjectionInit",
    "RetrieverExample",
    "RetrieverTrainBatch",
    "RetrieverTrainConfig",
    "TrainingTrace",
]
