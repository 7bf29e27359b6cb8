from .dense_errors import DatasetValidationError, EmbeddingError, RetrieverTrainingError

__all__ = ["EmbeddingError", "RetrieverTrainingError", "DatasetValidationError"]
