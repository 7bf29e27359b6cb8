"""
Dense-retriever exceptions.

Usage:
    from counterclaim.dense_retriever.errors import DatasetValidationError

    try:
        scorer, trace = train(scorer, examples, index, corpus, config)
    except DatasetValidationError as e:
        log.error(f"Gold evidence missing: {e.missing_ids[:5]}")
"""

from typing import Iterable, List, Optional

from counterclaim.errors import DataError


class EmbeddingError(DataError):
    """
    Raised when a text cannot be featurized, e.g. no external vector exists for it.

    Example:
        >>> raise EmbeddingError("no vector for text_id 3f2a...")
    """

    error_code = "embedding_error"


class RetrieverTrainingError(DataError):
    """
    Raised when the training loss or one of its terms is not finite.

    Attributes:
        batch_id: Id of the batch being processed
    """

    error_code = "retriever_training_error"

    def __init__(self, message: str, batch_id: Optional[str] = None):
        self.batch_id = batch_id
        if batch_id:
            message = f"{message} (batch {batch_id})"
        super().__init__(message)


class DatasetValidationError(DataError):
    """
    Raised when training examples name gold evidence that is not in the corpus.

    Attributes:
        missing_ids: The unknown gold ids, in first-seen order
    """

    error_code = "dataset_validation_error"

    def __init__(self, missing_ids: Iterable[str]):
        self.missing_ids: List[str] = list(missing_ids)
        preview = ", ".join(self.missing_ids[:5])
        more = f" and {len(self.missing_ids) - 5} more" if len(self.missing_ids) > 5 else ""
        super().__init__(f"Gold evidence not in corpus: {preview}{more}")
