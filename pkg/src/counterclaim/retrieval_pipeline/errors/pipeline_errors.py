"""
Retrieval-pipeline exceptions.
"""

from counterclaim.errors import DataError, UsageError


class PipelineError(DataError):
    """
    Raised when retrieval cannot run, e.g. the index was built over another corpus.

    Example:
        >>> raise PipelineError("index covers 5000 documents, corpus has 4999")
    """

    error_code = "pipeline_error"


class MetricArgumentError(UsageError):
    """
    Raised for an invalid metric argument such as k < 1 or a rank < 1.

    Example:
        >>> raise MetricArgumentError("k must be at least 1")
    """

    error_code = "metric_argument_error"
