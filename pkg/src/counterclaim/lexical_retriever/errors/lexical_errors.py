"""
Lexical-retriever exceptions.

Usage:
    from counterclaim.lexical_retriever.errors import SamplingError

    try:
        negatives = sample_negatives(index, claim, k=4, exclude={gold}, seed=7)
    except SamplingError as e:
        log.error(e.message)
"""

from counterclaim.errors import DataError


class IndexBuildError(DataError):
    """
    Raised when an index cannot be built, e.g. from an empty corpus.

    Example:
        >>> raise IndexBuildError("cannot index an empty corpus")
    """

    error_code = "index_build_error"


class SamplingError(DataError):
    """
    Raised when the corpus is too small to draw k documents outside the excluded set.

    Example:
        >>> raise SamplingError("need more than 9 documents, corpus has 6")
    """

    error_code = "sampling_error"
