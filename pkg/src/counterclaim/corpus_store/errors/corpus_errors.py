"""
Corpus-store exceptions.

Usage:
    from counterclaim.corpus_store.errors import IngestError

    try:
        corpus = ingest_jsonl("articles.jsonl")
    except IngestError as e:
        log.error(f"Stopped at record {e.position}: {e.message}")
"""

from typing import Optional

from counterclaim.errors import DataError


class IngestError(DataError):
    """
    Raised when the input stream itself cannot be read.

    Malformed records never raise; they are skipped and counted. This error
    means the stream broke (I/O failure, missing file) and carries the
    1-based position of the record being read when it happened.

    Example:
        >>> raise IngestError("read failed", position=1042)
    """

    error_code = "ingest_failed"

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at record {position})"
        super().__init__(message)


class CorpusStoreError(DataError):
    """
    Raised when the on-disk record store is missing, corrupt, or asked for an unknown id.

    Example:
        >>> raise CorpusStoreError("records.bin has bad magic")
    """

    error_code = "corpus_store_error"
