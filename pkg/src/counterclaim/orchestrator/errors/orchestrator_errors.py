"""
Orchestrator exceptions: configuration, requests and the generation backend.
"""

from typing import List, Optional

from counterclaim.errors import BackendError, DataError, UsageError
from counterclaim.lexical_retriever import ScoredDocument


class ConfigurationError(UsageError):
    """
    Raised when the TOML file, environment or flags do not form valid settings.

    Example:
        >>> raise ConfigurationError("pipeline.k_out: must not exceed m")
    """

    error_code = "configuration_error"


class InputDataError(DataError):
    """
    Raised when a JSON-lines input file cannot be read or holds no valid record.

    Example:
        >>> raise InputDataError("prompts.jsonl holds no valid PromptContext records")
    """

    error_code = "input_data_error"


class InvalidRequestError(UsageError):
    """
    Raised for a well-formed request asking for something impossible, e.g. k > m.
    """

    error_code = "invalid_request"


class ArtifactMissingError(UsageError):
    """
    Raised when a command needs an artifact that has not been built yet.

    Example:
        >>> raise ArtifactMissingError("artifacts/index.ccaf not found; run `counterclaim index` first")
    """

    error_code = "artifact_missing"


class BackendTimeoutError(BackendError):
    """Raised when the generation backend does not answer within the timeout."""

    error_code = "backend_timeout"


class BackendRequestError(BackendError):
    """
    Raised when the generation backend answers with an error or an unusable body.

    Attributes:
        status_code: HTTP status of the failed call, if there was one
    """

    error_code = "backend_request_error"

    def __init__(self, message: str, status_code: Optional[int] = None):
        self.status_code = status_code
        super().__init__(message)

    @property
    def retryable(self) -> bool:
        """Connection problems, 429 and 5xx are worth another attempt; other 4xx are not."""
        return self.status_code is None or self.status_code == 429 or self.status_code >= 500


class ResponseGenerationError(BackendError):
    """
    Raised when no response could be generated after all retries.

    Retrieval already succeeded, so the evidence travels with the error.

    Attributes:
        claim: The claim being answered
        evidence: The retrieved evidence documents
        timed_out: Whether the last attempt failed by timeout
    """

    error_code = "response_generation_failed"

    def __init__(self, message: str, claim: str, evidence: List[ScoredDocument], timed_out: bool = False):
        self.claim = claim
        self.evidence = evidence
        self.timed_out = timed_out
        super().__init__(message)
