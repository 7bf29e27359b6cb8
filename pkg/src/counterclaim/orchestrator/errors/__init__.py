from .orchestrator_errors import (
    ArtifactMissingError,
    BackendRequestError,
    BackendTimeoutError,
    ConfigurationError,
    InputDataError,
    InvalidRequestError,
    ResponseGenerationError,
)

__all__ = [
    "ArtifactMissingError",
    "BackendRequestError",
    "BackendTimeoutError",
    "ConfigurationError",
    "InputDataError",
    "InvalidRequestError",
    "ResponseGenerationError",
]
