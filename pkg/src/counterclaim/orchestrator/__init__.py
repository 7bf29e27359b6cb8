"""
Orchestrator: prompt rendering, generation backends, settings, and the shared
respond path behind the CLI and the HTTP service.
"""

from .app import create_app, status_for
from .backends import (
    GenerationBackend,
    HttpGenerationBackend,
    OpenAICompatibleBackend,
    PolicyBackend,
    StaticBackend,
    generate_with_retry,
)
from .errors import (
    ArtifactMissingError,
    BackendRequestError,
    BackendTimeoutError,
    ConfigurationError,
    InputDataError,
    InvalidRequestError,
    ResponseGenerationError,
)
from .models import (
    CounterResponse,
    GenerationRequest,
    GenerationResponse,
    HealthReport,
    PromptContext,
    PromptTemplate,
    Provenance,
    RespondRequest,
    RetrieveRequest,
    RetrieveResponse,
)
from .prompt import DEFAULT_TEMPLATE, prompt_renderer, render_prompt
from .service import (
    CounterclaimService,
    artifact_digests,
    build_backend,
    load_corpus,
    load_retrieval,
    load_reward,
    retrieve_documents,
)
from .settings import (
    BackendKind,
    BackendSettings,
    CounterclaimSettings,
    PipelineSettings,
    PolicySettings,
    RetrieverSettings,
    RewardSettings,
    ServiceSettings,
    load_settings,
)

__all__ = [
    "create_app",
    "status_for",
    "GenerationBackend",
    "HttpGenerationBackend",
    "OpenAICompatibleBackend",
    "PolicyBackend",
    "StaticBackend",
    "generate_with_retry",
    "ArtifactMissingError",
    "BackendRequestError",
    "BackendTimeoutError",
    "ConfigurationError",
    "InputDataError",
    "InvalidRequestError",
    "ResponseGenerationError",
    "CounterResponse",
    "GenerationRequest",
    "GenerationResponse",
    "HealthReport",
    "PromptContext",
    "PromptTemplate",
    "Provenance",
    "RespondRequest",
    "RetrieveRequest",
    "RetrieveResponse",
    "DEFAULT_TEMPLATE",
    "prompt_renderer",
    "render_prompt",
    "CounterclaimService",
    "artifact_digests",
    "build_backend",
    "load_corpus",
    "load_retrieval",
    "load_reward",
    "require_artifact",
    "retrieve_documents",
    "BackendKind",
    "BackendSettings",
    "CounterclaimSettings",
    "PipelineSettings",
    "PolicySettings",
    "RetrieverSettings",
    "RewardSettings",
    "ServiceSettings",
    "load_settings",
]
