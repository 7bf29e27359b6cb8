from .orchestrator_models import (
    PROMPT_SLOTS,
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

__all__ = [
    "PROMPT_SLOTS",
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
]
