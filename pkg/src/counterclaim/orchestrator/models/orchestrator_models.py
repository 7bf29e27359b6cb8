"""
Request, response and prompt models of the orchestrator.
"""

from string import Formatter
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from counterclaim.lexical_retriever import ScoredDocument
from counterclaim.reward_engine import RewardBreakdown

PROMPT_SLOTS = ("evidence", "claim")


class PromptTemplate(BaseModel):
    """
    Instruction prompt with the evidence placed before the claim.

    Rendered as `{instruction_header}\\n{body}\\n{response_header}\\n`; the
    response slot after the last header is left empty for generation.

    Attributes:
        instruction_header: Line opening the instruction
        response_header: Line after which the response is written
        body: Instruction text with one {evidence} and one {claim} slot
    """

    model_config = ConfigDict(frozen=True)

    instruction_header: str = "### Instruction"
    response_header: str = "### Response"
    body: str = "{evidence}; Based on the above evidence, determine if the claim is valid and explain why: {claim}"

    @field_validator("body")
    @classmethod
    def _one_of_each_slot(cls, value: str) -> str:
        fields = [name for _, name, _, _ in Formatter().parse(value) if name is not None]
        if sorted(fields) != sorted(PROMPT_SLOTS):
            raise ValueError(f"body must contain {{evidence}} and {{claim}} exactly once each, found {fields}")
        return value


class GenerationRequest(BaseModel):
    """
    One call to a generation backend.

    Attributes:
        prompt: Rendered prompt
        max_tokens: Upper bound on generated tokens
        temperature: Sampling temperature; 0 is greedy
        timeout: Seconds to wait for the backend (> 0)
    """

    model_config = ConfigDict(frozen=True)

    prompt: str
    max_tokens: int = Field(default=256, ge=1)
    temperature: float = Field(default=0.0, ge=0.0)
    timeout: float = Field(default=30.0, gt=0.0)


class GenerationResponse(BaseModel):
    """Text produced by a backend, with how long it took and who produced it."""

    model_config = ConfigDict(frozen=True)

    text: str
    latency_s: float = Field(ge=0.0)
    backend_id: str


class Provenance(BaseModel):
    """Where a counter-response came from."""

    backend_id: str
    backend_latency_s: float
    attempts: int
    m: int
    k_out: int


class CounterResponse(BaseModel):
    """
    A generated counter-response with its evidence and reward.

    Attributes:
        claim: The claim answered
        evidence: Retrieved documents, best first; the reward is computed over exactly these
        evidence_texts: Text of each evidence document, same order
        response: Generated response
        reward: Reward breakdown of the response
        provenance: Backend and retrieval settings
    """

    claim: str
    evidence: List[ScoredDocument]
    evidence_texts: List[str]
    response: str
    reward: RewardBreakdown
    provenance: Provenance


class RespondRequest(BaseModel):
    claim: str = Field(min_length=1)


class RetrieveRequest(BaseModel):
    claim: str = Field(min_length=1)
    k: Optional[int] = Field(default=None, ge=1)


class RetrieveResponse(BaseModel):
    claim: str
    documents: List[ScoredDocument]


class HealthReport(BaseModel):
    """
    Service status.

    Attributes:
        status: "ok" once artifacts are loaded
        version: Package version
        artifacts: Artifact file name -> SHA-256 of the loaded file
        backend_id: Generation backend in use
    """

    status: str = "ok"
    version: str
    artifacts: Dict[str, str]
    backend_id: str


class PromptContext(BaseModel):
    """A claim to align on; evidence is retrieved when not given."""

    claim: str = Field(min_length=1)
    evidence: List[str] = Field(default_factory=list)
