"""
Models for human-feedback classifiers and the composite reward.
"""

import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from counterclaim.dense_retriever import DenseScorer

# Tolerance of the total = components identity
ADDITIVITY_TOLERANCE = 1e-9


class Aspect(str, Enum):
    """Quality aspect a feedback label judges."""

    REFUTATION = "refutation"
    FACTUALITY = "factuality"
    POLITENESS = "politeness"


class FeedbackExample(BaseModel):
    """
    One human judgement of a response.

    Attributes:
        claim: The misinformation claim
        evidence: Evidence texts the response was written from
        response: The generated response being judged
        label: 1 if the response satisfies the aspect, else 0
        aspect: Which aspect the label judges
    """

    model_config = ConfigDict(frozen=True)

    claim: str
    evidence: List[str] = Field(default_factory=list)
    response: str
    label: int = Field(ge=0, le=1)
    aspect: Aspect


class ClassifierConfig(BaseModel):
    """
    Training settings for one feedback classifier.

    Attributes:
        n_features: Hashed feature buckets
        test_size: Held-out fraction, split stratified by label
        epochs: Maximum full-batch optimizer steps
        learning_rate: Adam learning rate
        l2: L2 penalty on the weights
        class_balanced: Weight each class inversely to its frequency
        tol: Stop once the loss improves by less than this
        seed: Seed of the split
    """

    model_config = ConfigDict(frozen=True)

    n_features: int = Field(default=4096, ge=16)
    test_size: float = Field(default=0.2, gt=0.0, lt=1.0)
    epochs: int = Field(default=300, ge=1)
    learning_rate: float = Field(default=0.1, gt=0.0)
    l2: float = Field(default=1e-4, ge=0.0)
    class_balanced: bool = True
    tol: float = Field(default=1e-7, ge=0.0)
    seed: int = 0


class ClassifierMetrics(BaseModel):
    """Held-out metrics of one classifier (BA / Acc. / F1 / Prec. / Rec.)."""

    aspect: Aspect
    balanced_accuracy: float
    accuracy: float
    f1: float
    precision: float
    recall: float
    train_size: int
    test_size: int


class RewardConfig(BaseModel):
    """
    How the composite reward is assembled.

    Attributes:
        alpha: Scale of the two relevance terms (>= 0)
        scorer: Dense scorer supplying claim/evidence relevance
        raw_relevance: Use temperature-scaled relevance instead of (cosine + 1) / 2
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha: float = Field(default=0.5, ge=0.0)
    scorer: DenseScorer
    raw_relevance: bool = False

    @field_validator("alpha")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("alpha must be finite")
        return value


class RewardBreakdown(BaseModel):
    """
    The reward of one response, term by term.

    total = refutation + factuality + politeness + alpha * (claim_relevance + evidence_relevance)
    """

    model_config = ConfigDict(frozen=True)

    refutation: float
    factuality: float
    politeness: float
    claim_relevance: float
    evidence_relevance: float
    alpha: float
    total: float

    @model_validator(mode="after")
    def _additive(self) -> "RewardBreakdown":
        expected = (
            self.refutation
            + self.factuality
            + self.politeness
            + self.alpha * (self.claim_relevance + self.evidence_relevance)
        )
        if abs(self.total - expected) > ADDITIVITY_TOLERANCE:
            raise ValueError(f"total {self.total} does not equal its components {expected}")
        return self


class ResponseQualityReport(BaseModel):
    """Mean reward components over a set of responses (R. / F. / P. / C. / E.)."""

    refutation: float
    factuality: float
    politeness: float
    claim_relevance: float
    evidence_relevance: float
    total: float
    count: int
    label: Optional[str] = None
