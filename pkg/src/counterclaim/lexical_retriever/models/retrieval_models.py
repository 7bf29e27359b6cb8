"""
Models shared by the lexical and dense retrieval stages.
"""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Stage(str, Enum):
    """Which scorer produced a ScoredDocument's score."""

    LEXICAL = "lexical"
    DENSE = "dense"


class ScoredDocument(BaseModel):
    """
    A document id with the relevance score one retrieval stage gave it.

    Attributes:
        doc_id: Id of the scored document
        score: Finite relevance score
        stage: Stage that produced the score
    """

    model_config = ConfigDict(frozen=True)

    doc_id: str
    score: float
    stage: Stage

    @field_validator("score")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("score must be finite")
        return value


class Bm25Params(BaseModel):
    """
    Okapi BM25 parameters.

    Attributes:
        k1: Term-frequency saturation (k1 >= 0)
        b: Length normalization strength (0 <= b <= 1)
    """

    model_config = ConfigDict(frozen=True)

    k1: float = Field(default=1.2, ge=0.0)
    b: float = Field(default=0.75, ge=0.0, le=1.0)
