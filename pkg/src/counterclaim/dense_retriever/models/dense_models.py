"""
Models for the dense retriever: embedding and training configuration, the
per-claim training batch and the training trace.
"""

from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from counterclaim.corpus_store import EvidenceDocument

# Learning rates searched when fine-tuning a pretrained encoder.
ENCODER_LEARNING_RATES = (1e-5, 2e-5, 3e-5)
# Grid for the margin and the contrastive scale.
MARGIN_GRID = (0.1, 0.2, 0.3, 0.4, 0.5)


class FeaturizerKind(str, Enum):
    HASHED_BAG_OF_WORDS = "hashed_bag_of_words"
    EXTERNAL_VECTORS = "external_vectors"


class ProjectionInit(str, Enum):
    IDENTITY = "identity"
    RANDOM = "random"


class ContrastiveForm(str, Enum):
    """How the gold pair's softmax share enters the loss."""

    PROBABILITY = "probability"
    LOG_PROBABILITY = "log_probability"


class EmbeddingConfig(BaseModel):
    """
    How texts become vectors.

    Attributes:
        dim: Feature and embedding size (>= 8)
        featurizer: Hashed bag of words, or vectors supplied from a file
        temperature: Divisor applied to cosine similarity (> 0)
        init: Starting projection; identity gives plain bag-of-words cosine
        seed: Seed for the random init
        vectors_path: JSON-lines file of {text_id, vector} for external vectors
        remove_stopwords: Tokenizer setting for hashed features
    """

    model_config = ConfigDict(frozen=True)

    dim: int = Field(default=256, ge=8)
    featurizer: FeaturizerKind = FeaturizerKind.HASHED_BAG_OF_WORDS
    temperature: float = Field(default=0.05, gt=0.0)
    init: ProjectionInit = ProjectionInit.IDENTITY
    seed: int = 0
    vectors_path: Optional[Path] = None
    remove_stopwords: bool = True

    @model_validator(mode="after")
    def _vectors_need_path(self) -> "EmbeddingConfig":
        if self.featurizer == FeaturizerKind.EXTERNAL_VECTORS and self.vectors_path is None:
            raise ValueError("external_vectors featurizer needs vectors_path")
        return self


class RetrieverTrainConfig(BaseModel):
    """
    Training settings for the dense scorer.

    Attributes:
        tau: Margin between the gold and the best positive, in relevance units
        lam: Scale of the contrastive term
        k: Positives and negatives sampled per claim
        epochs: Passes over the dataset
        learning_rate: AdamW learning rate
        weight_decay: AdamW decoupled weight decay
        warmup_steps: Linear warmup before cosine decay
        batch_size: Claims per optimizer step
        contrastive_form: Probability (default) or log-probability
        seed: Seed for shuffling and negative sampling
    """

    model_config = ConfigDict(frozen=True)

    tau: float = Field(default=0.2, ge=0.0, le=1.0)
    lam: float = Field(default=0.2, ge=0.0, le=1.0)
    k: int = Field(default=4, ge=1)
    epochs: int = Field(default=5, ge=1)
    learning_rate: float = Field(default=1e-2, gt=0.0)
    weight_decay: float = Field(default=0.01, ge=0.0)
    warmup_steps: int = Field(default=100, ge=0)
    batch_size: int = Field(default=1, ge=1)
    contrastive_form: ContrastiveForm = ContrastiveForm.PROBABILITY
    seed: int = 0


class RetrieverExample(BaseModel):
    """One claim with its annotated gold evidence id."""

    claim: str
    gold_doc_id: str


class RetrieverTrainBatch(BaseModel):
    """
    One claim with its gold evidence, k positives and k negatives.

    Invariants: gold is in neither side, the sides are disjoint and the same size.
    """

    model_config = ConfigDict(frozen=True)

    claim: str
    gold: EvidenceDocument
    positives: List[EvidenceDocument]
    negatives: List[EvidenceDocument]
    batch_id: str = ""

    @model_validator(mode="after")
    def _check_sides(self) -> "RetrieverTrainBatch":
        pos_ids = {doc.doc_id for doc in self.positives}
        neg_ids = {doc.doc_id for doc in self.negatives}
        if not self.positives or len(self.positives) != len(self.negatives):
            raise ValueError("positives and negatives must be non-empty and the same size")
        if len(pos_ids) != len(self.positives) or len(neg_ids) != len(self.negatives):
            raise ValueError("positives and negatives must not repeat documents")
        if pos_ids & neg_ids:
            raise ValueError("positives and negatives overlap")
        if self.gold.doc_id in pos_ids | neg_ids:
            raise ValueError("gold evidence appears among the samples")
        return self


class TrainingTrace(BaseModel):
    """Mean loss per epoch and the number of optimizer steps taken."""

    epoch_losses: List[float] = Field(default_factory=list)
    steps: int = 0
