"""
Models for the retrieval pipeline and its evaluation harness.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from counterclaim.corpus_store import Corpus
from counterclaim.dense_retriever import DenseScorer
from counterclaim.lexical_retriever import InvertedIndex

DEFAULT_METRICS = ("n@1", "n@3", "r@3", "n@5", "r@5")


class PipelineConfig(BaseModel):
    """
    Two-stage retrieval setup.

    Attributes:
        m: Stage-1 (BM25) subset size
        k_out: Evidence documents returned after dense reranking (1 <= k_out <= m)
        scorer: Trained dense scorer
        index: BM25 index over `corpus`
        corpus: Corpus the index was built from, used for document text
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int = Field(default=20, ge=1)
    k_out: int = Field(default=5, ge=1)
    scorer: DenseScorer
    index: InvertedIndex
    corpus: Corpus

    _aligned: Optional[bool] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _k_out_within_m(self) -> "PipelineConfig":
        if self.k_out > self.m:
            raise ValueError(f"k_out ({self.k_out}) must not exceed m ({self.m})")
        return self

    def index_matches_corpus(self) -> bool:
        """True when the index was built over exactly this corpus, in order."""
        if self._aligned is None:
            self._aligned = self.index.doc_count == len(self.corpus) and self.index.doc_ids == self.corpus.doc_ids
        return self._aligned


class EvalExample(BaseModel):
    """A claim and the id of its annotated gold evidence."""

    claim: str
    gold_doc_id: str


class RankingReport(BaseModel):
    """
    Mean ranking metrics over an evaluation set.

    Attributes:
        scores: Metric name ("n@k" NDCG, "r@k" recall) -> mean in [0, 1]
        ranks: 1-based gold rank per evaluated example; None when the gold
            fell outside the ranked list
        excluded: Examples dropped because their gold id is not in the corpus
        excluded_ids: The dropped gold ids
    """

    scores: Dict[str, float] = Field(default_factory=dict)
    ranks: List[Optional[int]] = Field(default_factory=list)
    excluded: int = 0
    excluded_ids: List[str] = Field(default_factory=list)

    @property
    def evaluated(self) -> int:
        return len(self.ranks)


class SweepRow(BaseModel):
    """One grid point of a retriever hyperparameter sweep."""

    learning_rate: float
    tau: float
    lam: float
    ndcg_at_10: float
    final_loss: float
