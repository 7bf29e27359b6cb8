"""
Coarse-to-fine evidence retrieval: BM25 picks m candidates, the dense scorer
reorders exactly those m and the top k_out are returned.
"""

from typing import List

from counterclaim.corpus_store import evidence_text
from counterclaim.dense_retriever import relevance_many
from counterclaim.lexical_retriever import ScoredDocument, Stage, retrieve_top_m

from .errors.pipeline_errors import PipelineError
from .models.pipeline_models import PipelineConfig


def rank_candidates(config: PipelineConfig, claim: str) -> List[ScoredDocument]:
    """
    All m stage-1 candidates, reordered by dense relevance (ties by ascending doc_id).

    Raises:
        PipelineError: If the index does not cover the configured corpus
    """
    if not config.index_matches_corpus():
        raise PipelineError(
            f"Index over {config.index.doc_count} documents does not match the corpus of {len(config.corpus)}; "
            "rebuild the index"
        )
    candidates = retrieve_top_m(config.index, claim, config.m)
    texts = [evidence_text(config.corpus.get(hit.doc_id)) for hit in candidates]
    scores = relevance_many(config.scorer, claim, texts)
    order = sorted(range(len(candidates)), key=lambda i: (-scores[i], candidates[i].doc_id))
    return [ScoredDocument(doc_id=candidates[i].doc_id, score=float(scores[i]), stage=Stage.DENSE) for i in order]


def two_stage_retrieve(config: PipelineConfig, claim: str) -> List[ScoredDocument]:
    """
    The k_out best evidence documents for a claim, tagged Stage.DENSE.

    Every returned document is in the BM25 top-m for the claim.
    """
    return rank_candidates(config, claim)[: config.k_out]
