# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import torch
from pydantic import ValidationError

from counterclaim.corpus_store import Corpus
from counterclaim.dense_retriever import (
    MARGIN_GRID,
    DenseScorer,
    EmbeddingConfig,
    RetrieverExample,
    RetrieverTrainConfig,
    train,
)
from counterclaim.lexical_retriever import InvertedIndex, TfidfRetriever, retrieve_top_m

from .errors.pipeline_errors import PipelineError
from .metrics import metric_value
from .models.pipeline_models import DEFAULT_METRICS, EvalExample, PipelineConfig, RankingReport, SweepRow
from .pipeline import rank_candidates

Ranker = Callable[[str], List[str]]

TABLE_COLUMNS = {"n@1": "N@1", "n@3": "N@3", "r@3": "R@3", "n@5": "N@5", "r@5": "R@5"}


def load_eval_examples(path: Union[str, Path]) -> List[EvalExample]:
    """
    Read a JSON-lines eval set of {claim, gold_doc_id}.

    Malformed lines are skipped and counted in a warning.

    Raises:
        PipelineError: If the file cannot be read or holds no valid example
    """
    examples: List[EvalExample] = []
    skipped = 0
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                try:
                    examples.append(EvalExample.model_validate_json(line))
                except ValidationError:
                    skipped += 1
    except (OSError, UnicodeDecodeError) as e:
        raise PipelineError(f"Cannot read {path}: {e}") from e
    if skipped:
        log.warning(f"Skipped {skipped} malformed eval examples in {path}")
    if not examples:
        raise PipelineError(f"{path} holds no valid eval examples")
    return examples


def gold_rank(ranked_ids: Sequence[str], gold_doc_id: str) -> Optional[int]:
    """1-based position of the gold id, or None if absent."""
    for position, doc_id in enumerate(ranked_ids, start=1):
        if doc_id == gold_doc_id:
            return position
    return None


def report_from_ranks(
    ranks: Sequence[Optional[int]],
    metrics: Sequence[str] = DEFAULT_METRICS,
    excluded_ids: Sequence[str] = (),
) -> RankingReport:
    """Average each metric over per-example gold ranks."""
    if not ranks:
        raise PipelineError("No examples left to evaluate")
    scores = {name: float(np.mean([metric_value(name, rank) for rank in ranks])) for name in metrics}
    return RankingReport(scores=scores, ranks=list(ranks), excluded=len(excluded_ids), excluded_ids=list(excluded_ids))


def evaluate_ranker(
    ranker: Ranker,
    examples: Sequence[EvalExample],
    corpus: Corpus,
    metrics: Sequence[str] = DEFAULT_METRICS,
    workers: int = 1,
) -> RankingReport:
    """
    Evaluate any claim -> ranked doc ids function.

    Examples whose gold id is not in the corpus are excluded and counted.
    Rankers must be safe to call from several threads when workers > 1.
    """
    if not examples:
        raise PipelineError("Evaluation set is empty")
    kept = [ex for ex in examples if ex.gold_doc_id in corpus]
    excluded = [ex.gold_doc_id for ex in examples if ex.gold_doc_id not in corpus]
    if excluded:
        log.warning(f"Excluded {len(excluded)} examples whose gold evidence is not in the corpus")

    def rank_one(example: EvalExample) -> Optional[int]:
        return gold_rank(ranker(example.claim), example.gold_doc_id)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ranks = list(pool.map(rank_one, kept))
    else:
        ranks = [rank_one(ex) for ex in kept]
    return report_from_ranks(ranks, metrics, excluded)


def evaluate(
    config: PipelineConfig,
    examples: Sequence[EvalExample],
    metrics: Sequence[str] = DEFAULT_METRICS,
    workers: int = 1,
) -> RankingReport:
    """
    Ranking metrics of the two-stage pipeline.

    The gold rank is its position in the dense-reordered stage-1 list of m
    documents; a gold outside the BM25 subset has no rank and scores 0.
    """
    log.step(f"Evaluating two-stage retrieval on {len(examples)} claims (m={config.m})")

    def ranker(claim: str) -> List[str]:
        return [hit.doc_id for hit in rank_candidates(config, claim)]

    report = evaluate_ranker(ranker, examples, config.corpus, metrics, workers)
    log.success(" ".join(f"{name}={value:.3f}" for name, value in report.scores.items()))
    return report


# ------------------ Method comparison ------------------ #
class DenseOnlyRanker:
    """Ranks the whole corpus by dense relevance, document embeddings computed once."""

    def __init__(self, scorer: DenseScorer, corpus: Corpus, depth: int):
        self.scorer = scorer
        self.doc_ids = corpus.doc_ids
        self.depth = depth
        with torch.no_grad():
            self.doc_vectors = scorer.embed_texts(corpus.texts()).numpy()
        id_rank = np.empty(len(self.doc_ids), dtype=np.int64)
        id_rank[np.argsort(np.asarray(self.doc_ids, dtype=np.str_), kind="stable")] = np.arange(len(self.doc_ids))
        self._id_rank = id_rank

    def __call__(self, claim: str) -> List[str]:
        with torch.no_grad():
            query = self.scorer.embed_texts([claim])[0].numpy()
        scores = self.doc_vectors @ query
        order = np.lexsort((self._id_rank, -scores))[: self.depth]
        return [self.doc_ids[i] for i in order]


def compare_methods(
    config: PipelineConfig,
    examples: Sequence[EvalExample],
    metrics: Sequence[str] = DEFAULT_METRICS,
) -> Dict[str, RankingReport]:
    """
    Evaluate TF-IDF, BM25-only, dense-only and two-stage retrieval on the same claims.

    Every method is ranked to depth m.
    """
    corpus, index, depth = config.corpus, config.index, config.m
    tfidf = TfidfRetriever(corpus, remove_stopwords=index.remove_stopwords)
    rankers: Dict[str, Ranker] = {
        "tfidf": lambda claim: [hit.doc_id for hit in tfidf.retrieve(claim, depth)],
        "bm25": lambda claim: [hit.doc_id for hit in retrieve_top_m(index, claim, depth)],
        "dense": DenseOnlyRanker(config.scorer, corpus, depth),
        "two_stage": lambda claim: [hit.doc_id for hit in rank_candidates(config, claim)],
    }
    reports = {}
    for name, ranker in rankers.items():
        reports[name] = evaluate_ranker(ranker, examples, corpus, metrics)
        log.fine(f"{name}: " + " ".join(f"{k}={v:.3f}" for k, v in reports[name].scores.items()))
    return reports


def format_report_table(reports: Dict[str, RankingReport]) -> str:
    """Methods as rows, metrics as N@1 / N@3 / R@3 / N@5 / R@5 style columns."""
    frame = pd.DataFrame({name: report.scores for name, report in reports.items()}).T
    frame = frame.rename(columns=lambda name: TABLE_COLUMNS.get(name, name.upper()))
    return frame.to_string(float_format=lambda value: f"{value:.3f}")


def report_to_json(report: RankingReport) -> str:
    return json.dumps(report.model_dump(), indent=2)


# ------------------ Model selection ------------------ #
def select_retriever(
    corpus: Corpus,
    index: InvertedIndex,
    train_examples: Sequence[RetrieverExample],
    validation_examples: Sequence[EvalExample],
    embedding_config: Optional[EmbeddingConfig] = None,
    base_config: Optional[RetrieverTrainConfig] = None,
    learning_rates: Iterable[float] = (1e-2,),
    taus: Iterable[float] = MARGIN_GRID,
    lams: Iterable[float] = MARGIN_GRID,
    m: int = 20,
) -> Tuple[DenseScorer, List[SweepRow]]:
    """
    Train one scorer per (learning rate, tau, lam) and keep the best by validation NDCG@10.

    Ties keep the earlier grid point. A lambda sweep is a call with a single
    tau and learning rate.

    Returns:
        Tuple of (best scorer, one SweepRow per grid point in grid order)
    """
    base_config = base_config or RetrieverTrainConfig()
    embedding_config = embedding_config or EmbeddingConfig()
    rows: List[SweepRow] = []
    best: Optional[Tuple[float, DenseScorer]] = None

    grid = [(lr, tau, lam) for lr in learning_rates for tau in taus for lam in lams]
    log.step(f"Selecting retriever over {len(grid)} grid points by NDCG@10")
    for learning_rate, tau, lam in grid:
        config = base_config.model_copy(update={"learning_rate": learning_rate, "tau": tau, "lam": lam})
        scorer, trace = train(DenseScorer(embedding_config), train_examples, index, corpus, config)
        pipeline = PipelineConfig(m=max(m, 10), k_out=10, scorer=scorer, index=index, corpus=corpus)
        report = evaluate(pipeline, validation_examples, metrics=("n@10",))
        score = report.scores["n@10"]
        rows.append(
            SweepRow(learning_rate=learning_rate, tau=tau, lam=lam, ndcg_at_10=score, final_loss=trace.epoch_losses[-1])
        )
        log.fine(f"lr={learning_rate:g} tau={tau} lam={lam}: NDCG@10={score:.4f}")
        if best is None or score > best[0]:
            best = (score, scorer)

    log.success(f"Best NDCG@10 {best[0]:.4f}")
    return best[1], rows


def sweep_table(rows: Sequence[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows])
