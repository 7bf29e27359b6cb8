"""
Retrieval pipeline: BM25 top-m, dense rerank to top-k, and the ranking-evaluation harness.
"""

from .errors import MetricArgumentError, PipelineError
from .evaluation import (
    DenseOnlyRanker,
    compare_methods,
    evaluate,
    evaluate_ranker,
    format_report_table,
    gold_rank,
    load_eval_examples,
    report_from_ranks,
    report_to_json,
    select_retriever,
    sweep_table,
)
from .metrics import metric_value, ndcg_at_k, ndcg_multi_at_k, parse_metric, recall_at_k
from .models import DEFAULT_METRICS, EvalExample, PipelineConfig, RankingReport, SweepRow
from .pipeline import rank_candidates, two_stage_retrieve
from .synthetic import PlantedBenchmark, planted_token_benchmark, random_corpus

__all__ = [
    "MetricArgumentError",
    "PipelineError",
    "DenseOnlyRanker",
    "compare_methods",
    "evaluate",
    "evaluate_ranker",
    "format_report_table",
    "gold_rank",
    "load_eval_examples",
    "report_from_ranks",
    "report_to_json",
    "select_retriever",
    "sweep_table",
    "metric_value",
    "ndcg_at_k",
    "ndcg_multi_at_k",
    "parse_metric",
    "recall_at_k",
    "DEFAULT_METRICS",
    "EvalExample",
    "PipelineConfig",
    "RankingReport",
    "SweepRow",
    "rank_candidates",
    "two_stage_retrieve",
    "PlantedBenchmark",
    "planted_token_benchmark",
    "random_corpus",
]
