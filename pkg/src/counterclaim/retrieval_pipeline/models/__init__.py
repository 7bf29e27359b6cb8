"""
Models for the retrieval pipeline.
"""

from .pipeline_models import DEFAULT_METRICS, EvalExample, PipelineConfig, RankingReport, SweepRow

__all__ = ["DEFAULT_METRICS", "EvalExample", "PipelineConfig", "RankingReport", "SweepRow"]
