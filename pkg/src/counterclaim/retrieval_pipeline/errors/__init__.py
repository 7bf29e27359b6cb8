from .pipeline_errors import MetricArgumentError, PipelineError

__all__ = ["PipelineError", "MetricArgumentError"]
