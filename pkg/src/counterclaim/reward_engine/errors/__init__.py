from .reward_errors import ClassifierTrainingError, MetricError, RewardError

__all__ = ["ClassifierTrainingError", "MetricError", "RewardError"]
