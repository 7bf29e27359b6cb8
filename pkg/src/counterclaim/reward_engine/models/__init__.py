"""
Models for the reward engine.
"""

from .reward_models import (
    ADDITIVITY_TOLERANCE,
    Aspect,
    ClassifierConfig,
    ClassifierMetrics,
    FeedbackExample,
    ResponseQualityReport,
    RewardBreakdown,
    RewardConfig,
)

__all__ = [
    "ADDITIVITY_TOLERANCE",
    "Aspect",
    "ClassifierConfig",
    "ClassifierMetrics",
    "FeedbackExample",
    "ResponseQualityReport",
    "RewardBreakdown",
    "RewardConfig",
]
