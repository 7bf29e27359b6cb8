"""
Reward engine: human-feedback classifiers and the composite response reward.
"""

from .classifier import (
    FeedbackClassifier,
    balanced_accuracy,
    classification_metrics,
    classify,
    fit_logistic,
    format_metrics_table,
    load_classifier,
    load_classifiers,
    load_feedback,
    save_classifier,
    save_classifiers,
    train_classifier,
)
from .errors import ClassifierTrainingError, MetricError, RewardError
from .features import FeedbackFeaturizer, as_input, feedback_terms
from .models import (
    ADDITIVITY_TOLERANCE,
    Aspect,
    ClassifierConfig,
    ClassifierMetrics,
    FeedbackExample,
    ResponseQualityReport,
    RewardBreakdown,
    RewardConfig,
)
from .reward import (
    AspectScorer,
    RewardModel,
    compute_reward,
    evaluate_responses,
    format_quality_table,
    relevance_terms,
)
from .synthetic import imbalanced_feedback, separable_feedback

__all__ = [
    "FeedbackClassifier",
    "balanced_accuracy",
    "classification_metrics",
    "classify",
    "fit_logistic",
    "format_metrics_table",
    "load_classifier",
    "load_classifiers",
    "load_feedback",
    "save_classifier",
    "save_classifiers",
    "train_classifier",
    "ClassifierTrainingError",
    "MetricError",
    "RewardError",
    "FeedbackFeaturizer",
    "as_input",
    "feedback_terms",
    "ADDITIVITY_TOLERANCE",
    "Aspect",
    "ClassifierConfig",
    "ClassifierMetrics",
    "FeedbackExample",
    "ResponseQualityReport",
    "RewardBreakdown",
    "RewardConfig",
    "AspectScorer",
    "RewardModel",
    "compute_reward",
    "evaluate_responses",
    "format_quality_table",
    "relevance_terms",
    "imbalanced_feedback",
    "separable_feedback",
]
