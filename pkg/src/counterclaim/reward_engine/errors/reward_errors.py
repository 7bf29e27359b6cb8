"""
Reward-engine exceptions.

Usage:
    from counterclaim.reward_engine.errors import ClassifierTrainingError

    try:
        classifier, metrics = train_classifier(examples, Aspect.POLITENESS)
    except ClassifierTrainingError as e:
        log.error(e.message)
"""

from counterclaim.errors import DataError


class ClassifierTrainingError(DataError):
    """
    Raised when a feedback classifier cannot be trained, e.g. only one label is present.

    Example:
        >>> raise ClassifierTrainingError("politeness feedback has only label 1")
    """

    error_code = "classifier_training_error"


class MetricError(DataError):
    """Raised when a metric is undefined for the given labels."""

    error_code = "metric_error"


class RewardError(DataError):
    """
    Raised when a reward cannot be composed: no evidence, or an aspect classifier is missing.

    Example:
        >>> raise RewardError("evidence set is empty")
    """

    error_code = "reward_error"
