from .policy_errors import PolicyError, SupervisedTrainingError

__all__ = ["PolicyError", "SupervisedTrainingError"]
