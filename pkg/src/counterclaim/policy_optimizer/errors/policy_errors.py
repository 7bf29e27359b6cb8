"""
Policy-optimizer exceptions.

Usage:
    from counterclaim.policy_optimizer.errors import SupervisedTrainingError

    try:
        reference, trace = supervised_finetune(policy, demonstrations)
    except SupervisedTrainingError as e:
        log.error(e.message)
"""

from counterclaim.errors import DataError


class PolicyError(DataError):
    """
    Raised when a policy cannot be built or used as asked.

    Unknown tokens, responses longer than max_length, mismatched actor and
    reference policies, or a sequence space too large to enumerate.

    Example:
        >>> raise PolicyError("token 'vaccine' is not in the policy vocabulary")
    """

    error_code = "policy_error"


class SupervisedTrainingError(DataError):
    """
    Raised when supervised fine-tuning cannot run, e.g. no demonstrations were given.

    Example:
        >>> raise SupervisedTrainingError("no demonstrations")
    """

    error_code = "supervised_training_error"
