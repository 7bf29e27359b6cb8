"""
Policy optimizer: supervised fine-tuning of a reference policy and
KL-regularized PPO against the composite reward.
"""

from .controller import AdaptiveKLController, FixedKLController, make_kl_controller
from .errors import PolicyError, SupervisedTrainingError
from .kl import MAX_ENUMERATION, enumerate_sequences, exact_sequence_kl, kl_estimate
from .models import (
    CURVE_COLUMNS,
    KL_IDENTITY_TOLERANCE,
    AlignmentCurve,
    CurvePoint,
    Demonstration,
    PolicyPrompt,
    PpoConfig,
    PpoStats,
    SftConfig,
    SftTrace,
    Trajectory,
)
from .policy import (
    BigramPolicy,
    ValueHead,
    build_vocabulary,
    default_prompt,
    generate,
    load_policy,
    save_policy,
    sequence_log_prob,
)
from .ppo import (
    PpoBatch,
    PpoLoss,
    align,
    generalized_advantages,
    make_optimizer,
    ppo_loss,
    ppo_update,
    prepare_batch,
    save_curve,
    shaped_rewards,
    whiten,
)
from .rollout import PromptRenderer, RewardFn, rollout
from .sft import supervised_finetune
from .toy import (
    ToyEnvironment,
    load_toy,
    save_toy,
    toy_environment,
    toy_ppo_config,
    toy_reference,
    toy_sft_config,
)

__all__ = [
    "AdaptiveKLController",
    "FixedKLController",
    "make_kl_controller",
    "PolicyError",
    "SupervisedTrainingError",
    "MAX_ENUMERATION",
    "enumerate_sequences",
    "exact_sequence_kl",
    "kl_estimate",
    "CURVE_COLUMNS",
    "KL_IDENTITY_TOLERANCE",
    "AlignmentCurve",
    "CurvePoint",
    "Demonstration",
    "PolicyPrompt",
    "PpoConfig",
    "PpoStats",
    "SftConfig",
    "SftTrace",
    "Trajectory",
    "BigramPolicy",
    "ValueHead",
    "build_vocabulary",
    "default_prompt",
    "generate",
    "load_policy",
    "save_policy",
    "sequence_log_prob",
    "PpoBatch",
    "PpoLoss",
    "align",
    "generalized_advantages",
    "make_optimizer",
    "ppo_loss",
    "ppo_update",
    "prepare_batch",
    "save_curve",
    "shaped_rewards",
    "whiten",
    "PromptRenderer",
    "RewardFn",
    "rollout",
    "supervised_finetune",
    "ToyEnvironment",
    "load_toy",
    "save_toy",
    "toy_environment",
    "toy_ppo_config",
    "toy_reference",
    "toy_sft_config",
]
