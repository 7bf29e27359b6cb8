"""
Models for supervised fine-tuning and KL-regularized PPO.
"""

import math
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Tolerance of per_token_kl = actor_logprobs - ref_logprobs
KL_IDENTITY_TOLERANCE = 1e-12

CURVE_COLUMNS = ["iteration", "mean_reward", "mean_kl", "clip_fraction", "beta", "aborted"]


class PolicyPrompt(BaseModel):
    """Context a response is generated for: a claim and its evidence texts."""

    model_config = ConfigDict(frozen=True)

    claim: str
    evidence: List[str] = Field(default_factory=list)


class Demonstration(BaseModel):
    """A (claim, evidence, response) triple the reference policy imitates."""

    model_config = ConfigDict(frozen=True)

    claim: str
    evidence: List[str] = Field(default_factory=list)
    response: str


class Trajectory(BaseModel):
    """
    One sampled response with everything PPO needs to learn from it.

    Per-token lists all have one entry per action, the closing end-of-sequence
    action included when the response stopped before max_length.

    Attributes:
        claim: Claim of the prompt
        evidence: Evidence texts of the prompt
        prompt: The rendered prompt the policy conditioned on
        actions: Token ids, end-of-sequence included
        response: Decoded response text
        actor_logprobs: log pi_act of each realized action
        ref_logprobs: log pi_ref of each realized action
        per_token_kl: actor_logprobs - ref_logprobs
        values: Value-head estimate before each action
        terminal_reward: Reward of the full response
        seed: Seed the trajectory was sampled with
    """

    model_config = ConfigDict(frozen=True)

    claim: str
    evidence: List[str]
    prompt: str
    actions: List[int] = Field(min_length=1)
    response: str
    actor_logprobs: List[float]
    ref_logprobs: List[float]
    per_token_kl: List[float]
    values: List[float]
    terminal_reward: float
    seed: int = 0

    @model_validator(mode="after")
    def _aligned(self) -> "Trajectory":
        length = len(self.actions)
        for name in ("actor_logprobs", "ref_logprobs", "per_token_kl", "values"):
            if len(getattr(self, name)) != length:
                raise ValueError(f"{name} has {len(getattr(self, name))} entries for {length} actions")
        for kl, actor, ref in zip(self.per_token_kl, self.actor_logprobs, self.ref_logprobs):
            if abs(kl - (actor - ref)) > KL_IDENTITY_TOLERANCE:
                raise ValueError("per_token_kl must equal actor_logprobs - ref_logprobs")
        return self

    @property
    def kl(self) -> float:
        """Sampled KL estimate of this trajectory: the sum of its per-token terms."""
        return float(sum(self.per_token_kl))


class SftConfig(BaseModel):
    """
    Supervised fine-tuning settings.

    Attributes:
        epochs: Passes over the demonstrations
        learning_rate: Peak AdamW learning rate
        batch_size: Demonstrations per optimizer step
        warmup_ratio: Share of all steps spent in linear warmup before cosine decay
        weight_decay: AdamW decoupled weight decay
        seed: Seed of the shuffling
    """

    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default=3, ge=1)
    learning_rate: float = Field(default=5e-2, gt=0.0)
    batch_size: int = Field(default=8, ge=1)
    warmup_ratio: float = Field(default=0.03, ge=0.0, lt=1.0)
    weight_decay: float = Field(default=0.0, ge=0.0)
    seed: int = 0


class SftTrace(BaseModel):
    """Mean cross-entropy per epoch and the number of optimizer steps."""

    epoch_losses: List[float] = Field(default_factory=list)
    steps: int = 0


class PpoConfig(BaseModel):
    """
    PPO settings.

    Attributes:
        beta: KL coefficient (initial value when kl_target is set)
        clip_ratio: Probability-ratio clip epsilon
        learning_rate: AdamW learning rate of the actor and its value head
        epochs: Passes over each rollout batch
        batch_size: Trajectories per minibatch
        gradient_accumulation: Minibatches per optimizer step
        gamma: Discount
        gae_lambda: GAE lambda
        value_coef: Weight of the value loss
        weight_decay: AdamW weight decay
        iterations: Rollout + update rounds of align
        rollout_batch: Trajectories sampled per iteration
        kl_target: KL setpoint; switches on the adaptive controller
        kl_horizon: Controller horizon, in trajectories
        whiten_eps: Advantages are zeroed when their std falls below this
        seed: Root seed of rollouts and minibatch shuffling
    """

    model_config = ConfigDict(frozen=True)

    beta: float = Field(default=0.2, ge=0.0)
    clip_ratio: float = Field(default=0.2, gt=0.0, lt=1.0)
    learning_rate: float = Field(default=5e-2, gt=0.0)
    epochs: int = Field(default=1, ge=1)
    batch_size: int = Field(default=16, ge=1)
    gradient_accumulation: int = Field(default=4, ge=1)
    gamma: float = Field(default=1.0, ge=0.0, le=1.0)
    gae_lambda: float = Field(default=0.95, ge=0.0, le=1.0)
    value_coef: float = Field(default=1.0, ge=0.0)
    weight_decay: float = Field(default=0.0, ge=0.0)
    iterations: int = Field(default=100, ge=1)
    rollout_batch: int = Field(default=64, ge=1)
    kl_target: Optional[float] = Field(default=None, gt=0.0)
    kl_horizon: int = Field(default=10000, ge=1)
    whiten_eps: float = Field(default=1e-8, gt=0.0)
    seed: int = 0

    @field_validator("beta")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("beta must be finite")
        return value


class PpoStats(BaseModel):
    """
    Outcome of one ppo_update.

    mean_reward and mean_kl describe the rollout batch the update learned
    from. aborted is set when a non-finite loss stopped the update; the
    parameters are then left as they were.
    """

    mean_reward: float
    mean_kl: float
    clip_fraction: float = 0.0
    policy_loss: float = 0.0
    value_loss: float = 0.0
    beta: float
    steps: int = 0
    trajectories: int = 0
    aborted: bool = False


class CurvePoint(BaseModel):
    """One alignment iteration."""

    iteration: int
    mean_reward: float
    mean_kl: float
    clip_fraction: float
    beta: float
    aborted: bool = False


class AlignmentCurve(BaseModel):
    """Mean reward and mean KL per alignment iteration."""

    points: List[CurvePoint] = Field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([point.model_dump() for point in self.points], columns=CURVE_COLUMNS)

    @property
    def final(self) -> Optional[CurvePoint]:
        return self.points[-1] if self.points else None
