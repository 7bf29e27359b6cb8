# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import copy
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import torch

from counterclaim.utils import derive_seed

from .controller import make_kl_controller
from .errors.policy_errors import PolicyError
from .models.policy_models import AlignmentCurve, CurvePoint, PolicyPrompt, PpoConfig, PpoStats, Trajectory
from .policy import BigramPolicy, default_prompt
from .rollout import PromptRenderer, RewardFn, rollout


def generalized_advantages(
    rewards: np.ndarray, values: np.ndarray, gamma: float, lam: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    GAE over one trajectory; the value after the last action is 0.

    Returns:
        Tuple of (advantages, returns = advantages + values)
    """
    advantages = np.zeros(len(rewards))
    running = 0.0
    for t in reversed(range(len(rewards))):
        next_value = values[t + 1] if t + 1 < len(rewards) else 0.0
        delta = rewards[t] + gamma * next_value - values[t]
        running = delta + gamma * lam * running
        advantages[t] = running
    return advantages, advantages + values


def whiten(values: np.ndarray, eps: float) -> np.ndarray:
    """Zero mean, unit std; all zeros when the std is below eps."""
    std = values.std()
    if std < eps:
        return np.zeros_like(values)
    return (values - values.mean()) / std


def shaped_rewards(trajectory: Trajectory, beta: float) -> np.ndarray:
    """-beta * per-token KL at every action, plus the terminal reward on the last one."""
    rewards = -beta * np.asarray(trajectory.per_token_kl, dtype=np.float64)
    rewards[-1] += trajectory.terminal_reward
    return rewards


@dataclass
class PpoBatch:
    """Token-level tensors of a rollout batch; offsets[i]:offsets[i+1] are trajectory i's tokens."""

    states: torch.Tensor
    actions: torch.Tensor
    buckets: torch.Tensor
    old_logprobs: torch.Tensor
    advantages: torch.Tensor
    returns: torch.Tensor
    offsets: np.ndarray

    def tokens_of(self, trajectory_ids: Sequence[int]) -> torch.Tensor:
        return torch.from_numpy(
            np.concatenate([np.arange(self.offsets[i], self.offsets[i + 1]) for i in trajectory_ids])
        )

    @property
    def all_tokens(self) -> torch.Tensor:
        return torch.arange(len(self.actions))


def prepare_batch(
    policy: BigramPolicy,
    trajectories: Sequence[Trajectory],
    beta: float,
    gamma: float = 1.0,
    lam: float = 0.95,
    whiten_eps: float = 1e-8,
) -> PpoBatch:
    """Shape rewards, run GAE against the recorded values and whiten advantages over the batch."""
    states, actions, buckets, old, advantages, returns = [], [], [], [], [], []
    offsets = [0]
    for trajectory in trajectories:
        adv, ret = generalized_advantages(
            shaped_rewards(trajectory, beta), np.asarray(trajectory.values, dtype=np.float64), gamma, lam
        )
        states += policy.states_for(trajectory.actions)
        actions += trajectory.actions
        buckets += [policy.bucket(trajectory.prompt)] * len(trajectory.actions)
        old += trajectory.actor_logprobs
        advantages.append(adv)
        returns.append(ret)
        offsets.append(offsets[-1] + len(trajectory.actions))
    return PpoBatch(
        states=torch.tensor(states),
        actions=torch.tensor(actions),
        buckets=torch.tensor(buckets),
        old_logprobs=torch.tensor(old, dtype=torch.float64),
        advantages=torch.from_numpy(whiten(np.concatenate(advantages), whiten_eps)),
        returns=torch.from_numpy(np.concatenate(returns)),
        offsets=np.asarray(offsets),
    )


@dataclass
class PpoLoss:
    loss: torch.Tensor
    policy_loss: torch.Tensor
    value_loss: torch.Tensor
    clipped: int
    tokens: int


def ppo_loss(
    policy: BigramPolicy, batch: PpoBatch, tokens: torch.Tensor, clip_ratio: float, value_coef: float
) -> PpoLoss:
    """
    Clipped-surrogate policy loss plus value loss over the selected tokens.

        policy_loss = -mean(min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A))
        value_loss  = 0.5 * mean((V - returns) ** 2)
    """
    states, buckets, actions = batch.states[tokens], batch.buckets[tokens], batch.actions[tokens]
    logprobs = policy.log_probs(states, buckets).gather(1, actions.unsqueeze(1)).squeeze(1)
    ratio = torch.exp(logprobs - batch.old_logprobs[tokens])
    advantages = batch.advantages[tokens]
    surrogate = torch.min(ratio * advantages, ratio.clamp(1.0 - clip_ratio, 1.0 + clip_ratio) * advantages)
    policy_loss = -surrogate.mean()
    values = policy.value_head(states, buckets)
    value_loss = 0.5 * ((values - batch.returns[tokens]) ** 2).mean()
    clipped = int(((ratio - 1.0).abs() > clip_ratio).sum())
    return PpoLoss(policy_loss + value_coef * value_loss, policy_loss, value_loss, clipped, len(tokens))


def make_optimizer(policy: BigramPolicy, config: PpoConfig) -> torch.optim.Optimizer:
    return torch.optim.AdamW(policy.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay)


def ppo_update(
    policy: BigramPolicy,
    trajectories: Sequence[Trajectory],
    config: Optional[PpoConfig] = None,
    optimizer: Optional[torch.optim.Optimizer] = None,
    beta: Optional[float] = None,
    seed: Optional[int] = None,
) -> Tuple[BigramPolicy, PpoStats]:
    """
    One PPO update of the actor and its value head on a rollout batch.

    Every epoch shuffles the trajectories into minibatches of
    config.batch_size; the optimizer steps once every
    config.gradient_accumulation minibatches and at the end of the epoch.
    A non-finite loss or parameter aborts the update: parameters and
    optimizer state are restored and the stats are flagged.

    Args:
        policy: Actor, updated in place
        trajectories: Valid trajectories sampled from the actor
        config: PPO settings
        optimizer: Optimizer to reuse across updates (a fresh AdamW when omitted)
        beta: KL coefficient overriding config.beta
        seed: Seed of the minibatch shuffling (config.seed when omitted)

    Returns:
        Tuple of (the policy, update stats)

    Raises:
        PolicyError: On an empty batch or a frozen policy
    """
    config = config or PpoConfig()
    beta = config.beta if beta is None else beta
    if not trajectories:
        raise PolicyError("No trajectories to learn from")
    if policy.frozen:
        raise PolicyError("Cannot update a frozen policy")

    stats = PpoStats(
        mean_reward=float(np.mean([t.terminal_reward for t in trajectories])),
        mean_kl=float(np.mean([t.kl for t in trajectories])),
        beta=beta,
        trajectories=len(trajectories),
    )
    optimizer = optimizer or make_optimizer(policy, config)
    snapshot = copy.deepcopy(policy.state_dict())
    optimizer_snapshot = copy.deepcopy(optimizer.state_dict())
    batch = prepare_batch(policy, trajectories, beta, config.gamma, config.gae_lambda, config.whiten_eps)
    rng = np.random.default_rng(config.seed if seed is None else seed)

    clipped = tokens = 0
    policy_losses: List[float] = []
    value_losses: List[float] = []
    policy.train()
    for _ in range(config.epochs):
        order = rng.permutation(len(trajectories))
        optimizer.zero_grad()
        pending = 0
        for start in range(0, len(order), config.batch_size):
            terms = ppo_loss(
                policy, batch, batch.tokens_of(order[start:start + config.batch_size]), config.clip_ratio, config.value_coef
            )
            if not torch.isfinite(terms.loss):
                stats.aborted = True
                break
            (terms.loss / config.gradient_accumulation).backward()
            clipped += terms.clipped
            tokens += terms.tokens
            policy_losses.append(float(terms.policy_loss))
            value_losses.append(float(terms.value_loss))
            pending += 1
            if pending == config.gradient_accumulation:
                optimizer.step()
                optimizer.zero_grad()
                stats.steps += 1
                pending = 0
        if stats.aborted:
            break
        if pending:
            optimizer.step()
            optimizer.zero_grad()
            stats.steps += 1
        if not policy.check_finite():
            stats.aborted = True
            break

    if stats.aborted:
        policy.load_state_dict(snapshot)
        optimizer.load_state_dict(optimizer_snapshot)
        optimizer.zero_grad()
        log.warning("PPO update aborted on a non-finite loss; parameters restored")
        return policy, stats

    stats.clip_fraction = clipped / tokens if tokens else 0.0
    stats.policy_loss = float(np.mean(policy_losses))
    stats.value_loss = float(np.mean(value_losses))
    return policy, stats


def align(
    reference: BigramPolicy,
    prompts: Sequence[PolicyPrompt],
    reward_fn: RewardFn,
    config: Optional[PpoConfig] = None,
    prompt_renderer: PromptRenderer = default_prompt,
    workers: int = 1,
) -> Tuple[BigramPolicy, AlignmentCurve]:
    """
    Align a copy of the reference policy to the reward with KL-regularized PPO.

    The actor starts from the reference weights with a fresh value head. Each
    iteration samples config.rollout_batch trajectories, then runs
    ppo_update; the curve records the batch's mean reward and mean KL.

    Args:
        reference: Frozen reference policy from supervised_finetune
        prompts: Prompt contexts, cycled across the rollout batch
        reward_fn: reward_fn(claim, evidence, response) -> float
        config: PPO settings
        prompt_renderer: Turns (claim, evidence) into the prompt text
        workers: Threads used for rollouts

    Returns:
        Tuple of (the aligned actor, training curve)

    Raises:
        PolicyError: If the reference is not frozen or prompts is empty
    """
    config = config or PpoConfig()
    if not reference.frozen:
        raise PolicyError("Reference policy must be frozen; run supervised_finetune first")
    actor = reference.trainable_copy()
    actor.reset_value_head()
    optimizer = make_optimizer(actor, config)
    controller = make_kl_controller(config)
    curve = AlignmentCurve()

    log.step(f"Aligning policy for {config.iterations} iterations (beta {config.beta}, {config.rollout_batch} rollouts each)")
    for iteration in range(config.iterations):
        trajectories = rollout(
            actor,
            reference,
            prompts,
            reward_fn,
            seed=derive_seed(config.seed, iteration),
            count=config.rollout_batch,
            prompt_renderer=prompt_renderer,
            workers=workers,
        )
        if not trajectories:
            log.warning(f"Iteration {iteration + 1}: no valid trajectories, skipping update")
            curve.points.append(
                CurvePoint(
                    iteration=iteration, mean_reward=float("nan"), mean_kl=float("nan"),
                    clip_fraction=0.0, beta=controller.beta, aborted=True,
                )
            )
            continue
        actor, stats = ppo_update(
            actor, trajectories, config, optimizer=optimizer, beta=controller.beta, seed=derive_seed(config.seed, iteration, 1)
        )
        curve.points.append(
            CurvePoint(
                iteration=iteration,
                mean_reward=stats.mean_reward,
                mean_kl=stats.mean_kl,
                clip_fraction=stats.clip_fraction,
                beta=stats.beta,
                aborted=stats.aborted,
            )
        )
        controller.update(stats.mean_kl, len(trajectories))
        log.fine(
            f"Iteration {iteration + 1}/{config.iterations}: reward {stats.mean_reward:.3f}, "
            f"KL {stats.mean_kl:.3f}, clipped {stats.clip_fraction:.2%}"
        )

    actor.eval()
    final = curve.final
    log.success(f"Alignment finished: reward {final.mean_reward:.3f}, KL {final.mean_kl:.3f}")
    return actor, curve


def save_curve(curve: AlignmentCurve, path: Union[str, Path]) -> Path:
    """Write the curve as CSV (iteration, mean_reward, mean_kl, clip_fraction, beta, aborted)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    curve.to_frame().to_csv(path, index=False)
    return path
