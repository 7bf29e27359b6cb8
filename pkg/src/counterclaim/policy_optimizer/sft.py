# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch
import torch.nn.functional as F

from counterclaim.utils import warmup_cosine_schedule

from .errors.policy_errors import PolicyError, SupervisedTrainingError
from .models.policy_models import Demonstration, SftConfig, SftTrace
from .policy import BigramPolicy, default_prompt
from .rollout import PromptRenderer


def _encode(
    policy: BigramPolicy, demonstrations: Sequence[Demonstration], prompt_renderer: PromptRenderer
) -> List[Tuple[torch.Tensor, torch.Tensor, torch.Tensor]]:
    encoded, rejected = [], []
    for position, demo in enumerate(demonstrations):
        try:
            actions = policy.actions_for(demo.response)
        except PolicyError:
            rejected.append(position)
            continue
        bucket = policy.bucket(prompt_renderer(demo.claim, demo.evidence))
        encoded.append(
            (
                torch.tensor(policy.states_for(actions)),
                torch.tensor(actions),
                torch.full((len(actions),), bucket),
            )
        )
    if rejected:
        raise SupervisedTrainingError(
            f"{len(rejected)} demonstrations fall outside the vocabulary or max_length "
            f"(positions {rejected[:5]})"
        )
    return encoded


def supervised_finetune(
    policy: BigramPolicy,
    demonstrations: Sequence[Demonstration],
    config: Optional[SftConfig] = None,
    prompt_renderer: PromptRenderer = default_prompt,
) -> Tuple[BigramPolicy, SftTrace]:
    """
    Train the policy by cross-entropy on demonstration tokens, then freeze it.

    Each demonstration contributes the actions that generate its response,
    end-of-sequence included, conditioned on its rendered prompt. The loss of
    a step is the mean over the tokens of its demonstrations. AdamW runs under
    linear warmup then cosine decay. The returned policy is frozen and serves
    as the reference for alignment.

    Args:
        policy: Policy to train in place
        demonstrations: (claim, evidence, response) triples
        config: SFT settings
        prompt_renderer: Turns (claim, evidence) into the prompt text

    Returns:
        Tuple of (the frozen policy, per-epoch mean losses)

    Raises:
        SupervisedTrainingError: On an empty set or responses the policy cannot generate
    """
    config = config or SftConfig()
    if not demonstrations:
        raise SupervisedTrainingError("No demonstrations to fine-tune on")
    if policy.frozen:
        raise SupervisedTrainingError("Policy is frozen; fine-tune a trainable copy")
    encoded = _encode(policy, demonstrations, prompt_renderer)

    torch.manual_seed(config.seed)
    steps_per_epoch = math.ceil(len(encoded) / config.batch_size)
    total_steps = steps_per_epoch * config.epochs
    warmup_steps = math.ceil(config.warmup_ratio * total_steps)
    optimizer = torch.optim.AdamW(
        [policy.bigram, policy.context], lr=config.learning_rate, weight_decay=config.weight_decay
    )
    scheduler = warmup_cosine_schedule(optimizer, warmup_steps, total_steps)

    log.step(f"Fine-tuning policy on {len(encoded)} demonstrations for {config.epochs} epochs ({total_steps} steps)")
    trace = SftTrace()
    policy.train()
    for epoch in range(config.epochs):
        order = np.random.default_rng([config.seed, epoch]).permutation(len(encoded))
        losses: List[float] = []
        for start in range(0, len(order), config.batch_size):
            members = [encoded[i] for i in order[start:start + config.batch_size]]
            states = torch.cat([m[0] for m in members])
            actions = torch.cat([m[1] for m in members])
            buckets = torch.cat([m[2] for m in members])

            optimizer.zero_grad()
            loss = F.cross_entropy(policy.logits(states, buckets), actions)
            if not torch.isfinite(loss):
                raise SupervisedTrainingError(f"Non-finite loss in epoch {epoch + 1}")
            loss.backward()
            optimizer.step()
            scheduler.step()
            trace.steps += 1
            losses.append(float(loss))

        trace.epoch_losses.append(float(np.mean(losses)))
        log.fine(f"SFT epoch {epoch + 1}/{config.epochs}: cross-entropy {trace.epoch_losses[-1]:.4f}")

    log.success(f"Reference policy ready: cross-entropy {trace.epoch_losses[0]:.4f} -> {trace.epoch_losses[-1]:.4f}")
    return policy.freeze(), trace
