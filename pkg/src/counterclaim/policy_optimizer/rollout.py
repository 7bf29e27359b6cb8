# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from counterclaim.errors import CounterclaimError
from counterclaim.utils import derive_seed

from .errors.policy_errors import PolicyError
from .models.policy_models import PolicyPrompt, Trajectory
from .policy import BigramPolicy, default_prompt

RewardFn = Callable[[str, Sequence[str], str], float]
PromptRenderer = Callable[[str, Sequence[str]], str]


class _Tables:
    """Actor, reference and value tables per prompt bucket, computed once per rollout."""

    def __init__(self, actor: BigramPolicy, reference: BigramPolicy):
        self.actor = actor
        self.reference = reference
        self._tables: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def get(self, bucket: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if bucket not in self._tables:
            self._tables[bucket] = (
                self.actor.log_prob_table(bucket),
                self.reference.log_prob_table(bucket),
                self.actor.value_table(bucket),
            )
        return self._tables[bucket]


def _sample(policy: BigramPolicy, tables, rng: np.random.Generator):
    actor_table, ref_table, value_table = tables
    state = policy.bos_state
    actions, actor_lp, ref_lp, values = [], [], [], []
    for _ in range(policy.max_length):
        probs = np.exp(actor_table[state])
        action = int(rng.choice(len(probs), p=probs / probs.sum()))
        actions.append(action)
        actor_lp.append(float(actor_table[state, action]))
        ref_lp.append(float(ref_table[state, action]))
        values.append(float(value_table[state]))
        if action == policy.eos_id:
            break
        state = action
    return actions, actor_lp, ref_lp, values


def rollout(
    actor: BigramPolicy,
    reference: BigramPolicy,
    prompts: Sequence[PolicyPrompt],
    reward_fn: RewardFn,
    seed: int = 0,
    count: Optional[int] = None,
    prompt_renderer: PromptRenderer = default_prompt,
    workers: int = 1,
) -> List[Trajectory]:
    """
    Sample responses from the actor and score them.

    Trajectory i answers prompts[i % len(prompts)] and is sampled with its own
    seed derived from (seed, i), so results do not depend on `workers`.
    Trajectories whose reward cannot be computed, or is not finite, are
    dropped and counted in a warning.

    Args:
        actor: Policy being trained
        reference: Frozen reference policy
        prompts: Prompt contexts
        reward_fn: reward_fn(claim, evidence, response) -> float
        seed: Root seed
        count: Trajectories to sample (default: one per prompt)
        prompt_renderer: Turns (claim, evidence) into the prompt text
        workers: Threads sampling in parallel

    Returns:
        List[Trajectory]: The valid trajectories, in index order

    Raises:
        PolicyError: If the policies do not share a vocabulary and max_length, or prompts is empty
    """
    if not actor.same_space(reference):
        raise PolicyError("Actor and reference policies do not share vocabulary, max_length and context buckets")
    if not prompts:
        raise PolicyError("No prompts to roll out")
    count = len(prompts) if count is None else count
    rendered = [prompt_renderer(p.claim, p.evidence) for p in prompts]
    tables = _Tables(actor, reference)
    for text in rendered:
        tables.get(actor.bucket(text))

    def one(i: int) -> Optional[Trajectory]:
        prompt, text = prompts[i % len(prompts)], rendered[i % len(prompts)]
        trajectory_seed = derive_seed(seed, i)
        actions, actor_lp, ref_lp, values = _sample(
            actor, tables.get(actor.bucket(text)), np.random.default_rng(trajectory_seed)
        )
        response = actor.decode(actions)
        try:
            reward = float(reward_fn(prompt.claim, prompt.evidence, response))
        except (CounterclaimError, ValueError, ArithmeticError) as e:
            log.debug(f"Trajectory {i} has no reward: {e}")
            return None
        if not math.isfinite(reward):
            log.debug(f"Trajectory {i} has a non-finite reward")
            return None
        return Trajectory(
            claim=prompt.claim,
            evidence=list(prompt.evidence),
            prompt=text,
            actions=actions,
            response=response,
            actor_logprobs=actor_lp,
            ref_logprobs=ref_lp,
            per_token_kl=[a - r for a, r in zip(actor_lp, ref_lp)],
            values=values,
            terminal_reward=reward,
            seed=trajectory_seed,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(one, range(count)))
    else:
        results = [one(i) for i in range(count)]

    trajectories = [t for t in results if t is not None]
    invalid = count - len(trajectories)
    if invalid:
        log.warning(f"Excluded {invalid} of {count} trajectories whose reward could not be computed")
    return trajectories
