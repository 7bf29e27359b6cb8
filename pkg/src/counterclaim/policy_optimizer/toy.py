"""
Template environment for desk-scale alignment runs.

Every response is one of N single-token templates ("reply00" ... ); template i
earns reward i / (N - 1), anything else earns 0. The reference policy is
fine-tuned on demonstrations that use every template once per prompt and
repeat one mediocre "favored" template, so it has a clear greedy answer that
alignment should move away from. With max_length 1 the whole sequence space
is enumerable, which gives exact expected rewards and KL values.
"""

import json
import math
from pathlib import Path
from typing import List, Optional, Sequence, Union

from pydantic import BaseModel, Field, model_validator

from .kl import enumerate_sequences, exact_sequence_kl
from .models.policy_models import Demonstration, PolicyPrompt, PpoConfig, SftConfig
from .policy import BigramPolicy, default_prompt
from .rollout import PromptRenderer
from .sft import supervised_finetune

TOY_CLAIMS = [
    "masks cause oxygen deprivation",
    "vaccines alter dna",
    "garlic cures the virus",
    "5g towers spread disease",
]
TOY_EVIDENCE = [
    "oxygen saturation was unchanged in mask wearers",
    "mrna does not enter the cell nucleus",
    "no clinical study supports this treatment",
    "radio waves do not carry viruses",
]


class ToyEnvironment(BaseModel):
    """
    Candidate templates with known rewards, and the prompts they answer.

    Attributes:
        templates: Candidate responses, one token each
        rewards: Reward of each template
        prompts: Prompt contexts
        favored: Template the demonstrations over-represent
        favored_repeats: Extra demonstrations of the favored template per prompt
    """

    templates: List[str]
    rewards: List[float]
    prompts: List[PolicyPrompt] = Field(min_length=1)
    favored: int = 10
    favored_repeats: int = Field(default=20, ge=0)

    @model_validator(mode="after")
    def _consistent(self) -> "ToyEnvironment":
        if len(self.templates) != len(self.rewards):
            raise ValueError("templates and rewards differ in length")
        if not 0 <= self.favored < len(self.templates):
            raise ValueError("favored must index a template")
        return self

    @property
    def optimum(self) -> float:
        return max(self.rewards)

    def reward(self, claim: str, evidence: Sequence[str], response: str) -> float:
        lookup = dict(zip(self.templates, self.rewards))
        return lookup.get(response.strip(), 0.0)

    def demonstrations(self) -> List[Demonstration]:
        demos = []
        for prompt in self.prompts:
            responses = self.templates + [self.templates[self.favored]] * self.favored_repeats
            demos += [Demonstration(claim=prompt.claim, evidence=prompt.evidence, response=r) for r in responses]
        return demos

    def make_policy(self, context_buckets: int = 8) -> BigramPolicy:
        return BigramPolicy(self.templates, max_length=1, context_buckets=context_buckets)

    def expected_reward(self, policy: BigramPolicy, prompt_renderer: PromptRenderer = default_prompt) -> float:
        """Exact expected reward of the policy, averaged over the prompts."""
        total = 0.0
        for prompt in self.prompts:
            for actions, (logprob,) in enumerate_sequences([policy], prompt_renderer(prompt.claim, prompt.evidence)):
                total += math.exp(logprob) * self.reward(prompt.claim, prompt.evidence, policy.decode(actions))
        return total / len(self.prompts)

    def mean_kl(
        self, actor: BigramPolicy, reference: BigramPolicy, prompt_renderer: PromptRenderer = default_prompt
    ) -> float:
        """Exact KL(actor || reference), averaged over the prompts."""
        values = [exact_sequence_kl(actor, reference, prompt_renderer(p.claim, p.evidence)) for p in self.prompts]
        return sum(values) / len(values)


def toy_environment(
    templates: int = 50, prompts: int = 4, favored: int = 10, favored_repeats: int = 20
) -> ToyEnvironment:
    """The default environment: `templates` replies with rewards evenly spaced on [0, 1]."""
    names = [f"reply{i:02d}" for i in range(templates)]
    rewards = [i / (templates - 1) for i in range(templates)]
    contexts = [
        PolicyPrompt(claim=TOY_CLAIMS[i % len(TOY_CLAIMS)], evidence=[TOY_EVIDENCE[i % len(TOY_EVIDENCE)]])
        for i in range(prompts)
    ]
    return ToyEnvironment(templates=names, rewards=rewards, prompts=contexts, favored=favored, favored_repeats=favored_repeats)


def toy_sft_config(seed: int = 0) -> SftConfig:
    return SftConfig(epochs=3, learning_rate=0.1, batch_size=8, seed=seed)


def toy_ppo_config(beta: float = 0.2, seed: int = 0, iterations: int = 150) -> PpoConfig:
    """PPO settings sized for the toy: 64 rollouts and eight minibatch steps per iteration."""
    return PpoConfig(
        beta=beta,
        learning_rate=5e-2,
        epochs=2,
        batch_size=16,
        gradient_accumulation=1,
        iterations=iterations,
        rollout_batch=64,
        seed=seed,
    )


def toy_reference(environment: ToyEnvironment, config: Optional[SftConfig] = None) -> BigramPolicy:
    """Fine-tune and freeze the reference policy of the environment."""
    reference, _ = supervised_finetune(environment.make_policy(), environment.demonstrations(), config or toy_sft_config())
    return reference


def save_toy(environment: ToyEnvironment, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(environment.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_toy(path: Union[str, Path]) -> ToyEnvironment:
    return ToyEnvironment.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
