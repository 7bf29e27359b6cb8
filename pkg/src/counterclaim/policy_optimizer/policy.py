"""
Desk-scale generation policy.

The next-token distribution depends on the previous token (a bigram table)
plus a learned bias row selected by hashing the rendered prompt into one of
`context_buckets` buckets:

    logits(prev, prompt) = bigram[prev] + context[bucket(prompt)]

Actions are the vocabulary tokens plus end-of-sequence (id V). States are
the vocabulary tokens plus beginning-of-sequence (also id V, as a state).
Generation stops at end-of-sequence or after max_length tokens. A scalar
value head over the same (state, bucket) pair serves as the PPO baseline.
"""

import copy
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import torch
from sklearn.utils import murmurhash3_32
from torch import nn

from counterclaim.lexical_retriever import tokenize
from counterclaim.storage import read_artifact, write_artifact

from .errors.policy_errors import PolicyError

POLICY_KIND = "bigram-policy"
POLICY_VERSION = 1


def default_prompt(claim: str, evidence: Sequence[str]) -> str:
    """Plain prompt used when no template is supplied: evidence lines, then the claim."""
    return "\n".join([*evidence, claim])


def build_vocabulary(texts: Sequence[str]) -> List[str]:
    """Sorted distinct tokens of the given responses."""
    return sorted({token for text in texts for token in tokenize(text, remove_stopwords=False)})


class ValueHead(nn.Module):
    """value(state, bucket) = state_table[state] + context_table[bucket] + bias, zero at init."""

    def __init__(self, n_states: int, context_buckets: int):
        super().__init__()
        self.state = nn.Parameter(torch.zeros(n_states, dtype=torch.float64))
        self.context = nn.Parameter(torch.zeros(context_buckets, dtype=torch.float64))
        self.bias = nn.Parameter(torch.zeros((), dtype=torch.float64))

    def forward(self, states: torch.Tensor, buckets: torch.Tensor) -> torch.Tensor:
        return self.state[states] + self.context[buckets] + self.bias


class BigramPolicy(nn.Module):
    """
    Token-bigram softmax policy with prompt-bucket conditioning.

    Attributes:
        vocabulary: Tokens, indexed by action id
        max_length: Cap on generated tokens
        context_buckets: Number of prompt buckets
        bigram: (V+1) x (V+1) logits, rows are states and columns actions
        context: context_buckets x (V+1) logits added in every state
        value_head: Scalar baseline used by PPO
        frozen: True once the policy serves as a reference
    """

    def __init__(
        self,
        vocabulary: Sequence[str],
        max_length: int = 32,
        context_buckets: int = 16,
        init_scale: float = 0.0,
        seed: int = 0,
    ):
        super().__init__()
        tokens = list(vocabulary)
        if not tokens:
            raise PolicyError("Policy vocabulary is empty")
        if len(set(tokens)) != len(tokens):
            raise PolicyError("Policy vocabulary has duplicate tokens")
        for token in tokens:
            if tokenize(token, remove_stopwords=False) != [token]:
                raise PolicyError(f"{token!r} is not a single lowercase word token")
        if max_length < 1:
            raise PolicyError("max_length must be at least 1")
        if context_buckets < 1:
            raise PolicyError("context_buckets must be at least 1")

        self.vocabulary = tuple(tokens)
        self.token_ids = {token: i for i, token in enumerate(tokens)}
        self.max_length = max_length
        self.context_buckets = context_buckets
        self.frozen = False

        size = len(tokens) + 1
        generator = torch.Generator().manual_seed(seed)
        bigram = torch.randn(size, size, generator=generator, dtype=torch.float64) * init_scale
        context = torch.randn(context_buckets, size, generator=generator, dtype=torch.float64) * init_scale
        self.bigram = nn.Parameter(bigram)
        self.context = nn.Parameter(context)
        self.value_head = ValueHead(size, context_buckets)

    # ------------------ Vocabulary ------------------ #
    @property
    def eos_id(self) -> int:
        return len(self.vocabulary)

    @property
    def bos_state(self) -> int:
        return len(self.vocabulary)

    @property
    def n_actions(self) -> int:
        return len(self.vocabulary) + 1

    def bucket(self, prompt: str) -> int:
        return murmurhash3_32(prompt, seed=0, positive=True) % self.context_buckets

    def encode(self, text: str) -> List[int]:
        """
        Token ids of a response, without end-of-sequence.

        Raises:
            PolicyError: On a token outside the vocabulary
        """
        ids = []
        for token in tokenize(text, remove_stopwords=False):
            if token not in self.token_ids:
                raise PolicyError(f"Token {token!r} is not in the policy vocabulary")
            ids.append(self.token_ids[token])
        return ids

    def actions_for(self, text: str) -> List[int]:
        """
        The action sequence that generates `text`.

        Raises:
            PolicyError: On unknown tokens or more than max_length tokens
        """
        ids = self.encode(text)
        if len(ids) > self.max_length:
            raise PolicyError(f"Response has {len(ids)} tokens, max_length is {self.max_length}")
        return ids + [self.eos_id] if len(ids) < self.max_length else ids

    def states_for(self, actions: Sequence[int]) -> List[int]:
        return [self.bos_state, *actions[:-1]]

    def decode(self, actions: Sequence[int]) -> str:
        return " ".join(self.vocabulary[a] for a in actions if a != self.eos_id)

    # ------------------ Distributions ------------------ #
    def logits(self, states: torch.Tensor, buckets: torch.Tensor) -> torch.Tensor:
        return self.bigram[states] + self.context[buckets]

    def log_probs(self, states: torch.Tensor, buckets: torch.Tensor) -> torch.Tensor:
        """(n, V+1) next-action log-probabilities."""
        return torch.log_softmax(self.logits(states, buckets), dim=-1)

    def log_prob_table(self, bucket: int) -> np.ndarray:
        """Log-probabilities of every action in every state for one prompt bucket."""
        with torch.no_grad():
            states = torch.arange(self.n_actions)
            buckets = torch.full_like(states, bucket)
            return self.log_probs(states, buckets).numpy().copy()

    def value_table(self, bucket: int) -> np.ndarray:
        with torch.no_grad():
            states = torch.arange(self.n_actions)
            return self.value_head(states, torch.full_like(states, bucket)).numpy().copy()

    def check_finite(self) -> bool:
        return all(bool(torch.isfinite(p).all()) for p in self.parameters())

    # ------------------ Lifecycle ------------------ #
    def freeze(self) -> "BigramPolicy":
        """Stop gradients; the policy becomes a fixed reference."""
        self.requires_grad_(False)
        self.frozen = True
        self.eval()
        return self

    def trainable_copy(self) -> "BigramPolicy":
        clone = copy.deepcopy(self)
        clone.requires_grad_(True)
        clone.frozen = False
        return clone

    def reset_value_head(self) -> None:
        self.value_head = ValueHead(self.n_actions, self.context_buckets)

    def same_space(self, other: "BigramPolicy") -> bool:
        return (
            self.vocabulary == other.vocabulary
            and self.max_length == other.max_length
            and self.context_buckets == other.context_buckets
        )


# ------------------ Operations ------------------ #
def sequence_log_prob(policy: BigramPolicy, prompt: str, response: str) -> float:
    """log pi(response | prompt), end-of-sequence included."""
    actions = policy.actions_for(response)
    table = policy.log_prob_table(policy.bucket(prompt))
    states = policy.states_for(actions)
    return float(sum(table[s, a] for s, a in zip(states, actions)))


def generate(
    policy: BigramPolicy,
    prompt: str,
    greedy: bool = True,
    rng: Optional[np.random.Generator] = None,
    max_length: Optional[int] = None,
) -> str:
    """
    Decode a response for a rendered prompt.

    Greedy decoding takes the lowest-id action among the most probable ones;
    sampling draws from `rng` (seed 0 when omitted). At most
    min(max_length, policy.max_length) actions are taken, EOS included.
    """
    table = policy.log_prob_table(policy.bucket(prompt))
    rng = rng or np.random.default_rng(0)
    limit = policy.max_length if max_length is None else min(max_length, policy.max_length)
    state, actions = policy.bos_state, []
    for _ in range(limit):
        if greedy:
            action = int(np.argmax(table[state]))
        else:
            probs = np.exp(table[state])
            action = int(rng.choice(len(probs), p=probs / probs.sum()))
        actions.append(action)
        if action == policy.eos_id:
            break
        state = action
    return policy.decode(actions)


# ------------------ Persistence ------------------ #
def save_policy(policy: BigramPolicy, path: Union[str, Path]) -> Path:
    metadata = {
        "vocabulary": list(policy.vocabulary),
        "max_length": policy.max_length,
        "context_buckets": policy.context_buckets,
        "frozen": policy.frozen,
    }
    arrays = {name: tensor.detach().numpy() for name, tensor in policy.state_dict().items()}
    return write_artifact(path, POLICY_KIND, POLICY_VERSION, metadata, arrays)


def load_policy(path: Union[str, Path]) -> BigramPolicy:
    """
    Read a policy checkpoint; a policy saved frozen comes back frozen.

    Raises:
        ArtifactFormatError: On a missing or foreign file
    """
    metadata, arrays = read_artifact(path, POLICY_KIND, POLICY_VERSION)
    policy = BigramPolicy(
        metadata["vocabulary"],
        max_length=metadata["max_length"],
        context_buckets=metadata["context_buckets"],
    )
    policy.load_state_dict({name: torch.from_numpy(array) for name, array in arrays.items()})
    if metadata.get("frozen"):
        policy.freeze()
    return policy
