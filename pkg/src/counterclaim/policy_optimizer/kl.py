"""
KL divergence between an actor and its reference policy.

The training loop uses the sampled estimator: the sum over a trajectory of
log pi_act(a_t) - log pi_ref(a_t) for the realized actions, whose expectation
under pi_act is the sequence-level KL(pi_act || pi_ref). For small policies
the exact value is computed by enumerating every sequence.
"""

import math
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .errors.policy_errors import PolicyError
from .models.policy_models import Trajectory
from .policy import BigramPolicy

# Largest number of action sequences enumerate_sequences will walk
MAX_ENUMERATION = 1_000_000


def _walk(
    tables: Sequence[np.ndarray],
    state: int,
    depth: int,
    prefix: List[int],
    totals: List[float],
    eos: int,
    max_length: int,
) -> Iterator[Tuple[Tuple[int, ...], List[float]]]:
    for action in range(tables[0].shape[1]):
        scores = [total + table[state, action] for total, table in zip(totals, tables)]
        sequence = prefix + [action]
        if action == eos or depth + 1 == max_length:
            yield tuple(sequence), scores
        else:
            yield from _walk(tables, action, depth + 1, sequence, scores, eos, max_length)


def enumerate_sequences(
    policies: Sequence[BigramPolicy], prompt: str
) -> Iterator[Tuple[Tuple[int, ...], List[float]]]:
    """
    Every complete action sequence with its log-probability under each policy.

    Raises:
        PolicyError: If the policies differ in vocabulary or max_length, or the
            sequence space exceeds MAX_ENUMERATION
    """
    first = policies[0]
    for other in policies[1:]:
        if not first.same_space(other):
            raise PolicyError("Policies do not share vocabulary, max_length and context buckets")
    if first.n_actions ** first.max_length > MAX_ENUMERATION:
        raise PolicyError(
            f"{first.n_actions}^{first.max_length} sequences are too many to enumerate"
        )
    tables = [policy.log_prob_table(policy.bucket(prompt)) for policy in policies]
    yield from _walk(tables, first.bos_state, 0, [], [0.0] * len(tables), first.eos_id, first.max_length)


def exact_sequence_kl(actor: BigramPolicy, reference: BigramPolicy, prompt: str) -> float:
    """KL(pi_act || pi_ref) over complete responses to one prompt, by enumeration."""
    total = 0.0
    for _, (actor_lp, ref_lp) in enumerate_sequences([actor, reference], prompt):
        total += math.exp(actor_lp) * (actor_lp - ref_lp)
    return total


def kl_estimate(trajectories: Sequence[Trajectory]) -> Tuple[float, float]:
    """
    Sampled KL: mean of per-trajectory KL sums and its standard error.

    Raises:
        PolicyError: On an empty batch
    """
    if not trajectories:
        raise PolicyError("No trajectories to estimate KL from")
    sums = np.array([trajectory.kl for trajectory in trajectories])
    if len(sums) == 1:
        return float(sums[0]), float("nan")
    return float(sums.mean()), float(sums.std(ddof=1) / np.sqrt(len(sums)))
