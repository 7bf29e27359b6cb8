"""
Synthetic human-feedback sets for desk-scale classifier runs.
"""

from typing import List

import numpy as np

from .models.reward_models import Aspect, FeedbackExample

CLAIMS = [
    "vitamin d prevents infection",
    "masks cause oxygen deprivation",
    "vaccines alter dna",
    "garlic cures the virus",
    "5g towers spread disease",
    "hydroxychloroquine is a proven cure",
    "children cannot catch the virus",
    "hand dryers kill the virus",
    "hot baths prevent illness",
    "the virus was engineered",
]
EVIDENCE = [
    "randomized trial found no effect on infection rates",
    "oxygen saturation was unchanged in mask wearers",
    "mrna does not enter the cell nucleus",
    "no clinical study supports this treatment",
    "transmission occurs through respiratory droplets",
]
REFUTING = ["false", "incorrect", "debunked", "misleading", "unsupported", "wrong"]
AGREEING = ["true", "correct", "confirmed", "accurate", "supported", "right"]
NOISE = [f"word{i}" for i in range(20)]


def _context(rng: np.random.Generator):
    return CLAIMS[int(rng.integers(len(CLAIMS)))], [EVIDENCE[int(rng.integers(len(EVIDENCE)))]]


def separable_feedback(n: int = 400, aspect: Aspect = Aspect.REFUTATION, seed: int = 0) -> List[FeedbackExample]:
    """
    Balanced set where the label is decided by the response vocabulary.

    Positive responses carry two refuting words, negative ones two agreeing
    words; both add three noise words.
    """
    rng = np.random.default_rng(seed)
    examples = []
    for i in range(n):
        label = i % 2
        claim, evidence = _context(rng)
        signal = REFUTING if label else AGREEING
        words = list(rng.choice(signal, size=2, replace=False)) + list(rng.choice(NOISE, size=3))
        rng.shuffle(words)
        examples.append(FeedbackExample(claim=claim, evidence=evidence, response=" ".join(words), label=label, aspect=aspect))
    return examples


def imbalanced_feedback(
    n: int = 2000,
    positive_rate: float = 0.1,
    aspect: Aspect = Aspect.REFUTATION,
    seed: int = 0,
) -> List[FeedbackExample]:
    """
    Imbalanced, noisy set: one weak cue separates the classes.

    The cue word "debunked" appears in 70% of positive and 15% of negative
    responses. Under the raw class prior the cue never makes a positive more
    likely than not, so an unweighted classifier predicts the majority class;
    a class-balanced one learns to trust the cue.
    """
    rng = np.random.default_rng(seed)
    examples = []
    for _ in range(n):
        label = int(rng.random() < positive_rate)
        claim, evidence = _context(rng)
        words = list(rng.choice(NOISE, size=4))
        if rng.random() < (0.7 if label else 0.15):
            words[int(rng.integers(4))] = "debunked"
        examples.append(FeedbackExample(claim=claim, evidence=evidence, response=" ".join(words), label=label, aspect=aspect))
    return examples
