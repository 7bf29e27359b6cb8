"""
Margin ranking + contrastive objective for the dense scorer.

For a claim x with gold evidence e, positives e^p_1..k and negatives e^n_1..k,
and f = relevance:

    loss = max(0, max_i f(x, e^p_i) - f(x, e) + tau)
           - lam * exp(f(x, e)) / (exp(f(x, e)) + sum_i exp(f(x, e^n_i)))

The second term is the gold pair's softmax share among {gold, negatives};
ContrastiveForm.LOG_PROBABILITY uses its logarithm instead. At ties the
lowest-index maximizing positive carries the gradient, and the hinge
contributes nothing (value and gradient) whenever its argument is <= 0.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import torch

from counterclaim.corpus_store import evidence_text

from .errors.dense_errors import RetrieverTrainingError
from .models.dense_models import ContrastiveForm, RetrieverTrainBatch
from .scorer import DenseScorer


@dataclass
class LossTerms:
    """Loss tensor plus the detached pieces it was built from."""

    loss: torch.Tensor
    hinge: float
    contrastive: float
    gold_relevance: float
    best_positive: int


@dataclass
class LossResult:
    """Scalar loss and its gradient with respect to every scorer parameter."""

    loss: float
    gradients: Dict[str, np.ndarray]
    hinge: float
    contrastive: float


def batch_texts(batch: RetrieverTrainBatch) -> List[str]:
    """[claim, gold, positives..., negatives...] as scored texts."""
    return (
        [batch.claim, evidence_text(batch.gold)]
        + [evidence_text(doc) for doc in batch.positives]
        + [evidence_text(doc) for doc in batch.negatives]
    )


def loss_from_features(
    scorer: DenseScorer,
    features: torch.Tensor,
    k: int,
    tau: float,
    lam: float,
    form: ContrastiveForm = ContrastiveForm.PROBABILITY,
    batch_id: Optional[str] = None,
) -> LossTerms:
    """
    Build the loss from a (2 + 2k, dim) feature matrix laid out as in batch_texts.

    Raises:
        RetrieverTrainingError: If any relevance or the loss is not finite
    """
    vectors = scorer.embed_features(features)
    claim, rest = vectors[0], vectors[1:]
    scores = (rest @ claim) / scorer.temperature
    return loss_from_scores(scores, k, tau, lam, form, batch_id)


def loss_from_scores(
    scores: torch.Tensor,
    k: int,
    tau: float,
    lam: float,
    form: ContrastiveForm = ContrastiveForm.PROBABILITY,
    batch_id: Optional[str] = None,
) -> LossTerms:
    """
    The objective over relevance scores [gold, positives..., negatives...].

    Raises:
        RetrieverTrainingError: If a score or the loss is not finite
    """
    if not bool(torch.isfinite(scores).all()):
        raise RetrieverTrainingError("Non-finite relevance score", batch_id=batch_id)

    gold = scores[0]
    positives = scores[1:1 + k]
    negatives = scores[1 + k:1 + 2 * k]

    best = int(torch.argmax(positives))
    violation = positives[best] - gold + tau
    if float(violation) > 0.0:
        hinge = violation
    else:
        hinge = torch.zeros((), dtype=scores.dtype)

    logits = torch.cat([gold.reshape(1), negatives])
    if form == ContrastiveForm.LOG_PROBABILITY:
        share = torch.log_softmax(logits, dim=0)[0]
    else:
        share = torch.softmax(logits, dim=0)[0]

    loss = hinge - lam * share
    if not bool(torch.isfinite(loss)):
        raise RetrieverTrainingError("Non-finite loss", batch_id=batch_id)
    return LossTerms(
        loss=loss,
        hinge=float(hinge),
        contrastive=float(share),
        gold_relevance=float(gold),
        best_positive=best,
    )


def ranking_contrastive_loss(
    scorer: DenseScorer,
    batch: RetrieverTrainBatch,
    tau: float,
    lam: float,
    form: ContrastiveForm = ContrastiveForm.PROBABILITY,
) -> LossResult:
    """
    Loss of one training batch and its exact gradient over the scorer parameters.

    Args:
        scorer: Scorer being trained
        batch: Claim, gold, k positives, k negatives
        tau: Margin
        lam: Contrastive scale
        form: Probability (default) or log-probability contrastive term

    Returns:
        LossResult: loss value, gradients keyed by parameter name, and the two terms

    Raises:
        RetrieverTrainingError: On a non-finite intermediate, tagged with batch.batch_id
    """
    features = scorer.features(batch_texts(batch))
    terms = loss_from_features(scorer, features, len(batch.positives), tau, lam, form, batch.batch_id)
    names = [name for name, _ in scorer.named_parameters()]
    grads = torch.autograd.grad(terms.loss, [p for _, p in scorer.named_parameters()], allow_unused=True)
    gradients = {
        name: (np.zeros(tuple(param.shape)) if grad is None else grad.detach().numpy().copy())
        for name, param, grad in zip(names, scorer.parameters(), grads)
    }
    return LossResult(loss=float(terms.loss), gradients=gradients, hinge=terms.hinge, contrastive=terms.contrastive)
