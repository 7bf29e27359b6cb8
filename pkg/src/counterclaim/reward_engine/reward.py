"""
Composite reward of a generated response.

    total = f_refutation + f_factuality + f_politeness
            + alpha * (rel(claim, response) + max_i rel(evidence_i, response))

rel reuses the dense retriever's scorer. By default it is mapped to [0, 1] as
(cosine + 1) / 2 so the relevance terms sit on the classifier scale;
RewardConfig.raw_relevance keeps the temperature-scaled relevance instead.
"""

from typing import Dict, Iterable, Mapping, Optional, Protocol, Sequence, Tuple

import numpy as np
import pandas as pd

from counterclaim.dense_retriever import cosine_many, relevance_many
from counterclaim.logger import configure_logging

from .errors.reward_errors import RewardError
from .models.reward_models import Aspect, ResponseQualityReport, RewardBreakdown, RewardConfig

log = configure_logging(__name__)

QUALITY_COLUMNS = {
    "refutation": "R.",
    "factuality": "F.",
    "politeness": "P.",
    "claim_relevance": "C.",
    "evidence_relevance": "E.",
    "total": "Total",
}


class AspectScorer(Protocol):
    """Anything scoring a (claim, evidence, response) triple into (0, 1)."""

    def score(self, claim: str, evidence: Sequence[str], response: str) -> float: ...


def relevance_terms(config: RewardConfig, claim: str, evidence: Sequence[str], response: str) -> Tuple[float, float]:
    """(claim relevance, best evidence relevance) of a response."""
    texts = [claim, *evidence]
    if config.raw_relevance:
        values = relevance_many(config.scorer, response, texts)
    else:
        values = (cosine_many(config.scorer, response, texts) + 1.0) / 2.0
    return float(values[0]), float(np.max(values[1:]))


def compute_reward(
    config: RewardConfig,
    classifiers: Mapping[Aspect, AspectScorer],
    claim: str,
    evidence: Sequence[str],
    response: str,
) -> RewardBreakdown:
    """
    Score a response on every reward term.

    Raises:
        RewardError: If evidence is empty or an aspect classifier is missing
    """
    if not evidence:
        raise RewardError("Evidence set is empty; the evidence relevance term is undefined")
    missing = [aspect.value for aspect in Aspect if aspect not in classifiers]
    if missing:
        raise RewardError(f"Missing classifiers for: {', '.join(missing)}")

    refutation = float(classifiers[Aspect.REFUTATION].score(claim, evidence, response))
    factuality = float(classifiers[Aspect.FACTUALITY].score(claim, evidence, response))
    politeness = float(classifiers[Aspect.POLITENESS].score(claim, evidence, response))
    claim_relevance, evidence_relevance = relevance_terms(config, claim, evidence, response)
    total = refutation + factuality + politeness + config.alpha * (claim_relevance + evidence_relevance)
    return RewardBreakdown(
        refutation=refutation,
        factuality=factuality,
        politeness=politeness,
        claim_relevance=claim_relevance,
        evidence_relevance=evidence_relevance,
        alpha=config.alpha,
        total=total,
    )


class RewardModel:
    """A RewardConfig bound to its classifiers; calling it returns the total reward."""

    def __init__(self, config: RewardConfig, classifiers: Mapping[Aspect, AspectScorer]):
        self.config = config
        self.classifiers = dict(classifiers)

    def breakdown(self, claim: str, evidence: Sequence[str], response: str) -> RewardBreakdown:
        return compute_reward(self.config, self.classifiers, claim, evidence, response)

    def __call__(self, claim: str, evidence: Sequence[str], response: str) -> float:
        return self.breakdown(claim, evidence, response).total


def evaluate_responses(
    config: RewardConfig,
    classifiers: Mapping[Aspect, AspectScorer],
    items: Iterable[Tuple[str, Sequence[str], str]],
    label: Optional[str] = None,
) -> ResponseQualityReport:
    """
    Mean of every reward component over (claim, evidence, response) triples.

    Raises:
        RewardError: On an empty set, or any triple compute_reward rejects
    """
    breakdowns = [compute_reward(config, classifiers, claim, evidence, response) for claim, evidence, response in items]
    if not breakdowns:
        raise RewardError("No responses to evaluate")
    frame = pd.DataFrame([b.model_dump() for b in breakdowns])
    means = frame.mean()
    log.fine(f"Evaluated {len(breakdowns)} responses: mean reward {means['total']:.3f}")
    return ResponseQualityReport(
        refutation=float(means["refutation"]),
        factuality=float(means["factuality"]),
        politeness=float(means["politeness"]),
        claim_relevance=float(means["claim_relevance"]),
        evidence_relevance=float(means["evidence_relevance"]),
        total=float(means["total"]),
        count=len(breakdowns),
        label=label,
    )


def format_quality_table(reports: Dict[str, ResponseQualityReport]) -> str:
    """Generators as rows, R. / F. / P. / C. / E. / Total as columns."""
    frame = pd.DataFrame({name: report.model_dump() for name, report in reports.items()}).T
    frame = frame[list(QUALITY_COLUMNS)].astype(float).rename(columns=QUALITY_COLUMNS)
    return frame.to_string(float_format=lambda value: f"{value:.3f}")
