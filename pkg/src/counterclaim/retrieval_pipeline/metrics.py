"""
Binary-relevance ranking metrics.

Ranks are 1-based; None means the gold document was not ranked at all.
"""

import math
import re
from typing import Iterable, Optional, Tuple

from .errors.pipeline_errors import MetricArgumentError

_METRIC = re.compile(r"^([nr])@(\d+)$")


def _check(rank: Optional[int], k: int) -> None:
    if k < 1:
        raise MetricArgumentError(f"k must be at least 1, got {k}")
    if rank is not None and rank < 1:
        raise MetricArgumentError(f"rank must be at least 1, got {rank}")


def ndcg_at_k(rank_of_gold: Optional[int], k: int) -> float:
    """Single-gold NDCG@k: 1 / log2(rank + 1) if rank <= k, else 0."""
    _check(rank_of_gold, k)
    if rank_of_gold is None or rank_of_gold > k:
        return 0.0
    return 1.0 / math.log2(rank_of_gold + 1)


def recall_at_k(rank_of_gold: Optional[int], k: int) -> float:
    """1.0 if the gold is ranked within the top k, else 0.0."""
    _check(rank_of_gold, k)
    return 1.0 if rank_of_gold is not None and rank_of_gold <= k else 0.0


def ndcg_multi_at_k(gold_ranks: Iterable[Optional[int]], k: int) -> float:
    """
    NDCG@k with several gold documents: DCG over ranked golds / ideal DCG.

    With one gold this equals ndcg_at_k.
    """
    ranks = list(gold_ranks)
    for rank in ranks:
        _check(rank, k)
    if not ranks:
        return 0.0
    dcg = sum(1.0 / math.log2(rank + 1) for rank in ranks if rank is not None and rank <= k)
    ideal = sum(1.0 / math.log2(i + 1) for i in range(1, min(len(ranks), k) + 1))
    return dcg / ideal


def parse_metric(name: str) -> Tuple[str, int]:
    """Split "n@5" into ("n", 5)."""
    match = _METRIC.match(name)
    if not match:
        raise MetricArgumentError(f"Unknown metric {name!r}; use n@k or r@k")
    return match.group(1), int(match.group(2))


def metric_value(name: str, rank: Optional[int]) -> float:
    kind, k = parse_metric(name)
    return ndcg_at_k(rank, k) if kind == "n" else recall_at_k(rank, k)
