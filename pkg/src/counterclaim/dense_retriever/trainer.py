# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch

from counterclaim.corpus_store import Corpus, evidence_text
from counterclaim.lexical_retriever import InvertedIndex, sample_negatives, sample_positives
from counterclaim.utils import derive_seed, warmup_cosine_schedule

from .errors.dense_errors import DatasetValidationError, RetrieverTrainingError
from .loss import loss_from_features
from .models.dense_models import RetrieverExample, RetrieverTrainBatch, RetrieverTrainConfig, TrainingTrace
from .scorer import DenseScorer


def validate_dataset(dataset: Sequence[RetrieverExample], index: InvertedIndex, corpus: Corpus) -> None:
    """
    Check that every gold id is both indexed and present in the corpus.

    Raises:
        DatasetValidationError: Listing the missing ids
    """
    missing: List[str] = []
    for example in dataset:
        gold = example.gold_doc_id
        if (gold not in corpus or index.position_of(gold) is None) and gold not in missing:
            missing.append(gold)
    if missing:
        raise DatasetValidationError(missing)


class _FeatureCache:
    """Feature rows for claims and documents, computed once per text."""

    def __init__(self, scorer: DenseScorer):
        self.scorer = scorer
        self._rows: Dict[str, np.ndarray] = {}

    def rows(self, texts: Sequence[str]) -> torch.Tensor:
        missing = [text for text in dict.fromkeys(texts) if text not in self._rows]
        if missing:
            for text, row in zip(missing, self.scorer.featurizer.features(missing)):
                self._rows[text] = row
        return torch.from_numpy(np.vstack([self._rows[text] for text in texts]))


def train(
    scorer: DenseScorer,
    dataset: Sequence[RetrieverExample],
    index: InvertedIndex,
    corpus: Corpus,
    config: Optional[RetrieverTrainConfig] = None,
) -> Tuple[DenseScorer, TrainingTrace]:
    """
    Train the scorer with the margin ranking + contrastive objective.

    Positives for each claim are its top-k BM25 documents other than the gold
    (fixed across epochs); negatives are resampled every epoch from the
    low-relevance pool, excluding the gold and the positives. Parameters are
    updated with AdamW under linear warmup and cosine decay. The same seed,
    data and config reproduce the same parameters.

    Args:
        scorer: Scorer to train in place
        dataset: Claims with their gold evidence ids
        index: BM25 index over the corpus
        corpus: The indexed corpus
        config: Training settings

    Returns:
        Tuple of (the trained scorer, per-epoch mean losses)

    Raises:
        DatasetValidationError: If gold ids are missing from the corpus
        RetrieverTrainingError: On an empty dataset or a non-finite loss
    """
    config = config or RetrieverTrainConfig()
    if not dataset:
        raise RetrieverTrainingError("Training dataset is empty")
    validate_dataset(dataset, index, corpus)

    torch.manual_seed(config.seed)
    steps_per_epoch = math.ceil(len(dataset) / config.batch_size)
    total_steps = steps_per_epoch * config.epochs
    optimizer = torch.optim.AdamW(scorer.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay)
    scheduler = warmup_cosine_schedule(optimizer, config.warmup_steps, total_steps)
    cache = _FeatureCache(scorer)

    log.step(f"Training dense scorer on {len(dataset)} claims for {config.epochs} epochs ({total_steps} steps)")
    positives = [
        [corpus.get(doc.doc_id) for doc in sample_positives(index, ex.claim, config.k, exclude={ex.gold_doc_id})]
        for ex in dataset
    ]

    trace = TrainingTrace()
    scorer.train()
    for epoch in range(config.epochs):
        order = np.random.default_rng([config.seed, epoch]).permutation(len(dataset))
        epoch_losses: List[float] = []
        for start in range(0, len(order), config.batch_size):
            optimizer.zero_grad()
            members = order[start:start + config.batch_size]
            for position in members:
                example = dataset[position]
                batch_id = f"epoch{epoch}-example{position}"
                taken = {example.gold_doc_id} | {doc.doc_id for doc in positives[position]}
                negatives = sample_negatives(
                    index, example.claim, config.k, exclude=taken, seed=derive_seed(config.seed, epoch, position)
                )
                batch = RetrieverTrainBatch(
                    claim=example.claim,
                    gold=corpus.get(example.gold_doc_id),
                    positives=positives[position],
                    negatives=[corpus.get(doc.doc_id) for doc in negatives],
                    batch_id=batch_id,
                )
                texts = [batch.claim, evidence_text(batch.gold)]
                texts += [evidence_text(doc) for doc in batch.positives + batch.negatives]
                terms = loss_from_features(
                    scorer, cache.rows(texts), config.k, config.tau, config.lam, config.contrastive_form, batch_id
                )
                (terms.loss / len(members)).backward()
                epoch_losses.append(float(terms.loss))
            optimizer.step()
            scheduler.step()
            trace.steps += 1
            if not scorer.check_finite():
                raise RetrieverTrainingError("Parameters became non-finite", batch_id=batch_id)

        mean_loss = float(np.mean(epoch_losses))
        trace.epoch_losses.append(mean_loss)
        log.fine(f"Epoch {epoch + 1}/{config.epochs}: mean loss {mean_loss:.4f}, lr {scheduler.get_last_lr()[0]:.2e}")

    scorer.eval()
    log.success(f"Dense scorer trained: loss {trace.epoch_losses[0]:.4f} -> {trace.epoch_losses[-1]:.4f}")
    return scorer, trace
