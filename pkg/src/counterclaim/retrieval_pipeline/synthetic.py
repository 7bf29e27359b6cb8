"""
Synthetic retrieval data for desk-scale experiments.

The planted-token benchmark hides each claim's gold evidence among documents
that BM25 cannot tell apart: every document of a topic shares the topic's two
title tokens and has the same length, so the lexical stage returns the whole
topic but in doc_id order. Claims name a concept through a synonym token
(`sy{j}`) that never occurs in the corpus, while the gold document carries the
concept token (`cn{j}`). Only a trained dense scorer can learn the mapping.

Eval claims come from topics no training claim touches, so the benchmark
measures the learned synonym mapping rather than memorized topics.

Usage:
    from counterclaim.retrieval_pipeline.synthetic import planted_token_benchmark

    bench = planted_token_benchmark(seed=0)
    index = build_index(bench.corpus)
"""

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import List, Tuple

import numpy as np

from counterclaim.corpus_store import Corpus, EvidenceDocument
from counterclaim.dense_retriever import EmbeddingConfig, RetrieverExample, RetrieverTrainConfig

from .models.pipeline_models import EvalExample

SYNTHETIC_TIME = datetime(2024, 1, 1, tzinfo=timezone.utc)


@dataclass
class PlantedBenchmark:
    """
    Corpus plus train/eval claims, and the settings the benchmark is tuned for.

    Attributes:
        corpus: topics x docs_per_topic documents
        train: Claims for retriever training
        eval: Held-out claims, all from topics reserved for evaluation
        embedding_config: Hashed featurizer wide enough to keep token collisions rare
        train_config: Schedule that lifts N@1 from chance to near 1
    """

    corpus: Corpus
    train: List[RetrieverExample]
    eval: List[EvalExample]
    embedding_config: EmbeddingConfig
    train_config: RetrieverTrainConfig


def doc_id_for(topic: int, slot: int) -> str:
    return f"t{topic:03d}-d{slot:02d}"


def planted_claim(topic: int, concept: int) -> str:
    return f"tp{topic}a tp{topic}b sy{concept}"


def planted_token_benchmark(
    seed: int = 0,
    topics: int = 100,
    docs_per_topic: int = 20,
    train_claims: int = 200,
    eval_claims: int = 100,
    eval_topics: int = 20,
) -> PlantedBenchmark:
    """
    Build the planted-token benchmark.

    Each topic holds one document per concept; a per-topic permutation decides
    which slot carries which concept. Train claims cycle through the concepts
    over the first topics - eval_topics topics; eval claims are drawn from the
    remaining topics.

    Raises:
        ValueError: If more claims are requested than (topic, concept) pairs exist
    """
    train_topics = topics - eval_topics
    if eval_topics < 1 or train_topics < 1:
        raise ValueError(f"need at least one train and one eval topic, got {train_topics} and {eval_topics}")
    if train_claims > train_topics * docs_per_topic or eval_claims > eval_topics * docs_per_topic:
        raise ValueError("more claims requested than (topic, concept) pairs available")
    rng = np.random.default_rng(seed)

    documents: List[EvidenceDocument] = []
    slot_of = np.empty((topics, docs_per_topic), dtype=np.int64)
    for topic in range(topics):
        concepts = rng.permutation(docs_per_topic)
        for slot in range(docs_per_topic):
            concept = int(concepts[slot])
            slot_of[topic, concept] = slot
            documents.append(
                EvidenceDocument(
                    doc_id=doc_id_for(topic, slot),
                    title=f"tp{topic}a tp{topic}b",
                    abstract=f"cn{concept}",
                    source="synthetic",
                    ingest_time=SYNTHETIC_TIME,
                )
            )

    def gold(topic: int, concept: int) -> str:
        return doc_id_for(topic, int(slot_of[topic, concept]))

    used = set()
    train: List[RetrieverExample] = []
    for i in range(train_claims):
        concept = i % docs_per_topic
        topic = int(rng.integers(train_topics))
        while (topic, concept) in used:
            topic = int(rng.integers(train_topics))
        used.add((topic, concept))
        train.append(RetrieverExample(claim=planted_claim(topic, concept), gold_doc_id=gold(topic, concept)))

    held_out: List[Tuple[int, int]] = [(t, c) for t in range(train_topics, topics) for c in range(docs_per_topic)]
    picks = sorted(int(p) for p in rng.choice(len(held_out), size=eval_claims, replace=False))
    evals = [EvalExample(claim=planted_claim(*held_out[p]), gold_doc_id=gold(*held_out[p])) for p in picks]

    return PlantedBenchmark(
        corpus=Corpus(documents),
        train=train,
        eval=evals,
        embedding_config=EmbeddingConfig(dim=1024),
        train_config=RetrieverTrainConfig(epochs=5, warmup_steps=100, learning_rate=1e-2, tau=0.5, lam=0.2, seed=seed),
    )


def random_corpus(n_docs: int, vocab_size: int = 60, seed: int = 0, max_len: int = 12) -> Corpus:
    """Documents of random words w0..w{vocab_size-1}, for oracle comparisons."""
    rng = np.random.default_rng(seed)
    documents = []
    for i in range(n_docs):
        length = int(rng.integers(1, max_len + 1))
        words = " ".join(f"w{int(w)}" for w in rng.integers(0, vocab_size, size=length))
        documents.append(
            EvidenceDocument(
                doc_id=f"doc{i:05d}",
                title=f"w{int(rng.integers(vocab_size))}",
                abstract=f"{words} u{i}",
                source="synthetic",
                ingest_time=SYNTHETIC_TIME,
            )
        )
    return Corpus(documents)
