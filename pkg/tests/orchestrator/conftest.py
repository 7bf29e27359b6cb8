"""
Fixtures shared by the orchestrator tests: a complete artifact directory over a
small random corpus.
"""

import numpy as np
import pytest

from counterclaim.corpus_store import CorpusStore
from counterclaim.dense_retriever import DenseScorer, EmbeddingConfig, ProjectionInit, save_scorer
from counterclaim.lexical_retriever import build_index, save_index
from counterclaim.orchestrator import CounterclaimService, StaticBackend, load_settings
from counterclaim.policy_optimizer import BigramPolicy, save_policy
from counterclaim.retrieval_pipeline import random_corpus
from counterclaim.reward_engine import Aspect, FeedbackClassifier, save_classifiers

CLAIM = "w3 w7 w11"
STATIC_TEXT = "w3 is not supported by w7"


def make_settings(root, **overrides):
    """Settings over an artifact directory, ignoring the real environment."""
    values = {
        "artifacts_dir": str(root),
        "pipeline": {"m": 10, "k_out": 4},
        "backend": {"kind": "static", "static_text": STATIC_TEXT, "backoff": 0.0},
    }
    values.update(overrides)
    return load_settings(overrides=values, environ={})


@pytest.fixture(scope="session")
def artifacts_dir(tmp_path_factory):
    """Corpus store, index, scorer, three classifiers and a reference policy on disk."""
    root = tmp_path_factory.mktemp("artifacts")
    settings = make_settings(root)

    corpus = random_corpus(200, vocab_size=40, seed=4)
    CorpusStore.write(settings.corpus_dir, corpus)
    save_index(build_index(corpus), settings.index_path)
    save_scorer(DenseScorer(EmbeddingConfig(dim=64, init=ProjectionInit.RANDOM, seed=3)), settings.scorer_path)

    rng = np.random.default_rng(0)
    save_classifiers(
        {aspect: FeedbackClassifier(aspect, 0.1 * rng.standard_normal(256), 0.05) for aspect in Aspect},
        settings.classifier_dir,
    )

    policy = BigramPolicy([f"w{i}" for i in range(12)], max_length=5, context_buckets=4, init_scale=1.0, seed=2)
    save_policy(policy.freeze(), settings.reference_path)
    return root


@pytest.fixture(scope="session")
def settings(artifacts_dir):
    """Settings with the static backend and m=10, k_out=4."""
    return make_settings(artifacts_dir)


@pytest.fixture(scope="session")
def service(settings):
    """Service loaded from the artifact directory, answering with STATIC_TEXT."""
    return CounterclaimService.from_settings(settings, backend=StaticBackend(STATIC_TEXT))
