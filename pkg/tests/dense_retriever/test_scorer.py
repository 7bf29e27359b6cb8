"""
Tests for the dense scorer: embeddings, relevance, featurizers and checkpoints.
"""

import json

import numpy as np
import pytest
import torch
from pydantic import ValidationError

from counterclaim.dense_retriever import (
    DenseScorer,
    EmbeddingConfig,
    EmbeddingError,
    FeaturizerKind,
    HashedFeaturizer,
    ProjectionInit,
    embed,
    load_scorer,
    relevance,
    relevance_many,
    save_scorer,
    text_id,
)
from counterclaim.storage import ArtifactFormatError


@pytest.fixture
def scorer():
    """Identity-initialized scorer over 256 hashed buckets."""
    return DenseScorer(EmbeddingConfig(dim=256))


@pytest.fixture
def random_scorer():
    """Randomly initialized 32-dim scorer."""
    return DenseScorer(EmbeddingConfig(dim=32, init=ProjectionInit.RANDOM, seed=3))


class TestEmbed:
    def test_unit_norm(self, random_scorer):
        for text in ["vaccine trial", "masks reduce transmission", "x"]:
            assert np.linalg.norm(embed(random_scorer, text)) == pytest.approx(1.0, abs=1e-12)

    def test_identity_single_token_is_basis_vector(self, scorer):
        # Setup
        bucket = HashedFeaturizer(256).bucket("vaccine")

        # Execute
        vector = embed(scorer, "vaccine")

        # Verify
        expected = np.zeros(256)
        expected[bucket] = 1.0
        np.testing.assert_allclose(vector, expected)

    def test_text_without_tokens_embeds_to_first_basis_vector(self, scorer):
        vector = embed(scorer, "the of and")

        assert vector[0] == 1.0
        assert np.count_nonzero(vector) == 1

    def test_random_init_is_seeded(self):
        config = EmbeddingConfig(dim=16, init=ProjectionInit.RANDOM, seed=11)

        assert torch.equal(DenseScorer(config).projection, DenseScorer(config).projection)

    def test_wrong_projection_shape_raises(self):
        with pytest.raises(EmbeddingError):
            DenseScorer(EmbeddingConfig(dim=16), torch.eye(8, dtype=torch.float64))


class TestRelevance:
    def test_self_relevance_is_inverse_temperature(self, random_scorer):
        text = "hydroxychloroquine cures covid"

        assert relevance(random_scorer, text, text) == pytest.approx(1.0 / 0.05, rel=1e-12)

    def test_symmetric(self, random_scorer):
        a, b = "ivermectin treats infection", "randomized trial of ivermectin"

        assert relevance(random_scorer, a, b) == pytest.approx(relevance(random_scorer, b, a), abs=1e-12)

    def test_bounded_by_inverse_temperature(self, random_scorer):
        rng = np.random.default_rng(0)
        words = [f"term{i}" for i in range(30)]
        for _ in range(50):
            a = " ".join(rng.choice(words, size=4))
            b = " ".join(rng.choice(words, size=6))
            assert abs(relevance(random_scorer, a, b)) <= 20.0 + 1e-9

    def test_many_matches_pairwise(self, random_scorer):
        texts = ["lung damage", "vaccine dose", "fever cough"]

        many = relevance_many(random_scorer, "vaccine side effects", texts)

        for score, text in zip(many, texts):
            assert score == pytest.approx(relevance(random_scorer, "vaccine side effects", text), abs=1e-12)

    def test_many_with_no_texts(self, scorer):
        assert relevance_many(scorer, "claim", []).shape == (0,)


class TestExternalVectors:
    @pytest.fixture
    def vectors_file(self, tmp_path):
        """Two 8-dim vectors keyed by text hash."""
        path = tmp_path / "vectors.jsonl"
        rows = [
            {"text_id": text_id("alpha"), "vector": [3.0, 4.0, 0, 0, 0, 0, 0, 0]},
            {"text_id": text_id("beta"), "vector": [0, 0, 1.0, 0, 0, 0, 0, 0]},
        ]
        path.write_text("\n".join(json.dumps(row) for row in rows) + "\n", encoding="utf-8")
        return path

    def test_embeddings_follow_supplied_vectors(self, vectors_file):
        # Setup
        config = EmbeddingConfig(dim=8, featurizer=FeaturizerKind.EXTERNAL_VECTORS, vectors_path=vectors_file)
        scorer = DenseScorer(config)

        # Execute
        vector = embed(scorer, "alpha")

        # Verify
        np.testing.assert_allclose(vector[:2], [0.6, 0.8])
        assert relevance(scorer, "alpha", "beta") == pytest.approx(0.0)

    def test_unknown_text_raises(self, vectors_file):
        config = EmbeddingConfig(dim=8, featurizer=FeaturizerKind.EXTERNAL_VECTORS, vectors_path=vectors_file)

        with pytest.raises(EmbeddingError):
            embed(DenseScorer(config), "gamma")

    def test_wrong_dimension_raises(self, vectors_file):
        config = EmbeddingConfig(dim=16, featurizer=FeaturizerKind.EXTERNAL_VECTORS, vectors_path=vectors_file)

        with pytest.raises(EmbeddingError):
            DenseScorer(config)

    def test_external_needs_path(self):
        with pytest.raises(ValidationError):
            EmbeddingConfig(featurizer=FeaturizerKind.EXTERNAL_VECTORS)


class TestPersistence:
    def test_save_load_preserves_scores(self, random_scorer, tmp_path):
        # Execute
        path = save_scorer(random_scorer, tmp_path / "scorer.ccaf")
        loaded = load_scorer(path)

        # Verify
        assert torch.equal(loaded.projection, random_scorer.projection)
        assert loaded.config == random_scorer.config
        assert relevance(loaded, "a claim", "some evidence") == relevance(random_scorer, "a claim", "some evidence")

    def test_load_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "junk.ccaf"
        path.write_bytes(b"not an artifact")

        with pytest.raises(ArtifactFormatError):
            load_scorer(path)
