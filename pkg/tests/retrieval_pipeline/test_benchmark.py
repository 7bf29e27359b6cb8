"""
End-to-end retriever training on the planted-token benchmark.
"""

import pytest

from counterclaim.dense_retriever import DenseScorer, train
from counterclaim.lexical_retriever import build_index, retrieve_top_m
from counterclaim.retrieval_pipeline import PipelineConfig, evaluate, evaluate_ranker, planted_token_benchmark


@pytest.fixture(scope="module")
def bench():
    """2000 documents, 200 training claims, 100 held-out claims."""
    return planted_token_benchmark(seed=0)


@pytest.fixture(scope="module")
def index(bench):
    return build_index(bench.corpus)


@pytest.fixture(scope="module")
def trained(bench, index):
    """Scorer trained with the benchmark schedule, and its trace."""
    return train(DenseScorer(bench.embedding_config), bench.train, index, bench.corpus, bench.train_config)


class TestPlantedBenchmark:
    def test_shape(self, bench):
        assert len(bench.corpus) == 2000
        assert len(bench.train) == 200
        assert len(bench.eval) == 100
        train_topics = {ex.gold_doc_id[:4] for ex in bench.train}
        eval_topics = {ex.gold_doc_id[:4] for ex in bench.eval}
        assert not train_topics & eval_topics

    def test_untrained_scorer_is_near_chance(self, bench, index):
        config = PipelineConfig(m=20, k_out=5, scorer=DenseScorer(bench.embedding_config), index=index, corpus=bench.corpus)

        report = evaluate(config, bench.eval)

        assert report.scores["n@1"] <= 0.3

    def test_training_lifts_top_one(self, bench, index, trained):
        scorer, _ = trained
        config = PipelineConfig(m=20, k_out=5, scorer=scorer, index=index, corpus=bench.corpus)

        report = evaluate(config, bench.eval)

        assert report.scores["n@1"] >= 0.8

    def test_reranking_beats_bm25_alone(self, bench, index, trained):
        # Setup
        scorer, _ = trained
        config = PipelineConfig(m=20, k_out=5, scorer=scorer, index=index, corpus=bench.corpus)

        # Execute
        reranked = evaluate(config, bench.eval)
        lexical = evaluate_ranker(
            lambda claim: [hit.doc_id for hit in retrieve_top_m(index, claim, 20)], bench.eval, bench.corpus
        )

        # Verify
        assert reranked.scores["n@5"] >= lexical.scores["n@5"]

    def test_loss_falls(self, trained):
        _, trace = trained

        assert len(trace.epoch_losses) == 5
        assert trace.epoch_losses[-1] < trace.epoch_losses[0]
