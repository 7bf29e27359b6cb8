"""
Tests for the human-feedback classifiers.
"""

import numpy as np
import pytest

from counterclaim.reward_engine import (
    Aspect,
    ClassifierConfig,
    ClassifierTrainingError,
    FeedbackClassifier,
    FeedbackExample,
    MetricError,
    balanced_accuracy,
    classify,
    format_metrics_table,
    imbalanced_feedback,
    load_classifier,
    load_classifiers,
    load_feedback,
    save_classifier,
    save_classifiers,
    separable_feedback,
    train_classifier,
)
from counterclaim.storage import ArtifactFormatError


@pytest.fixture
def separable():
    """400 balanced examples separable by response vocabulary."""
    return separable_feedback(400, Aspect.REFUTATION, seed=0)


class TestClassify:
    def test_zero_weights_score_half(self):
        classifier = FeedbackClassifier.zeros(Aspect.POLITENESS, n_features=64)

        assert classify(classifier, "claim", ["evidence"], "response") == 0.5

    def test_deterministic(self, separable):
        classifier, _ = train_classifier(separable, Aspect.REFUTATION)

        first = classify(classifier, "masks work", ["trial data"], "this is false and misleading")
        second = classify(classifier, "masks work", ["trial data"], "this is false and misleading")

        assert first == second

    def test_score_increases_with_margin(self):
        # Setup
        weights = np.zeros(16)
        weights[3] = 2.0
        classifier = FeedbackClassifier(Aspect.FACTUALITY, weights, bias=-0.5)
        features = np.zeros((3, 16))
        features[:, 3] = [0.1, 0.5, 0.9]

        # Execute
        scores = classifier.score_features(features)

        # Verify
        assert scores[0] < scores[1] < scores[2]

    def test_extreme_weights_stay_inside_unit_interval(self):
        classifier = FeedbackClassifier(Aspect.REFUTATION, np.full(64, 1e6))

        score = classify(classifier, "claim", ["evidence"], "a long response with many words")

        assert 0.0 < score < 1.0

    def test_scores_in_range_on_random_inputs(self, separable):
        classifier, _ = train_classifier(separable, Aspect.REFUTATION)
        rng = np.random.default_rng(1)
        words = ["false", "true", "virus", "cure", "please", "word3", "debunked"]

        for _ in range(100):
            response = " ".join(rng.choice(words, size=5))
            assert 0.0 < classify(classifier, "claim", ["evidence"], response) < 1.0


class TestTrainClassifier:
    def test_separable_set_is_learned(self, separable):
        _, metrics = train_classifier(separable, Aspect.REFUTATION)

        assert metrics.balanced_accuracy >= 0.95
        assert metrics.test_size == 80
        assert metrics.train_size == 320

    def test_balanced_loss_beats_unweighted_on_imbalanced_data(self):
        wins = 0
        for seed in range(5):
            # Setup
            examples = imbalanced_feedback(2000, positive_rate=0.1, seed=seed)

            # Execute
            _, balanced = train_classifier(examples, Aspect.REFUTATION, ClassifierConfig(seed=seed))
            _, unweighted = train_classifier(
                examples, Aspect.REFUTATION, ClassifierConfig(seed=seed, class_balanced=False)
            )

            # Verify
            wins += balanced.balanced_accuracy > unweighted.balanced_accuracy

        assert wins >= 4

    def test_single_label_raises(self):
        examples = [
            FeedbackExample(claim="c", evidence=["e"], response=f"r{i}", label=1, aspect=Aspect.POLITENESS)
            for i in range(20)
        ]

        with pytest.raises(ClassifierTrainingError):
            train_classifier(examples, Aspect.POLITENESS)

    def test_other_aspects_ignored(self, separable):
        noise = [
            FeedbackExample(claim="c", evidence=["e"], response="anything", label=1, aspect=Aspect.POLITENESS)
            for _ in range(50)
        ]

        _, metrics = train_classifier(separable + noise, Aspect.REFUTATION)

        assert metrics.train_size + metrics.test_size == 400

    def test_same_seed_same_weights(self, separable):
        first, _ = train_classifier(separable, Aspect.REFUTATION, ClassifierConfig(seed=3))
        second, _ = train_classifier(separable, Aspect.REFUTATION, ClassifierConfig(seed=3))

        np.testing.assert_array_equal(first.weights, second.weights)
        assert first.bias == second.bias


class TestBalancedAccuracy:
    def test_perfect(self):
        assert balanced_accuracy([0, 1, 1, 0], [0, 1, 1, 0]) == 1.0

    def test_all_positive_on_balanced_labels(self):
        assert balanced_accuracy([1, 1, 1, 1], [0, 1, 0, 1]) == 0.5

    def test_matches_per_class_recall_mean(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            labels = rng.integers(0, 2, size=60)
            labels[:2] = [0, 1]
            predictions = rng.integers(0, 2, size=60)

            recall_pos = np.mean(predictions[labels == 1] == 1)
            recall_neg = np.mean(predictions[labels == 0] == 0)

            assert balanced_accuracy(predictions, labels) == pytest.approx((recall_pos + recall_neg) / 2, abs=1e-12)

    def test_single_class_labels_raise(self):
        with pytest.raises(MetricError):
            balanced_accuracy([0, 1, 0], [1, 1, 1])


class TestPersistence:
    def test_round_trip(self, separable, tmp_path):
        classifier, _ = train_classifier(separable, Aspect.REFUTATION)

        loaded = load_classifier(save_classifier(classifier, tmp_path / "refutation.ccaf"))

        np.testing.assert_array_equal(loaded.weights, classifier.weights)
        assert loaded.bias == classifier.bias
        assert loaded.aspect == Aspect.REFUTATION
        assert classify(loaded, "c", ["e"], "false claim") == classify(classifier, "c", ["e"], "false claim")

    def test_directory_holds_present_aspects(self, tmp_path):
        classifiers = {aspect: FeedbackClassifier.zeros(aspect, 32) for aspect in (Aspect.REFUTATION, Aspect.POLITENESS)}

        save_classifiers(classifiers, tmp_path)

        assert set(load_classifiers(tmp_path)) == {Aspect.REFUTATION, Aspect.POLITENESS}

    def test_foreign_file_rejected(self, tmp_path):
        path = tmp_path / "bad.ccaf"
        path.write_bytes(b"CCAF garbage")

        with pytest.raises(ArtifactFormatError):
            load_classifier(path)


class TestFeedbackData:
    def test_load_skips_malformed_lines(self, tmp_path):
        path = tmp_path / "feedback.jsonl"
        path.write_text(
            '{"claim": "c", "evidence": ["e"], "response": "r", "label": 1, "aspect": "politeness"}\n'
            '{"claim": "c", "response": "r", "label": 7, "aspect": "politeness"}\n'
            "not json\n"
            "\n",
            encoding="utf-8",
        )

        examples = load_feedback(path)

        assert len(examples) == 1
        assert examples[0].aspect == Aspect.POLITENESS

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ClassifierTrainingError, match="Cannot read"):
            load_feedback(tmp_path / "absent.jsonl")

    def test_load_without_valid_records(self, tmp_path):
        path = tmp_path / "feedback.jsonl"
        path.write_text("{bad\n", encoding="utf-8")

        with pytest.raises(ClassifierTrainingError, match="no valid feedback"):
            load_feedback(path)

    def test_metrics_table_columns(self, separable):
        _, metrics = train_classifier(separable, Aspect.REFUTATION)

        table = format_metrics_table([metrics])

        for column in ["BA", "Acc.", "F1", "Prec.", "Rec."]:
            assert column in table
        assert "refutation" in table
