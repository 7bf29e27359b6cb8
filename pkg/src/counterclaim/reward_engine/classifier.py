# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import torch
from pydantic import ValidationError
from sklearn.metrics import accuracy_score, balanced_accuracy_score, f1_score, precision_score, recall_score
from sklearn.model_selection import train_test_split
from sklearn.utils.class_weight import compute_class_weight

from counterclaim.storage import read_artifact, write_artifact

from .errors.reward_errors import ClassifierTrainingError, MetricError
from .features import FeedbackFeaturizer, FeedbackInput, as_input
from .models.reward_models import Aspect, ClassifierConfig, ClassifierMetrics, FeedbackExample

CLASSIFIER_KIND = "feedback-classifier"
CLASSIFIER_VERSION = 1

# Logits are clipped to this magnitude so scores stay strictly inside (0, 1)
LOGIT_LIMIT = 30.0

METRIC_COLUMNS = {
    "balanced_accuracy": "BA",
    "accuracy": "Acc.",
    "f1": "F1",
    "precision": "Prec.",
    "recall": "Rec.",
}


class FeedbackClassifier:
    """
    Logistic model scoring how well a response satisfies one aspect.

    score = sigmoid(w . features(claim, evidence, response) + b), uncalibrated.
    Immutable after training and safe to share between threads.

    Attributes:
        aspect: Aspect the classifier judges
        weights: (n_features,) float64
        bias: Intercept
    """

    def __init__(self, aspect: Aspect, weights: np.ndarray, bias: float = 0.0):
        self.aspect = Aspect(aspect)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)
        self.featurizer = FeedbackFeaturizer(len(self.weights))

    @classmethod
    def zeros(cls, aspect: Aspect, n_features: int = 4096) -> "FeedbackClassifier":
        return cls(aspect, np.zeros(n_features))

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def logits(self, features: np.ndarray) -> np.ndarray:
        return features @ self.weights + self.bias

    def score_features(self, features: np.ndarray) -> np.ndarray:
        clipped = np.clip(self.logits(features), -LOGIT_LIMIT, LOGIT_LIMIT)
        return torch.sigmoid(torch.from_numpy(clipped)).numpy()

    def scores(self, items: Sequence[FeedbackInput]) -> np.ndarray:
        if not items:
            return np.zeros(0)
        return self.score_features(self.featurizer.transform(items))

    def score(self, claim: str, evidence: Sequence[str], response: str) -> float:
        return float(self.scores([as_input(claim, evidence, response)])[0])


def classify(classifier: FeedbackClassifier, claim: str, evidence: Sequence[str], response: str) -> float:
    """Score in (0, 1) of one (claim, evidence, response) triple."""
    return classifier.score(claim, evidence, response)


# ------------------ Metrics ------------------ #
def balanced_accuracy(predictions: Sequence[int], labels: Sequence[int]) -> float:
    """
    Mean of the per-class recalls.

    Raises:
        MetricError: If labels hold fewer than two classes
    """
    labels = np.asarray(labels)
    if len(np.unique(labels)) < 2:
        raise MetricError("Balanced accuracy needs both classes among the labels")
    return float(balanced_accuracy_score(labels, np.asarray(predictions)))


def classification_metrics(
    aspect: Aspect, predictions: np.ndarray, labels: np.ndarray, train_size: int
) -> ClassifierMetrics:
    return ClassifierMetrics(
        aspect=aspect,
        balanced_accuracy=balanced_accuracy(predictions, labels),
        accuracy=float(accuracy_score(labels, predictions)),
        f1=float(f1_score(labels, predictions, zero_division=0)),
        precision=float(precision_score(labels, predictions, zero_division=0)),
        recall=float(recall_score(labels, predictions, zero_division=0)),
        train_size=train_size,
        test_size=len(labels),
    )


def format_metrics_table(metrics: Iterable[ClassifierMetrics]) -> str:
    """One row per aspect with BA / Acc. / F1 / Prec. / Rec. columns."""
    frame = pd.DataFrame([m.model_dump(mode="json") for m in metrics]).set_index("aspect")
    frame = frame[list(METRIC_COLUMNS)].rename(columns=METRIC_COLUMNS)
    return frame.to_string(float_format=lambda value: f"{value:.3f}")


# ------------------ Training ------------------ #
def fit_logistic(
    features: np.ndarray, labels: np.ndarray, config: ClassifierConfig
) -> Tuple[np.ndarray, float, int]:
    """
    Full-batch logistic regression with an optional class-balanced loss.

    Class weights are n / (2 * n_class), so both classes carry equal total
    weight. Stops after config.epochs steps or once the loss settles.

    Returns:
        Tuple of (weights, bias, steps taken)
    """
    x = torch.from_numpy(features)
    y = torch.from_numpy(labels.astype(np.float64))
    if config.class_balanced:
        class_weights = compute_class_weight("balanced", classes=np.array([0, 1]), y=labels)
        sample_weights = torch.from_numpy(class_weights[labels])
    else:
        sample_weights = torch.ones_like(y)

    weights = torch.zeros(features.shape[1], dtype=torch.float64, requires_grad=True)
    bias = torch.zeros((), dtype=torch.float64, requires_grad=True)
    optimizer = torch.optim.Adam([weights, bias], lr=config.learning_rate)
    criterion = torch.nn.BCEWithLogitsLoss(reduction="none")

    previous = float("inf")
    step = 0
    for step in range(1, config.epochs + 1):
        optimizer.zero_grad()
        per_example = criterion(x @ weights + bias, y)
        loss = (sample_weights * per_example).sum() / sample_weights.sum() + config.l2 * weights.pow(2).sum()
        if not bool(torch.isfinite(loss)):
            raise ClassifierTrainingError(f"Non-finite classifier loss at step {step}")
        loss.backward()
        optimizer.step()
        current = float(loss)
        if abs(previous - current) < config.tol:
            break
        previous = current
    return weights.detach().numpy().copy(), float(bias.detach()), step


def train_classifier(
    examples: Sequence[FeedbackExample],
    aspect: Aspect,
    config: Optional[ClassifierConfig] = None,
) -> Tuple[FeedbackClassifier, ClassifierMetrics]:
    """
    Train a feedback classifier for one aspect and report held-out metrics.

    Examples labelled for other aspects are ignored. The train/test split is
    stratified by label and seeded.

    Args:
        examples: Human-feedback examples
        aspect: Aspect to train
        config: Training settings

    Returns:
        Tuple of (trained classifier, metrics on the held-out split)

    Raises:
        ClassifierTrainingError: If only one label is present or a class is too small to split
    """
    config = config or ClassifierConfig()
    aspect = Aspect(aspect)
    selected = [ex for ex in examples if ex.aspect == aspect]
    if len(selected) < len(examples):
        log.warning(f"Ignoring {len(examples) - len(selected)} examples labelled for other aspects")
    labels = np.asarray([ex.label for ex in selected], dtype=np.int64)
    counts = np.bincount(labels, minlength=2)
    if counts.min() == 0:
        raise ClassifierTrainingError(f"{aspect.value} feedback has a single label; both 0 and 1 are needed")

    log.step(f"Training {aspect.value} classifier on {len(selected)} examples ({counts[1]} positive)")
    try:
        train_idx, test_idx = train_test_split(
            np.arange(len(selected)), test_size=config.test_size, stratify=labels, random_state=config.seed
        )
    except ValueError as e:
        raise ClassifierTrainingError(f"Cannot split {aspect.value} feedback: {e}") from e

    featurizer = FeedbackFeaturizer(config.n_features)
    features = featurizer.transform([as_input(ex.claim, ex.evidence, ex.response) for ex in selected])
    weights, bias, steps = fit_logistic(features[train_idx], labels[train_idx], config)
    classifier = FeedbackClassifier(aspect, weights, bias)

    predictions = (classifier.score_features(features[test_idx]) >= 0.5).astype(np.int64)
    metrics = classification_metrics(aspect, predictions, labels[test_idx], len(train_idx))
    log.success(
        f"{aspect.value}: BA {metrics.balanced_accuracy:.3f}, F1 {metrics.f1:.3f} "
        f"after {steps} steps on {len(train_idx)} examples"
    )
    return classifier, metrics


# ------------------ Data ------------------ #
def load_feedback(path: Union[str, Path]) -> List[FeedbackExample]:
    """
    Read JSON-lines feedback {claim, evidence, response, label, aspect}.

    Malformed lines are skipped and counted in a warning.

    Raises:
        ClassifierTrainingError: If the file cannot be read or holds no valid record
    """
    examples: List[FeedbackExample] = []
    skipped = 0
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                try:
                    examples.append(FeedbackExample.model_validate_json(line))
                except ValidationError:
                    skipped += 1
    except (OSError, UnicodeDecodeError) as e:
        raise ClassifierTrainingError(f"Cannot read {path}: {e}") from e
    if skipped:
        log.warning(f"Skipped {skipped} malformed feedback records in {path}")
    if not examples:
        raise ClassifierTrainingError(f"{path} holds no valid feedback records")
    return examples


# ------------------ Persistence ------------------ #
def save_classifier(classifier: FeedbackClassifier, path: Union[str, Path]) -> Path:
    metadata = {"aspect": classifier.aspect.value, "bias": classifier.bias}
    return write_artifact(path, CLASSIFIER_KIND, CLASSIFIER_VERSION, metadata, {"weights": classifier.weights})


def load_classifier(path: Union[str, Path]) -> FeedbackClassifier:
    metadata, arrays = read_artifact(path, CLASSIFIER_KIND, CLASSIFIER_VERSION)
    return FeedbackClassifier(Aspect(metadata["aspect"]), arrays["weights"], metadata["bias"])


def classifier_path(directory: Union[str, Path], aspect: Aspect) -> Path:
    return Path(directory) / f"classifier-{Aspect(aspect).value}.ccaf"


def save_classifiers(classifiers: Dict[Aspect, FeedbackClassifier], directory: Union[str, Path]) -> List[Path]:
    return [save_classifier(classifier, classifier_path(directory, aspect)) for aspect, classifier in classifiers.items()]


def load_classifiers(directory: Union[str, Path]) -> Dict[Aspect, FeedbackClassifier]:
    """Every aspect classifier found in a directory; missing aspects are simply absent."""
    found = {}
    for aspect in Aspect:
        path = classifier_path(directory, aspect)
        if path.exists():
            found[aspect] = load_classifier(path)
    return found
