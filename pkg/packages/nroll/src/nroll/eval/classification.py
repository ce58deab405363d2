from __future__ import annotations

import numpy as np

from ..datasets import LabelledSet
from ..learner import MarginConfig, ModelParams, predict


def classification_accuracy(predicted: np.ndarray, truth: np.ndarray) -> float:
    predicted, truth = np.asarray(predicted), np.asarray(truth)
    if truth.size == 0:
        raise ValueError("empty evaluation set")
    return float(np.mean(predicted == truth))


def closed_set_accuracy(params: ModelParams, test: LabelledSet, margin: MarginConfig) -> float:
    """Closed-set accuracy of argmax-cosine predictions on a clean test set."""
    truth = np.where(test.gt_labels >= 0, test.gt_labels, test.labels)
    return classification_accuracy(predict(params, test.features, margin), truth)
