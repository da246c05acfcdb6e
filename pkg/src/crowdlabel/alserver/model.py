"""Multinomial logistic regression, full-batch gradient descent.

Convex, deterministic, and gradient-checkable: the regularized loss is
L(W) = -(1/m) sum_i log p(y_i | x_i; W) + (l2/2) ||W||^2
with the bias folded into the last feature column. Weights start at zero,
so an untrained model predicts uniform probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class EmptyPool(ValueError):
    pass


class UntrainedModel(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-3
    epochs: int = 500
    seed: int = 0


@dataclass
class Model:
    kind: str
    weights: np.ndarray  # (num_classes, d+1)
    meta: dict = field(default_factory=dict)
    trained_rounds: int = 0

    @classmethod
    def initial(cls, num_classes: int, dim: int, config: TrainConfig) -> "Model":
        weights = np.zeros((num_classes, dim + 1), dtype=np.float64)
        meta = {"epochs": config.epochs, "learning_rate": config.learning_rate, "seed": config.seed}
        return cls("multinomial-logistic", weights, meta)


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def predict_proba(weights: np.ndarray, X: np.ndarray) -> np.ndarray:
    return softmax(X @ weights.T)


def predict_labels(weights: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Argmax class per row; ties resolve to the lowest class index."""
    return predict_proba(weights, X).argmax(axis=1)


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    out = np.zeros((len(labels), num_classes), dtype=np.float64)
    out[np.arange(len(labels)), labels] = 1.0
    return out


def loss(weights: np.ndarray, X: np.ndarray, Y: np.ndarray, l2: float) -> float:
    probs = predict_proba(weights, X)
    data_term = -np.sum(Y * np.log(probs)) / len(X)
    return float(data_term + 0.5 * l2 * np.sum(weights**2))


def gradient(weights: np.ndarray, X: np.ndarray, Y: np.ndarray, l2: float) -> np.ndarray:
    probs = predict_proba(weights, X)
    return (probs - Y).T @ X / len(X) + l2 * weights


def train(
    model: Model,
    X: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig | None = None,
) -> tuple[Model, list[float]]:
    """Fit from zero-initialized weights; returns the new model and the
    per-epoch regularized loss curve (monotonically non-increasing)."""
    if len(X) == 0:
        raise EmptyPool("no labeled samples to train on")
    config = config or TrainConfig()
    num_classes = model.weights.shape[0]
    Y = one_hot(np.asarray(labels, dtype=np.int64), num_classes)
    weights = np.zeros_like(model.weights)
    curve = [loss(weights, X, Y, config.l2)]
    for _ in range(config.epochs):
        weights = weights - config.learning_rate * gradient(weights, X, Y, config.l2)
        curve.append(loss(weights, X, Y, config.l2))
    trained = Model(model.kind, weights, dict(model.meta), model.trained_rounds + 1)
    return trained, curve


def entropy(probs: np.ndarray) -> np.ndarray:
    """Row-wise predictive entropy; exact zeros contribute nothing."""
    safe = np.where(probs > 0, probs, 1.0)
    return -(probs * np.log(safe)).sum(axis=1)
