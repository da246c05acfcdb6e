"""Classifier checks: gradient vs finite differences, convergence, selection."""

import numpy as np
import pytest

from crowdlabel.alserver.dataset import Dataset, make_blobs
from crowdlabel.alserver.model import (
    EmptyPool,
    Model,
    TrainConfig,
    entropy,
    gradient,
    loss,
    one_hot,
    predict_labels,
    predict_proba,
    train,
)
from crowdlabel.alserver.selection import BatchTooLarge, select_batch, select_random


def finite_difference_gradient(weights, X, Y, l2, eps=1e-6):
    """Central-difference oracle, one coordinate at a time."""
    grad = np.zeros_like(weights)
    for i in range(weights.shape[0]):
        for j in range(weights.shape[1]):
            plus = weights.copy()
            plus[i, j] += eps
            minus = weights.copy()
            minus[i, j] -= eps
            grad[i, j] = (loss(plus, X, Y, l2) - loss(minus, X, Y, l2)) / (2 * eps)
    return grad


def random_problem(rng, n=12, d=3, classes=3):
    X = np.hstack([rng.normal(size=(n, d)), np.ones((n, 1))])
    labels = rng.integers(0, classes, size=n)
    Y = one_hot(labels, classes)
    weights = rng.normal(scale=0.5, size=(classes, d + 1))
    return weights, X, Y


def test_gradient_matches_finite_differences_10_draws():
    rng = np.random.default_rng(123)
    for _ in range(10):
        weights, X, Y = random_problem(rng)
        analytic = gradient(weights, X, Y, l2=1e-3)
        numeric = finite_difference_gradient(weights, X, Y, l2=1e-3)
        denom = np.maximum(np.abs(numeric), 1e-8)
        rel = np.abs(analytic - numeric) / denom
        assert rel.max() < 1e-4, rel.max()


def test_probabilities_normalized_and_positive():
    rng = np.random.default_rng(5)
    weights, X, _ = random_problem(rng, n=50)
    probs = predict_proba(weights, X)
    assert np.all(probs > 0)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    # extreme scores stay finite and normalized
    hot = predict_proba(weights * 200, X)
    assert np.all(np.isfinite(hot))
    np.testing.assert_allclose(hot.sum(axis=1), 1.0, atol=1e-9)


def test_separable_points_reach_training_accuracy_1():
    # 4 linearly separable 2-D points, 2 classes, within 500 epochs
    X = np.array([[0.0, 1.0, 1.0], [0.0, 2.0, 1.0], [3.0, 0.0, 1.0], [4.0, 0.0, 1.0]])
    labels = np.array([0, 0, 1, 1])
    model = Model.initial(2, 2, TrainConfig())
    trained, curve = train(model, X, labels)
    assert (predict_labels(trained.weights, X) == labels).all()
    assert trained.trained_rounds == 1


def test_loss_monotone_every_epoch():
    dataset = make_blobs(n_samples=80, separation=2.0, seed=3)
    ids = sorted(dataset.sample_ids)
    X = dataset.matrix(ids)
    labels = np.array([dataset.hidden_labels[sid] for sid in ids])
    model = Model.initial(2, 2, TrainConfig())
    _, curve = train(model, X, labels)
    diffs = np.diff(curve)
    assert (diffs <= 1e-12).all(), f"loss increased by {diffs.max()}"


def test_training_deterministic():
    dataset = make_blobs(n_samples=40, seed=9)
    ids = sorted(dataset.sample_ids)
    X = dataset.matrix(ids)
    labels = np.array([dataset.hidden_labels[sid] for sid in ids])
    model = Model.initial(2, 2, TrainConfig())
    w1 = train(model, X, labels)[0].weights
    w2 = train(model, X, labels)[0].weights
    assert (w1 == w2).all()  # bit-identical


def test_train_empty_pool():
    model = Model.initial(2, 2, TrainConfig())
    with pytest.raises(EmptyPool):
        train(model, np.zeros((0, 3)), np.zeros(0, dtype=int))


def tiny_dataset(probs_by_sample):
    """Dataset stub where we control predicted probabilities via direct patch."""
    ids = sorted(probs_by_sample)
    return Dataset("tiny", ids, {sid: (float(sid), 0.0) for sid in ids}, {sid: 0 for sid in ids})


def test_select_batch_entropy_ordering(monkeypatch):
    # probs {1:[0.95,0.05], 2:[0.6,0.4], 3:[0.5,0.5]} -> k=1 [3]; k=2 [3,2]
    probs = {1: [0.95, 0.05], 2: [0.6, 0.4], 3: [0.5, 0.5]}
    dataset = tiny_dataset(probs)
    model = Model.initial(2, 2, TrainConfig())

    def fake_predict(weights, X):
        return np.array([probs[sid] for sid in sorted(probs)])

    monkeypatch.setattr("crowdlabel.alserver.selection.predict_proba", fake_predict)
    assert select_batch(model, dataset, {1, 2, 3}, 1) == [3]
    assert select_batch(model, dataset, {1, 2, 3}, 2) == [3, 2]


def test_select_batch_uniform_ties_take_lowest_ids():
    dataset = make_blobs(n_samples=10, seed=1)
    model = Model.initial(2, 2, TrainConfig())  # zero weights: uniform probs
    assert select_batch(model, dataset, set(dataset.sample_ids), 2) == [0, 1]


def test_select_batch_too_large():
    dataset = make_blobs(n_samples=4, seed=1)
    model = Model.initial(2, 2, TrainConfig())
    with pytest.raises(BatchTooLarge):
        select_batch(model, dataset, {0, 1}, 3)
    with pytest.raises(BatchTooLarge):
        select_random(0, 1, {0, 1}, 3)


def test_select_random_seeded_and_disjoint_from_model():
    picks1 = select_random(42, 1, set(range(20)), 5)
    picks2 = select_random(42, 1, set(range(20)), 5)
    assert picks1 == picks2
    assert select_random(42, 2, set(range(20)), 5) != picks1  # round enters the seed


def test_predict_labels_tie_takes_lowest_class():
    weights = np.zeros((2, 3))  # uniform probabilities everywhere
    X = np.array([[1.0, 2.0, 1.0]])
    assert predict_labels(weights, X)[0] == 0


def test_entropy_values():
    probs = np.array([[0.5, 0.5], [1.0, 0.0], [0.95, 0.05]])
    H = entropy(probs)
    assert H[0] == pytest.approx(np.log(2))
    assert H[1] == pytest.approx(0.0)
    assert 0 < H[2] < H[0]
