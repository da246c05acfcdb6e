"""Query strategies: entropy-based uncertainty sampling and seeded random."""

from __future__ import annotations

import hashlib
import random

from .dataset import Dataset
from .model import Model, entropy, predict_proba


class BatchTooLarge(ValueError):
    pass


def select_batch(model: Model, dataset: Dataset, unlabeled: set[int], k: int) -> list[int]:
    """The k unlabeled samples with highest predictive entropy; ties break by
    ascending sample_id (an untrained model degenerates to the lowest ids)."""
    if k > len(unlabeled):
        raise BatchTooLarge(f"k={k} exceeds pool of {len(unlabeled)}")
    ordered = sorted(unlabeled)
    probs = predict_proba(model.weights, dataset.matrix(ordered))
    scores = entropy(probs)
    ranked = sorted(zip(ordered, scores), key=lambda pair: (-pair[1], pair[0]))
    return [sid for sid, _ in ranked[:k]]


def select_random(seed: int, round_no: int, unlabeled: set[int], k: int) -> list[int]:
    """Seeded uniform draw, independent of the model."""
    if k > len(unlabeled):
        raise BatchTooLarge(f"k={k} exceeds pool of {len(unlabeled)}")
    digest = hashlib.sha256(f"select:{seed}:{round_no}".encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    return sorted(rng.sample(sorted(unlabeled), k))
