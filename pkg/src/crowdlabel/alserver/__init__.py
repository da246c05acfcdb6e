"""Off-chain active-learning server: dataset store, classifier, batch
selection, and the event-driven per-job training session."""

from .dataset import Dataset, Store, UnknownDataset, make_blobs
from .model import Model, TrainConfig, train, predict_proba, predict_labels, EmptyPool, UntrainedModel
from .selection import select_batch, select_random, BatchTooLarge
from .session import ALServer, Session, SessionStalled

__all__ = [
    "Dataset",
    "Store",
    "UnknownDataset",
    "make_blobs",
    "Model",
    "TrainConfig",
    "train",
    "predict_proba",
    "predict_labels",
    "EmptyPool",
    "UntrainedModel",
    "select_batch",
    "select_random",
    "BatchTooLarge",
    "ALServer",
    "Session",
    "SessionStalled",
]
