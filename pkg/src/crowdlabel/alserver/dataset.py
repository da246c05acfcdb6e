"""Datasets and the file-backed store.

CSV format (one record per line, documented header):
    sample_id, f_1, ..., f_d [, hidden_label]
Hidden labels drive simulated workers and evaluation only; training sees
nothing but aggregated votes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class UnknownDataset(KeyError):
    pass


@dataclass
class Dataset:
    ref: str
    sample_ids: list[int]
    features: dict[int, tuple[float, ...]]
    hidden_labels: dict[int, int] | None = None

    @property
    def dim(self) -> int:
        return len(next(iter(self.features.values())))

    def matrix(self, sample_ids: list[int]) -> np.ndarray:
        """Feature matrix (rows in the given order) with a trailing bias column."""
        rows = [self.features[sid] for sid in sample_ids]
        X = np.asarray(rows, dtype=np.float64)
        return np.hstack([X, np.ones((len(rows), 1))])

    def num_classes(self) -> int:
        if not self.hidden_labels:
            raise ValueError("dataset has no hidden labels")
        return max(self.hidden_labels.values()) + 1

    def to_csv(self) -> str:
        lines = []
        d = self.dim
        header = "sample_id," + ",".join(f"f_{i + 1}" for i in range(d))
        if self.hidden_labels is not None:
            header += ",hidden_label"
        lines.append(header)
        for sid in self.sample_ids:
            row = [str(sid)] + [repr(v) for v in self.features[sid]]
            if self.hidden_labels is not None:
                row.append(str(self.hidden_labels[sid]))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, ref: str, text: str) -> "Dataset":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = [h.strip() for h in lines[0].split(",")]
        has_labels = header[-1] == "hidden_label"
        d = len(header) - 1 - (1 if has_labels else 0)
        sample_ids, features, labels = [], {}, {}
        for line in lines[1:]:
            parts = [p.strip() for p in line.split(",")]
            sid = int(parts[0])
            feats = tuple(float(p) for p in parts[1 : 1 + d])
            if sid in features:
                raise ValueError(f"duplicate sample_id {sid}")
            sample_ids.append(sid)
            features[sid] = feats
            if has_labels:
                labels[sid] = int(parts[1 + d])
        return cls(ref, sample_ids, features, labels if has_labels else None)


def make_blobs(
    ref: str = "blobs",
    n_samples: int = 200,
    separation: float = 2.0,
    seed: int = 7,
    num_classes: int = 2,
) -> Dataset:
    """Gaussian class blobs on a circle of radius `separation`, unit variance."""
    rng = np.random.default_rng(seed)
    sample_ids = list(range(n_samples))
    features: dict[int, tuple[float, ...]] = {}
    labels: dict[int, int] = {}
    for sid in sample_ids:
        cls = sid % num_classes
        angle = 2 * math.pi * cls / num_classes
        center = (separation * math.cos(angle), separation * math.sin(angle))
        point = rng.normal(loc=center, scale=1.0, size=2)
        features[sid] = (float(point[0]), float(point[1]))
        labels[sid] = cls
    return Dataset(ref, sample_ids, features, labels)


class Store:
    """Datasets plus versioned model snapshots; append-only on disk."""

    def __init__(self, base_dir: str | Path | None = None):
        self.base_dir = Path(base_dir) if base_dir else None
        self._datasets: dict[str, Dataset] = {}
        if self.base_dir:
            self.base_dir.mkdir(parents=True, exist_ok=True)

    def add_dataset(self, dataset: Dataset) -> None:
        if dataset.ref in self._datasets:
            raise ValueError(f"dataset {dataset.ref!r} already stored (append-only)")
        self._datasets[dataset.ref] = dataset
        if self.base_dir:
            path = self.base_dir / f"dataset-{dataset.ref}.csv"
            if not path.exists():
                path.write_text(dataset.to_csv(), encoding="utf-8")

    def get_dataset(self, ref: str) -> Dataset:
        if ref not in self._datasets:
            if self.base_dir:
                path = self.base_dir / f"dataset-{ref}.csv"
                if path.exists():
                    self._datasets[ref] = Dataset.from_csv(ref, path.read_text(encoding="utf-8"))
                    return self._datasets[ref]
            raise UnknownDataset(ref)
        return self._datasets[ref]

    def save_model(self, job_id: int, round_no: int, weights: np.ndarray) -> None:
        """One decimal-text file per (job, round); human-diffable."""
        if not self.base_dir:
            return
        models = self.base_dir / "models"
        models.mkdir(exist_ok=True)
        path = models / f"job{job_id}-round{round_no}.txt"
        lines = [" ".join(repr(v) for v in row) for row in weights.tolist()]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def load_model(self, job_id: int, round_no: int) -> np.ndarray:
        if not self.base_dir:
            raise FileNotFoundError("store has no backing directory")
        path = self.base_dir / "models" / f"job{job_id}-round{round_no}.txt"
        rows = [
            [float(v) for v in line.split()]
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        return np.asarray(rows, dtype=np.float64)
