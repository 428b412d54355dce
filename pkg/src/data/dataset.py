"""In-memory labeled image datasets."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from src.errors import DataError, DatasetFormatError


@dataclass(frozen=True)
class Dataset:
    """Images (N, C, H, W) float32, integer labels in [0, class_count)."""

    images: np.ndarray
    labels: np.ndarray
    class_count: int

    def __post_init__(self):
        if self.images.ndim != 4:
            raise DatasetFormatError(f"images must be (N, C, H, W), got {self.images.shape}")
        if self.images.shape[0] < 1:
            raise DatasetFormatError("dataset must contain at least one image")
        if self.labels.shape != (self.images.shape[0],):
            raise DatasetFormatError(
                f"{self.images.shape[0]} images but labels have shape {self.labels.shape}"
            )
        if self.class_count < 1:
            raise DatasetFormatError(f"class count must be positive, got {self.class_count}")
        if np.any(self.labels < 0) or np.any(self.labels >= self.class_count):
            raise DatasetFormatError(f"labels must lie in [0, {self.class_count})")
        if not np.all(np.isfinite(self.images)):
            raise DatasetFormatError("images contain NaN or Inf")

    def __len__(self):
        return self.images.shape[0]

    def class_frequencies(self):
        counts = np.bincount(self.labels, minlength=self.class_count)
        return counts / counts.sum()

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.images[indices], self.labels[indices], self.class_count)


class DatasetSplit(NamedTuple):
    train: Dataset
    test: Dataset


def normalize(dataset, mean, std):
    """Return a copy with every pixel mapped to (x - mean) / std."""
    if not std > 0:
        raise DataError(f"normalization std must be positive, got {std}")
    images = ((dataset.images.astype(np.float64) - mean) / std).astype(np.float32)
    return Dataset(images, dataset.labels.copy(), dataset.class_count)
