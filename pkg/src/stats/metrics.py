"""Classification metrics and chance levels."""

import numpy as np

from src.errors import DataError, ShapeError


def top_k_predictions(logits, k):
    """Indices of the k largest logits per row; ties go to the lower class index."""
    logits = np.asarray(logits)
    if logits.ndim != 2:
        raise ShapeError(f"logits must be 2-D, got {logits.shape}")
    classes = logits.shape[1]
    if not 1 <= k <= classes:
        raise DataError(f"k must be in [1, {classes}], got {k}")
    order = np.argsort(-logits.astype(np.float64), axis=1, kind="stable")
    return order[:, :k]


def top_k_accuracy(logits, labels, k):
    """Fraction of rows whose label is among the k highest logits."""
    labels = np.asarray(labels, dtype=np.int64)
    predicted = top_k_predictions(logits, k)
    if labels.shape != (predicted.shape[0],):
        raise ShapeError(f"expected {predicted.shape[0]} labels, got shape {labels.shape}")
    if labels.size == 0:
        raise DataError("top-k accuracy of an empty batch is undefined")
    if np.any(labels < 0) or np.any(labels >= np.asarray(logits).shape[1]):
        raise DataError("labels out of range for the logits")
    hits = int(np.sum(np.any(predicted == labels[:, None], axis=1)))
    return hits / labels.size


def chance_level(class_frequencies, k):
    """Top-k accuracy of a constant-output classifier.

    Constant logits tie everywhere, so the predicted set is classes 0..k-1.
    """
    freqs = np.asarray(class_frequencies, dtype=np.float64)
    if freqs.ndim != 1 or freqs.size == 0:
        raise DataError("class frequencies must be a non-empty vector")
    if np.any(freqs < 0) or not np.isclose(freqs.sum(), 1.0, rtol=0, atol=1e-9):
        raise DataError(f"class frequencies must be non-negative and sum to 1, got {freqs.sum()}")
    if not 1 <= k <= freqs.size:
        raise DataError(f"k must be in [1, {freqs.size}], got {k}")
    if np.all(freqs == freqs[0]):
        return k / freqs.size
    return float(freqs[:k].sum())


def mean_std(values):
    """Mean and sample standard deviation (0 for a single value)."""
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise DataError("mean of an empty sample is undefined")
    std = float(np.std(data, ddof=1)) if data.size > 1 else 0.0
    return float(np.mean(data)), std
