"""Deterministic synthetic image classes: an oriented bar plus a placed blob per class."""

import logging
import math

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.data.dataset import Dataset, DatasetSplit
from src.errors import DatasetFormatError
from src.rng import make_rng

logger = logging.getLogger(__name__)


class SyntheticSpec(BaseModel):
    """Shape of a generated dataset; train and test counts are per class."""

    classes: int = Field(default=10, ge=2)
    per_class: int = Field(default=200, ge=1)
    test_per_class: int | None = Field(default=None, ge=1)
    image_size: int = Field(default=16, ge=4)
    noise: float = Field(default=0.1, ge=0.0)

    @model_validator(mode="after")
    def _default_test_count(self):
        if self.test_per_class is None:
            self.test_per_class = max(1, self.per_class // 4)
        return self


def class_template(index, classes, size):
    """Noise-free template for class `index`, values in [0, 1]."""
    coords = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    yy, xx = np.meshgrid(coords, coords, indexing="ij")

    angle = math.pi * index / classes
    distance = np.abs(xx * math.sin(angle) - yy * math.cos(angle))
    bar = np.exp(-(distance**2) / (2 * (size / 16.0) ** 2))

    ring = 2 * math.pi * index / classes
    radius = size / 4.0
    cy, cx = radius * math.sin(ring), radius * math.cos(ring)
    blob = np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * (size / 10.0) ** 2))

    return np.clip(0.6 * bar + 0.8 * blob, 0.0, 1.0)


def _generate(templates, per_class, noise, rng):
    classes, size = templates.shape[0], templates.shape[1]
    labels = np.tile(np.arange(classes, dtype=np.int64), per_class)
    images = templates[labels]
    if noise > 0:
        images = images + noise * rng.standard_normal(images.shape)
    images = np.clip(images, 0.0, 1.0).astype(np.float32)
    return Dataset(images.reshape(-1, 1, size, size), labels, classes)


def synth_dataset(spec, seed=0):
    """Generate a train/test split as a pure function of (spec, seed).

    Sample i carries label i mod classes, so both splits are balanced.
    """
    if not isinstance(spec, SyntheticSpec):
        spec = SyntheticSpec.model_validate(spec)
    if spec.image_size < 4 or spec.classes < 2:
        raise DatasetFormatError(f"degenerate synthetic spec: {spec}")
    templates = np.stack(
        [class_template(c, spec.classes, spec.image_size) for c in range(spec.classes)]
    )
    rng = make_rng(seed)
    train = _generate(templates, spec.per_class, spec.noise, rng)
    test = _generate(templates, spec.test_per_class, spec.noise, rng)
    logger.info(
        "generated %d train / %d test synthetic images (%d classes, noise %.3f)",
        len(train),
        len(test),
        spec.classes,
        spec.noise,
    )
    return DatasetSplit(train, test)
