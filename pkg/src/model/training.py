"""Minibatch SGD training for manifest-defined networks."""

import csv
import logging
import math
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field

from src.errors import DataError, TrainingDivergedError
from src.model.network import forward
from src.model.schemas import infer_shapes
from src.rng import make_rng
from src.tensor.backward import backward
from src.tensor.ops import softmax_cross_entropy
from src.tensor.optim import sgd_update

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    """Hyperparameters of one training run."""

    epochs: int = Field(default=5, ge=0)
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=0.05, ge=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)


class EpochStats(BaseModel):
    epoch: int
    loss: float
    train_top1: float


def _gradients(caches, logit_grad):
    grads = {}
    upstream = logit_grad
    for spec, cache in reversed(caches):
        result = backward(spec.kind, cache, upstream)
        if spec.parameterized:
            grads[f"{spec.name}/weights"] = result.param_grads["weights"]
            grads[f"{spec.name}/biases"] = result.param_grads["biases"]
        upstream = result.input_grad
    return grads


def train(network, dataset, config=None):
    """Train a private copy of `network`; returns (trained network, history).

    The input network is never modified. With identical seeds the result is
    bit-identical on the same platform.
    """
    config = config or TrainConfig()
    if dataset.images.shape[0] == 0:
        raise DataError("cannot train on an empty dataset")
    classes = infer_shapes(network.manifest)[-1][0]
    if dataset.labels.max() >= classes:
        raise DataError(f"dataset labels exceed the network's {classes} output classes")

    trained = network.copy()
    rng = make_rng(config.seed)
    images = dataset.images.astype(np.float32, copy=False)
    labels = dataset.labels
    count = images.shape[0]
    params = {
        f"{name}/{part}": getattr(trained.params[name], part)
        for name in trained.parameterized_layers()
        for part in ("weights", "biases")
    }
    velocity = {}
    history = []

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(count)
        total_loss = 0.0
        hits = 0
        for start in range(0, count, config.batch_size):
            index = order[start : start + config.batch_size]
            logits, caches = forward(trained, images[index], training=True, rng=rng)
            loss, logit_grad = softmax_cross_entropy(logits, labels[index])
            if not math.isfinite(loss):
                raise TrainingDivergedError(
                    f"loss became {loss} at epoch {epoch}, batch starting at {start}; "
                    f"try a smaller learning rate than {config.learning_rate}"
                )
            total_loss += loss * index.size
            hits += int(np.sum(logits.argmax(axis=1) == labels[index]))
            if config.learning_rate == 0:
                continue
            grads = _gradients(caches, logit_grad)
            params, velocity = sgd_update(
                params, grads, config.learning_rate, config.momentum, velocity
            )
            for key, value in params.items():
                name, part = key.split("/")
                setattr(trained.params[name], part, value)
        stats = EpochStats(epoch=epoch, loss=total_loss / count, train_top1=hits / count)
        history.append(stats)
        logger.info("epoch %d: loss %.4f, train top-1 %.4f", epoch, stats.loss, stats.train_top1)
    return trained, history


def write_history_csv(history, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["epoch", "loss", "train_top1"])
        for row in history:
            writer.writerow([row.epoch, repr(row.loss), repr(row.train_top1)])
    return path
