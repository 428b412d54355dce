"""Shared test fixtures."""

import numpy as np
import pytest


@pytest.fixture
def tiny_manifest():
    """Small conv -> pool -> dense network over 1x6x6 inputs, 4 classes."""
    from src.model.schemas import NetworkManifest

    return NetworkManifest.model_validate(
        {
            "name": "tiny",
            "input_shape": [1, 6, 6],
            "layers": [
                {"name": "conv_a", "kind": "conv2d", "filters": 2, "kernel_size": 3, "padding": 1},
                {"name": "relu_a", "kind": "relu"},
                {"name": "pool_a", "kind": "maxpool", "window": 2},
                {"name": "flatten", "kind": "flatten"},
                {"name": "dense_a", "kind": "dense", "units": 4},
                {"name": "softmax", "kind": "softmax"},
            ],
        }
    )


@pytest.fixture
def tiny_network(tiny_manifest):
    from src.model.network import build_network

    return build_network(tiny_manifest, seed=3)


@pytest.fixture
def tiny_dataset():
    """12 random 1x6x6 images, labels cycling through 4 classes."""
    from src.data.dataset import Dataset

    rng = np.random.default_rng(11)
    images = rng.random((12, 1, 6, 6)).astype(np.float32)
    labels = np.arange(12, dtype=np.int64) % 4
    return Dataset(images, labels, 4)


@pytest.fixture(scope="session")
def small_split():
    """Balanced synthetic 10-class split at desk image size."""
    from src.data.synthetic import SyntheticSpec, synth_dataset

    return synth_dataset(SyntheticSpec(classes=10, per_class=40, test_per_class=10), seed=0)


@pytest.fixture(scope="session")
def trained_desk(small_split):
    """Desk network briefly trained on the small split (shared, never mutated)."""
    from src.model.network import build_network
    from src.model.reference import DESK_MANIFEST
    from src.model.training import TrainConfig, train

    network = build_network(DESK_MANIFEST, seed=0)
    trained, _ = train(network, small_split.train, TrainConfig(epochs=2, seed=0))
    return trained


@pytest.fixture
def desk_model_file(trained_desk, tmp_path):
    from src.model.serialization import save

    return save(trained_desk, tmp_path / "desk.ablate")


@pytest.fixture
def clean_env(monkeypatch):
    """Remove every ABLATE_* variable so getters fall back to their defaults."""
    import os

    for name in list(os.environ):
        if name.startswith("ABLATE_"):
            monkeypatch.delenv(name, raising=False)
    return monkeypatch
