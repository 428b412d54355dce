"""Frozen reference desk configuration.

The manifest mirrors ``data/manifests/desk.json``.
"""

from src.data.synthetic import SyntheticSpec
from src.model.schemas import NetworkManifest
from src.model.training import TrainConfig

DESK_MANIFEST = NetworkManifest.model_validate(
    {
        "name": "desk",
        "input_shape": [1, 16, 16],
        "layers": [
            {"name": "conv_1", "kind": "conv2d", "filters": 8, "kernel_size": 3, "stride": 1, "padding": 1},
            {"name": "relu_1", "kind": "relu"},
            {"name": "pool_1", "kind": "maxpool", "window": 2, "stride": 2},
            {"name": "conv_2", "kind": "conv2d", "filters": 16, "kernel_size": 3, "stride": 1, "padding": 1},
            {"name": "relu_2", "kind": "relu"},
            {"name": "pool_2", "kind": "maxpool", "window": 2, "stride": 2},
            {"name": "flatten", "kind": "flatten"},
            {"name": "dense_1", "kind": "dense", "units": 64},
            {"name": "relu_3", "kind": "relu"},
            {"name": "dropout_1", "kind": "dropout", "rate": 0.5},
            {"name": "dense_2", "kind": "dense", "units": 10},
            {"name": "softmax", "kind": "softmax"},
        ],
    }
)

# Noise keeps the baseline below the ceiling so first-layer knockouts register.
DESK_SYNTHETIC = SyntheticSpec(classes=10, per_class=200, test_per_class=100, image_size=16, noise=0.35)

DESK_TRAINING = TrainConfig(epochs=5, batch_size=32, learning_rate=0.05, momentum=0.9, seed=0)

DESK_DATA_SEED = 0
