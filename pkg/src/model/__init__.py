"""Network definition, storage, inference, training and parameter statistics."""

from src.model.network import Network, build_network, evaluate, predict
from src.model.param_stats import DescriptiveStats, layer_param_stats
from src.model.schemas import LayerSpec, NetworkManifest
from src.model.serialization import load, save
from src.model.training import TrainConfig, train

__all__ = [
    "DescriptiveStats",
    "LayerSpec",
    "Network",
    "NetworkManifest",
    "TrainConfig",
    "build_network",
    "evaluate",
    "layer_param_stats",
    "load",
    "predict",
    "save",
    "train",
]
