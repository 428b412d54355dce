"""Network container, initialization and forward inference."""

import logging
from dataclasses import dataclass, field

import numpy as np

from src.config.settings import get_eval_batch_size
from src.errors import ManifestError, ShapeError, UnknownLayerError
from src.model.schemas import NetworkManifest, infer_shapes, param_shapes
from src.rng import make_rng
from src.stats.metrics import top_k_accuracy
from src.tensor.ops import (
    check_finite,
    conv2d_forward,
    dense_forward,
    dropout_train,
    flatten_forward,
    maxpool_forward,
    relu_forward,
    softmax,
)

logger = logging.getLogger(__name__)


@dataclass
class LayerParams:
    weights: np.ndarray
    biases: np.ndarray

    def copy(self):
        return LayerParams(self.weights.copy(), self.biases.copy())


@dataclass
class Network:
    """A manifest plus its named parameter tensors (float32)."""

    manifest: NetworkManifest
    params: dict[str, LayerParams] = field(default_factory=dict)

    def __post_init__(self):
        expected = param_shapes(self.manifest)
        if set(expected) != set(self.params):
            raise ManifestError(
                f"parameters {sorted(self.params)} do not match layers {sorted(expected)}"
            )
        for name, (weight_shape, bias_shape) in expected.items():
            layer = self.params[name]
            if layer.weights.shape != weight_shape or layer.biases.shape != bias_shape:
                raise ManifestError(
                    f"layer {name!r} parameters have shapes {layer.weights.shape}/"
                    f"{layer.biases.shape}, manifest implies {weight_shape}/{bias_shape}"
                )

    @property
    def layers(self):
        return self.manifest.layers

    def copy(self):
        return Network(
            self.manifest.model_copy(deep=True),
            {name: layer.copy() for name, layer in self.params.items()},
        )

    def parameterized_layers(self):
        return [spec.name for spec in self.manifest.layers if spec.parameterized]

    def layer_params(self, name):
        """Parameters of a named layer; raises UnknownLayerError otherwise."""
        spec = self.manifest.layer(name)
        if spec is None:
            raise UnknownLayerError(
                f"unknown layer {name!r}; layers are {[s.name for s in self.manifest.layers]}"
            )
        if not spec.parameterized:
            raise UnknownLayerError(f"layer {name!r} ({spec.kind}) has no parameters")
        return self.params[name]

    def named_tensors(self):
        """(tensor name, array) pairs in network order, weights before biases."""
        pairs = []
        for name in self.parameterized_layers():
            pairs.append((f"{name}_W", self.params[name].weights))
            pairs.append((f"{name}_b", self.params[name].biases))
        return pairs


def build_network(manifest, seed=0):
    """Create a freshly initialized network: He-uniform weights, zero biases."""
    if not isinstance(manifest, NetworkManifest):
        manifest = NetworkManifest.model_validate(manifest)
    infer_shapes(manifest)
    rng = make_rng(seed)
    params = {}
    for name, (weight_shape, bias_shape) in param_shapes(manifest).items():
        fan_in = int(np.prod(weight_shape[1:]))
        limit = np.sqrt(6.0 / fan_in)
        weights = rng.uniform(-limit, limit, size=weight_shape).astype(np.float32)
        params[name] = LayerParams(weights, np.zeros(bias_shape, dtype=np.float32))
    logger.debug("built network %s with layers %s", manifest.name, list(params))
    return Network(manifest, params)


def forward(network, batch, training=False, rng=None):
    """Run every layer except softmax; returns (logits, [(spec, cache), ...]).

    Dropout is only active when `training` is set, and then needs `rng`.
    """
    out = batch
    caches = []
    for spec in network.manifest.layers:
        if spec.kind == "conv2d":
            layer = network.params[spec.name]
            out, cache = conv2d_forward(
                out, layer.weights, layer.biases, spec.stride or 1, spec.padding or 0
            )
        elif spec.kind == "dense":
            layer = network.params[spec.name]
            out, cache = dense_forward(out, layer.weights, layer.biases)
        elif spec.kind == "relu":
            out, cache = relu_forward(out)
        elif spec.kind == "maxpool":
            out, cache = maxpool_forward(out, spec.window, spec.stride or spec.window)
        elif spec.kind == "flatten":
            out, cache = flatten_forward(out)
        elif spec.kind == "dropout":
            if not training:
                continue
            out, cache = dropout_train(out, spec.rate, rng)
        else:  # softmax is folded into the loss
            continue
        caches.append((spec, cache))
    return out, caches


def _check_batch(network, batch):
    expected = tuple(network.manifest.input_shape)
    if batch.ndim != 4 or tuple(batch.shape[1:]) != expected:
        raise ShapeError(f"batch shape {batch.shape} does not match input [N, {', '.join(map(str, expected))}]")


def predict(network, batch, batch_size=None):
    """Pre-softmax logits for a (N, C, H, W) batch, evaluated in fixed chunks.

    Raises ShapeError when any logit is NaN or Inf.
    """
    batch = np.asarray(batch, dtype=np.float32)
    _check_batch(network, batch)
    batch_size = batch_size or get_eval_batch_size()
    chunks = [
        forward(network, batch[start : start + batch_size])[0]
        for start in range(0, batch.shape[0], batch_size)
    ]
    if not chunks:
        classes = infer_shapes(network.manifest)[-1][0]
        return np.zeros((0, classes), dtype=np.float32)
    logits = np.concatenate(chunks, axis=0)
    check_finite(logits, f"{network.manifest.name} logits")
    return logits


def predict_proba(network, batch, batch_size=None):
    return softmax(predict(network, batch, batch_size))


def evaluate(network, dataset, ks=(1, 5)):
    """Top-k accuracy of the network on a dataset for each k in `ks`."""
    logits = predict(network, dataset.images)
    return {k: top_k_accuracy(logits, dataset.labels, k) for k in ks}
