"""Dense tensor kernels: forward, backward and the optimizer step."""

from src.tensor.backward import LayerGradients, backward
from src.tensor.ops import (
    conv2d_forward,
    dense_forward,
    dropout_train,
    maxpool_forward,
    relu,
    softmax,
    softmax_cross_entropy,
)
from src.tensor.optim import sgd_update

__all__ = [
    "LayerGradients",
    "backward",
    "conv2d_forward",
    "dense_forward",
    "dropout_train",
    "maxpool_forward",
    "relu",
    "sgd_update",
    "softmax",
    "softmax_cross_entropy",
]
