"""Reverse-mode gradients for the layer kinds in ``src.tensor.ops``."""

from dataclasses import dataclass, field

import numpy as np

from src.errors import ShapeError
from src.tensor.ops import (
    ConvCache,
    DenseCache,
    DropoutCache,
    FlattenCache,
    MaxPoolCache,
    ReluCache,
)


@dataclass
class LayerGradients:
    """Gradients of one layer: named parameter grads plus the input grad."""

    input_grad: np.ndarray
    param_grads: dict = field(default_factory=dict)


def _cast(array, like):
    return array.astype(np.result_type(like, np.float32), copy=False)


def conv2d_backward(cache, upstream):
    windows = cache.windows
    kernel = cache.kernel
    n, c, h, w = cache.input_shape
    f, _, kh, kw = kernel.shape
    stride, padding = cache.stride, cache.padding
    out_h, out_w = windows.shape[2], windows.shape[3]
    if upstream.shape != (n, f, out_h, out_w):
        raise ShapeError(
            f"conv2d upstream grad {upstream.shape} does not match {(n, f, out_h, out_w)}"
        )
    grad = upstream.astype(np.float64)

    weight_grad = np.tensordot(grad, windows.astype(np.float64), axes=([0, 2, 3], [0, 2, 3]))
    bias_grad = grad.sum(axis=(0, 2, 3))

    padded = np.zeros((n, c, h + 2 * padding, w + 2 * padding), dtype=np.float64)
    kernel64 = kernel.astype(np.float64)
    row_end = stride * (out_h - 1) + 1
    col_end = stride * (out_w - 1) + 1
    for i in range(kh):
        for j in range(kw):
            # (N, H', W', C) contribution of kernel tap (i, j)
            tap = np.tensordot(grad, kernel64[:, :, i, j], axes=([1], [0]))
            padded[:, :, i : i + row_end : stride, j : j + col_end : stride] += tap.transpose(
                0, 3, 1, 2
            )
    input_grad = padded[:, :, padding : padding + h, padding : padding + w]

    return LayerGradients(
        input_grad=_cast(np.ascontiguousarray(input_grad), windows),
        param_grads={
            "weights": _cast(weight_grad, kernel),
            "biases": _cast(bias_grad, kernel),
        },
    )


def dense_backward(cache, upstream):
    inputs, weight = cache.inputs, cache.weight
    if upstream.shape != (inputs.shape[0], weight.shape[0]):
        raise ShapeError(
            f"dense upstream grad {upstream.shape} does not match "
            f"{(inputs.shape[0], weight.shape[0])}"
        )
    grad = upstream.astype(np.float64)
    return LayerGradients(
        input_grad=_cast(grad @ weight.astype(np.float64), inputs),
        param_grads={
            "weights": _cast(grad.T @ inputs.astype(np.float64), weight),
            "biases": _cast(grad.sum(axis=0), weight),
        },
    )


def relu_backward(cache, upstream):
    if upstream.shape != cache.mask.shape:
        raise ShapeError(f"relu upstream grad {upstream.shape} != {cache.mask.shape}")
    return LayerGradients(input_grad=np.where(cache.mask, upstream, 0).astype(upstream.dtype))


def maxpool_backward(cache, upstream):
    n, c, _, _ = cache.input_shape
    out_h, out_w = cache.argmax.shape[2], cache.argmax.shape[3]
    if upstream.shape != (n, c, out_h, out_w):
        raise ShapeError(
            f"maxpool upstream grad {upstream.shape} does not match {(n, c, out_h, out_w)}"
        )
    grad = np.zeros(cache.input_shape, dtype=np.float64)
    ni, ci, hi, wi = np.indices((n, c, out_h, out_w))
    rows = hi * cache.stride + cache.argmax // cache.window
    cols = wi * cache.stride + cache.argmax % cache.window
    np.add.at(grad, (ni, ci, rows, cols), upstream.astype(np.float64))
    return LayerGradients(input_grad=_cast(grad, upstream))


def dropout_backward(cache, upstream):
    if upstream.shape != cache.mask.shape:
        raise ShapeError(f"dropout upstream grad {upstream.shape} != {cache.mask.shape}")
    grad = upstream.astype(np.float64) * cache.mask * cache.scale
    return LayerGradients(input_grad=_cast(grad, upstream))


def flatten_backward(cache, upstream):
    return LayerGradients(input_grad=upstream.reshape(cache.input_shape))


_BACKWARD = {
    "conv2d": (ConvCache, conv2d_backward),
    "dense": (DenseCache, dense_backward),
    "relu": (ReluCache, relu_backward),
    "maxpool": (MaxPoolCache, maxpool_backward),
    "dropout": (DropoutCache, dropout_backward),
    "flatten": (FlattenCache, flatten_backward),
}


def backward(kind, cache, upstream):
    """Dispatch to the backward pass for `kind`, checking the cache matches."""
    if kind not in _BACKWARD:
        raise ShapeError(f"no backward pass for layer kind {kind!r}")
    cache_type, fn = _BACKWARD[kind]
    if cache is None:
        raise ShapeError(f"missing forward cache for {kind} backward")
    if not isinstance(cache, cache_type):
        raise ShapeError(
            f"{kind} backward received a {getattr(cache, 'kind', type(cache).__name__)} cache"
        )
    return fn(cache, upstream)
