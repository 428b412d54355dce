"""Forward kernels for the fixed layer set.

Every kernel returns ``(output, cache)``. Reductions run in float64 and the
output is cast back to the input dtype, so float32 networks stay float32 and
float64 inputs (used for gradient checking) keep full precision.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.errors import DataError, ShapeError


@dataclass(frozen=True)
class ConvCache:
    kind = "conv2d"
    windows: np.ndarray  # (N, C, H', W', kh, kw) view over the padded input
    kernel: np.ndarray
    input_shape: tuple
    stride: int
    padding: int


@dataclass(frozen=True)
class DenseCache:
    kind = "dense"
    inputs: np.ndarray
    weight: np.ndarray


@dataclass(frozen=True)
class ReluCache:
    kind = "relu"
    mask: np.ndarray


@dataclass(frozen=True)
class MaxPoolCache:
    kind = "maxpool"
    argmax: np.ndarray  # flat index inside each window, shape (N, C, H', W')
    input_shape: tuple
    window: int
    stride: int


@dataclass(frozen=True)
class DropoutCache:
    kind = "dropout"
    mask: np.ndarray
    scale: float


@dataclass(frozen=True)
class FlattenCache:
    kind = "flatten"
    input_shape: tuple


def _out_dtype(*arrays):
    dtype = np.result_type(*arrays)
    return dtype if np.issubdtype(dtype, np.floating) else np.dtype(np.float32)


def check_finite(tensor, where):
    """Raise ShapeError when a tensor holds NaN or Inf."""
    if not np.all(np.isfinite(tensor)):
        raise ShapeError(f"non-finite values in {where}")


def conv_output_extent(size, kernel, stride, padding):
    span = size + 2 * padding - kernel
    if span < 0 or span % stride != 0:
        raise ShapeError(
            f"extent {size} with kernel {kernel}, stride {stride}, padding {padding} "
            "does not give an integer output size"
        )
    return span // stride + 1


def conv2d_forward(inputs, kernel, bias, stride=1, padding=0):
    """Cross-correlate a (N, C, H, W) batch with (F, C, kh, kw) filters plus bias."""
    if inputs.ndim != 4 or kernel.ndim != 4:
        raise ShapeError(
            f"conv2d expects 4-D input and kernel, got {inputs.shape} and {kernel.shape}"
        )
    n, c, h, w = inputs.shape
    f, kc, kh, kw = kernel.shape
    if c != kc:
        raise ShapeError(f"conv2d input has {c} channels but kernel expects {kc}")
    if bias.shape != (f,):
        raise ShapeError(f"conv2d bias shape {bias.shape} does not match {f} filters")
    if stride < 1 or padding < 0:
        raise ShapeError(f"invalid stride {stride} or padding {padding}")
    out_h = conv_output_extent(h, kh, stride, padding)
    out_w = conv_output_extent(w, kw, stride, padding)

    padded = inputs
    if padding:
        padded = np.pad(inputs, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(padded, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    windows = windows[:, :, :out_h, :out_w]

    # (N, H', W', F): contract channel and kernel rows/columns
    acc = np.tensordot(
        windows.astype(np.float64),
        kernel.astype(np.float64),
        axes=([1, 4, 5], [1, 2, 3]),
    )
    acc += bias.astype(np.float64)
    out = acc.transpose(0, 3, 1, 2).astype(_out_dtype(inputs, kernel), copy=False)
    cache = ConvCache(windows, kernel, (n, c, h, w), stride, padding)
    return np.ascontiguousarray(out), cache


def maxpool_forward(inputs, window, stride):
    """Max over square windows; ties resolve to the lowest flat index."""
    if inputs.ndim != 4:
        raise ShapeError(f"maxpool expects 4-D input, got {inputs.shape}")
    if window < 1 or stride < 1:
        raise ShapeError(f"invalid window {window} or stride {stride}")
    n, c, h, w = inputs.shape
    if window > h or window > w:
        raise ShapeError(f"pool window {window} larger than input {h}x{w}")
    out_h = (h - window) // stride + 1
    out_w = (w - window) // stride + 1
    windows = sliding_window_view(inputs, (window, window), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride][:, :, :out_h, :out_w]
    flat = windows.reshape(n, c, out_h, out_w, window * window)
    argmax = flat.argmax(axis=-1)
    out = np.take_along_axis(flat, argmax[..., None], axis=-1)[..., 0]
    return np.ascontiguousarray(out), MaxPoolCache(argmax, (n, c, h, w), window, stride)


def dense_forward(inputs, weight, bias):
    """Row vectors times the transposed (U, D) weight, plus bias."""
    if inputs.ndim != 2 or weight.ndim != 2:
        raise ShapeError(
            f"dense expects 2-D input and weight, got {inputs.shape} and {weight.shape}"
        )
    if inputs.shape[1] != weight.shape[1]:
        raise ShapeError(
            f"dense input width {inputs.shape[1]} does not match weight {weight.shape}"
        )
    if bias.shape != (weight.shape[0],):
        raise ShapeError(f"dense bias shape {bias.shape} does not match {weight.shape[0]} units")
    acc = inputs.astype(np.float64) @ weight.astype(np.float64).T
    acc += bias.astype(np.float64)
    out = acc.astype(_out_dtype(inputs, weight), copy=False)
    return out, DenseCache(inputs, weight)


def relu_forward(inputs):
    mask = inputs > 0
    return np.where(mask, inputs, 0).astype(inputs.dtype, copy=False), ReluCache(mask)


def relu(inputs):
    return relu_forward(inputs)[0]


def dropout_train(inputs, rate, rng):
    """Inverted dropout: zero with probability `rate`, scale survivors by 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise DataError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return inputs, DropoutCache(np.ones(inputs.shape, dtype=bool), 1.0)
    mask = rng.random(inputs.shape) >= rate
    scale = 1.0 / (1.0 - rate)
    out = (inputs.astype(np.float64) * mask * scale).astype(inputs.dtype, copy=False)
    return out, DropoutCache(mask, scale)


def flatten_forward(inputs):
    return inputs.reshape(inputs.shape[0], -1), FlattenCache(inputs.shape)


def softmax(logits):
    shifted = logits.astype(np.float64) - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits, labels):
    """Mean cross-entropy over the batch and its gradient with respect to logits."""
    if logits.ndim != 2:
        raise ShapeError(f"logits must be 2-D, got {logits.shape}")
    labels = np.asarray(labels, dtype=np.int64)
    n, classes = logits.shape
    if labels.shape != (n,):
        raise ShapeError(f"expected {n} labels, got shape {labels.shape}")
    if np.any(labels < 0) or np.any(labels >= classes):
        raise DataError(f"labels must lie in [0, {classes})")
    shifted = logits.astype(np.float64) - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(n)
    loss = float(np.mean(log_norm - shifted[rows, labels]))
    grad = np.exp(shifted - log_norm[:, None])
    grad[rows, labels] -= 1.0
    grad /= n
    return loss, grad.astype(_out_dtype(logits), copy=False)
