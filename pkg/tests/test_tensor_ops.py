"""Tests for forward kernels against direct loop oracles."""

import math

import numpy as np
import pytest


def conv_oracle(x, kernel, bias, stride, padding):
    n, c, h, w = x.shape
    f, _, kh, kw = kernel.shape
    padded = np.pad(x.astype(np.float64), ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    out_h = (h + 2 * padding - kh) // stride + 1
    out_w = (w + 2 * padding - kw) // stride + 1
    out = np.zeros((n, f, out_h, out_w))
    for b in range(n):
        for o in range(f):
            for i in range(out_h):
                for j in range(out_w):
                    total = float(bias[o])
                    for ch in range(c):
                        for u in range(kh):
                            for v in range(kw):
                                total += padded[b, ch, i * stride + u, j * stride + v] * kernel[o, ch, u, v]
                    out[b, o, i, j] = total
    return out


def pool_oracle(x, window, stride):
    n, c, h, w = x.shape
    out_h = (h - window) // stride + 1
    out_w = (w - window) // stride + 1
    out = np.zeros((n, c, out_h, out_w), dtype=x.dtype)
    for b in range(n):
        for ch in range(c):
            for i in range(out_h):
                for j in range(out_w):
                    out[b, ch, i, j] = x[b, ch, i * stride : i * stride + window, j * stride : j * stride + window].max()
    return out


class TestConv2d:
    """Test convolution forward."""

    def test_identity_kernel(self):
        from src.tensor.ops import conv2d_forward

        x = np.array([[[[0.75]]]], dtype=np.float32)
        out, _ = conv2d_forward(x, np.ones((1, 1, 1, 1), np.float32), np.zeros(1, np.float32))
        assert out.shape == (1, 1, 1, 1)
        assert out[0, 0, 0, 0] == np.float32(0.75)

    def test_zero_kernel_gives_bias(self):
        from src.tensor.ops import conv2d_forward

        x = np.random.default_rng(0).random((2, 3, 5, 5)).astype(np.float32)
        out, _ = conv2d_forward(
            x, np.zeros((2, 3, 3, 3), np.float32), np.array([1.5, -2.0], np.float32), padding=1
        )
        assert np.all(out[:, 0] == np.float32(1.5))
        assert np.all(out[:, 1] == np.float32(-2.0))

    def test_matches_loop_oracle(self):
        from src.tensor.ops import conv2d_forward

        rng = np.random.default_rng(1)
        x = rng.standard_normal((1, 1, 4, 4)).astype(np.float32)
        k = rng.standard_normal((1, 1, 3, 3)).astype(np.float32)
        b = rng.standard_normal(1).astype(np.float32)
        out, _ = conv2d_forward(x, k, b)
        assert out.shape == (1, 1, 2, 2)
        np.testing.assert_allclose(out, conv_oracle(x, k, b, 1, 0), rtol=1e-5, atol=1e-6)

    @pytest.mark.parametrize("stride,padding,size", [(1, 1, 6), (2, 0, 7), (2, 1, 5), (3, 0, 6)])
    def test_strides_and_padding(self, stride, padding, size):
        from src.tensor.ops import conv2d_forward

        rng = np.random.default_rng(stride * 10 + padding)
        x = rng.standard_normal((2, 3, size, size)).astype(np.float32)
        k = rng.standard_normal((4, 3, 3, 3)).astype(np.float32)
        b = rng.standard_normal(4).astype(np.float32)
        out, _ = conv2d_forward(x, k, b, stride=stride, padding=padding)
        np.testing.assert_allclose(out, conv_oracle(x, k, b, stride, padding), rtol=1e-5, atol=1e-5)

    def test_float32_stays_float32(self):
        from src.tensor.ops import conv2d_forward

        x = np.ones((1, 1, 3, 3), np.float32)
        out, _ = conv2d_forward(x, np.ones((1, 1, 3, 3), np.float32), np.zeros(1, np.float32))
        assert out.dtype == np.float32

    def test_channel_mismatch(self):
        from src.errors import ShapeError
        from src.tensor.ops import conv2d_forward

        with pytest.raises(ShapeError, match="channels"):
            conv2d_forward(np.ones((1, 2, 4, 4)), np.ones((1, 3, 3, 3)), np.zeros(1))

    def test_non_integer_output_extent(self):
        from src.errors import ShapeError
        from src.tensor.ops import conv2d_forward

        with pytest.raises(ShapeError):
            conv2d_forward(np.ones((1, 1, 6, 6)), np.ones((1, 1, 3, 3)), np.zeros(1), stride=2)


class TestMaxPool:
    """Test max pooling forward."""

    def test_single_window(self):
        from src.tensor.ops import maxpool_forward

        out, _ = maxpool_forward(np.array([[[[1.0, 2.0], [3.0, 4.0]]]]), 2, 2)
        assert out.tolist() == [[[[4.0]]]]

    def test_constant_input_ties_to_lowest_index(self):
        from src.tensor.ops import maxpool_forward

        out, cache = maxpool_forward(np.full((1, 2, 4, 4), 3.0), 2, 2)
        assert np.all(out == 3.0)
        assert np.all(cache.argmax == 0)

    def test_matches_loop_oracle(self):
        from src.tensor.ops import maxpool_forward

        x = np.random.default_rng(2).standard_normal((2, 3, 6, 6)).astype(np.float32)
        out, _ = maxpool_forward(x, 2, 2)
        assert np.array_equal(out, pool_oracle(x, 2, 2))

    def test_overlapping_windows(self):
        from src.tensor.ops import maxpool_forward

        x = np.random.default_rng(3).standard_normal((1, 1, 7, 7))
        out, _ = maxpool_forward(x, 3, 2)
        assert np.array_equal(out, pool_oracle(x, 3, 2))

    def test_window_too_large(self):
        from src.errors import ShapeError
        from src.tensor.ops import maxpool_forward

        with pytest.raises(ShapeError):
            maxpool_forward(np.ones((1, 1, 2, 2)), 3, 1)


class TestDense:
    """Test the fully connected forward."""

    def test_identity_weight(self):
        from src.tensor.ops import dense_forward

        x = np.random.default_rng(4).standard_normal((3, 5)).astype(np.float32)
        out, _ = dense_forward(x, np.eye(5, dtype=np.float32), np.zeros(5, np.float32))
        assert np.array_equal(out, x)

    def test_zero_input_gives_bias(self):
        from src.tensor.ops import dense_forward

        bias = np.array([0.5, -1.0, 2.0], np.float32)
        out, _ = dense_forward(np.zeros((4, 2), np.float32), np.ones((3, 2), np.float32), bias)
        assert np.all(out == bias)

    def test_matches_loop_oracle(self):
        from src.tensor.ops import dense_forward

        rng = np.random.default_rng(5)
        x = rng.standard_normal((2, 3))
        w = rng.standard_normal((4, 3))
        b = rng.standard_normal(4)
        out, _ = dense_forward(x, w, b)
        for i in range(2):
            for u in range(4):
                expected = b[u] + sum(x[i, d] * w[u, d] for d in range(3))
                assert out[i, u] == pytest.approx(expected, rel=1e-12)

    def test_width_mismatch(self):
        from src.errors import ShapeError
        from src.tensor.ops import dense_forward

        with pytest.raises(ShapeError):
            dense_forward(np.ones((2, 3)), np.ones((4, 5)), np.zeros(4))


class TestActivationsAndLoss:
    """Test relu, dropout, softmax and cross-entropy."""

    def test_relu(self):
        from src.tensor.ops import relu

        assert relu(np.array([-1.0, 0.0, 2.0])).tolist() == [0.0, 0.0, 2.0]

    def test_dropout_rate_zero_is_identity(self):
        from src.rng import make_rng
        from src.tensor.ops import dropout_train

        x = np.random.default_rng(6).standard_normal((3, 8)).astype(np.float32)
        out, _ = dropout_train(x, 0.0, make_rng(0))
        assert np.array_equal(out, x)

    def test_dropout_scales_survivors(self):
        from src.rng import make_rng
        from src.tensor.ops import dropout_train

        x = np.ones((100, 100), np.float32)
        out, cache = dropout_train(x, 0.5, make_rng(0))
        assert set(np.unique(out).tolist()) <= {0.0, 2.0}
        assert abs(cache.mask.mean() - 0.5) < 0.02

    def test_dropout_rejects_rate_one(self):
        from src.errors import DataError
        from src.rng import make_rng
        from src.tensor.ops import dropout_train

        with pytest.raises(DataError):
            dropout_train(np.ones(3), 1.0, make_rng(0))

    def test_softmax_rows_sum_to_one(self):
        from src.tensor.ops import softmax

        logits = np.random.default_rng(7).standard_normal((5, 10)) * 30
        np.testing.assert_allclose(softmax(logits).sum(axis=1), 1.0, atol=1e-6)

    def test_uniform_logits_loss_is_log_classes(self):
        from src.tensor.ops import softmax_cross_entropy

        loss, _ = softmax_cross_entropy(np.zeros((4, 10)), np.array([0, 3, 5, 9]))
        assert loss == pytest.approx(math.log(10))

    def test_loss_rejects_bad_labels(self):
        from src.errors import DataError
        from src.tensor.ops import softmax_cross_entropy

        with pytest.raises(DataError):
            softmax_cross_entropy(np.zeros((2, 3)), np.array([0, 3]))

    def test_check_finite(self):
        from src.errors import ShapeError
        from src.tensor.ops import check_finite

        check_finite(np.ones(3), "ok")
        with pytest.raises(ShapeError, match="activations"):
            check_finite(np.array([1.0, np.nan]), "activations")
