"""Tests for knockout and Gaussian treatments."""

from collections import Counter

import numpy as np
import pytest


def _toy_network():
    """Dense layer with 10 weights and 2 biases, all distinct and non-zero."""
    from src.model.network import LayerParams, Network
    from src.model.schemas import NetworkManifest

    manifest = NetworkManifest.model_validate(
        {
            "input_shape": [5, 1, 1],
            "layers": [
                {"name": "flat", "kind": "flatten"},
                {"name": "fc", "kind": "dense", "units": 2},
            ],
        }
    )
    weights = np.arange(1, 11, dtype=np.float32).reshape(2, 5)
    biases = np.array([0.5, -0.5], dtype=np.float32)
    return Network(manifest, {"fc": LayerParams(weights, biases)})


def _others_untouched(before, after, layer):
    for name in before.parameterized_layers():
        if name == layer:
            continue
        assert np.array_equal(before.params[name].weights, after.params[name].weights)
        assert np.array_equal(before.params[name].biases, after.params[name].biases)


class TestSynapseKnockout:
    """Test synapse knockout."""

    def test_p_zero_is_identity(self, trained_desk):
        from src.perturb.treatments import synapse_knockout
        from src.rng import make_rng

        out, receipt = synapse_knockout(trained_desk, "conv_2", 0.0, make_rng(1))
        for (_, a), (_, b) in zip(trained_desk.named_tensors(), out.named_tensors(), strict=True):
            assert np.array_equal(a.view(np.uint32), b.view(np.uint32))
        assert receipt.zeroed_weights == receipt.zeroed_biases == 0

    def test_p_one_zeroes_layer(self, trained_desk):
        from src.perturb.treatments import synapse_knockout
        from src.rng import make_rng

        out, _ = synapse_knockout(trained_desk, "dense_1", 1.0, make_rng(1))
        assert not out.params["dense_1"].weights.any()
        assert not out.params["dense_1"].biases.any()
        _others_untouched(trained_desk, out, "dense_1")

    def test_half_of_toy_layer(self):
        from src.perturb.treatments import synapse_knockout
        from src.rng import make_rng

        network = _toy_network()
        out, receipt = synapse_knockout(network, "fc", 0.5, make_rng(7))
        weights = out.params["fc"].weights
        assert int(np.sum(weights == 0)) == 5
        assert int(np.sum(out.params["fc"].biases == 0)) == 1
        assert (receipt.zeroed_weights, receipt.zeroed_biases) == (5, 1)
        survivors = Counter(weights[weights != 0].tolist())
        assert not survivors - Counter(network.params["fc"].weights.ravel().tolist())

    def test_survivors_keep_their_positions(self, trained_desk):
        from src.perturb.treatments import synapse_knockout
        from src.rng import make_rng

        out, _ = synapse_knockout(trained_desk, "conv_1", 0.3, make_rng(4))
        before, after = trained_desk.params["conv_1"].weights, out.params["conv_1"].weights
        kept = after != 0
        assert np.array_equal(after[kept], before[kept])
        assert int((~kept).sum()) == int(np.floor(0.3 * before.size + 0.5))

    def test_input_not_modified(self, trained_desk):
        from src.perturb.treatments import synapse_knockout
        from src.rng import make_rng

        before = trained_desk.params["conv_1"].weights.copy()
        synapse_knockout(trained_desk, "conv_1", 1.0, make_rng(0))
        assert np.array_equal(trained_desk.params["conv_1"].weights, before)

    def test_bad_proportion(self, trained_desk):
        from src.errors import PerturbationError
        from src.perturb.treatments import synapse_knockout
        from src.rng import make_rng

        with pytest.raises(PerturbationError):
            synapse_knockout(trained_desk, "conv_1", 1.5, make_rng(0))


class TestNodeKnockout:
    """Test node knockout."""

    def test_half_of_eight_filters(self, trained_desk):
        from src.perturb.treatments import node_knockout
        from src.rng import make_rng

        out, receipt = node_knockout(trained_desk, "conv_1", 0.5, make_rng(3))
        after = out.params["conv_1"]
        before = trained_desk.params["conv_1"]
        dead = [f for f in range(8) if not after.weights[f].any()]
        assert len(dead) == 4
        for f in range(8):
            if f in dead:
                assert after.biases[f] == 0
            else:
                assert np.array_equal(after.weights[f], before.weights[f])
                assert after.biases[f] == before.biases[f]
        assert receipt.zeroed_weights == 4 * 9
        assert receipt.zeroed_biases == 4

    def test_p_one_gives_zero_layer_output(self, trained_desk, small_split):
        from src.perturb.treatments import node_knockout
        from src.rng import make_rng
        from src.tensor.ops import conv2d_forward

        out, _ = node_knockout(trained_desk, "conv_1", 1.0, make_rng(0))
        layer = out.params["conv_1"]
        activations, _ = conv2d_forward(small_split.test.images[:4], layer.weights, layer.biases, 1, 1)
        assert not activations.any()

    def test_same_count_as_synapse_knockout(self, trained_desk):
        from src.perturb.treatments import node_knockout, synapse_knockout
        from src.rng import make_rng

        _, node = node_knockout(trained_desk, "conv_2", 0.5, make_rng(1))
        _, synapse = synapse_knockout(trained_desk, "conv_2", 0.5, make_rng(1))
        assert node.zeroed_weights + node.zeroed_biases == synapse.zeroed_weights + synapse.zeroed_biases

    @pytest.mark.parametrize(
        ("p", "node_total", "synapse_total"), [(0.3, 20, 24), (0.5, 40, 40), (0.7, 60, 56)]
    )
    def test_counts_follow_rounding_when_p_times_nodes_is_fractional(
        self, trained_desk, p, node_total, synapse_total
    ):
        from src.perturb.treatments import node_knockout, synapse_knockout
        from src.rng import make_rng

        perturbed, node = node_knockout(trained_desk, "conv_1", p, make_rng(2))
        _, synapse = synapse_knockout(trained_desk, "conv_1", p, make_rng(2))
        assert node.zeroed_weights + node.zeroed_biases == node_total
        assert synapse.zeroed_weights + synapse.zeroed_biases == synapse_total
        dead = np.all(perturbed.params["conv_1"].weights == 0, axis=(1, 2, 3))
        assert int(dead.sum()) == node.zeroed_biases

    def test_non_parameter_layer(self, trained_desk):
        from src.errors import UnknownLayerError
        from src.perturb.treatments import node_knockout
        from src.rng import make_rng

        with pytest.raises(UnknownLayerError):
            node_knockout(trained_desk, "pool_1", 0.5, make_rng(0))


class TestGaussian:
    """Test Gaussian weight perturbation."""

    def test_m_zero_is_identity(self, trained_desk):
        from src.perturb.treatments import gaussian_perturb
        from src.rng import make_rng

        out, receipt = gaussian_perturb(trained_desk, "dense_1", 0.0, make_rng(2))
        assert np.array_equal(out.params["dense_1"].weights, trained_desk.params["dense_1"].weights)
        assert receipt.weight_delta_std == 0.0

    @pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
    def test_delta_calibration(self, trained_desk, m):
        from src.perturb.treatments import gaussian_perturb
        from src.rng import make_rng

        before = trained_desk.params["dense_1"].weights
        assert before.size >= 10_000
        sigma = float(np.std(before, dtype=np.float64))
        out, receipt = gaussian_perturb(trained_desk, "dense_1", m, make_rng(11))
        deltas = out.params["dense_1"].weights.astype(np.float64) - before
        assert abs(deltas.std() / (m * sigma) - 1.0) < 0.05
        assert abs(receipt.weight_delta_mean) < 0.02 * m * sigma
        assert receipt.weight_delta_std == pytest.approx(deltas.std())
        _others_untouched(trained_desk, out, "dense_1")

    def test_constant_biases_flagged(self, trained_desk):
        from src.perturb.treatments import gaussian_perturb
        from src.rng import make_rng

        network = trained_desk.copy()
        network.params["conv_1"].biases[:] = 0.1
        out, receipt = gaussian_perturb(network, "conv_1", 2.0, make_rng(0))
        assert np.array_equal(out.params["conv_1"].biases, network.params["conv_1"].biases)
        assert receipt.degenerate == ["biases"]
        assert not np.array_equal(out.params["conv_1"].weights, network.params["conv_1"].weights)

    def test_negative_magnitude(self, trained_desk):
        from src.errors import PerturbationError
        from src.perturb.treatments import gaussian_perturb
        from src.rng import make_rng

        with pytest.raises(PerturbationError):
            gaussian_perturb(trained_desk, "conv_1", -1.0, make_rng(0))


class TestApplyPerturbation:
    """Test spec dispatch and reproducibility."""

    @pytest.mark.parametrize("treatment", ["synapse_knockout", "node_knockout", "gaussian"])
    def test_same_seed_bit_identical(self, trained_desk, treatment):
        from src.perturb.treatments import apply_perturbation

        spec = {"treatment": treatment, "layer": "conv_2", "magnitude": 0.4, "seed": 2**63 + 5}
        a, receipt_a = apply_perturbation(trained_desk, spec)
        b, receipt_b = apply_perturbation(trained_desk, spec)
        assert np.array_equal(a.params["conv_2"].weights, b.params["conv_2"].weights)
        assert receipt_a == receipt_b
        assert receipt_a.seed == 2**63 + 5

    def test_different_seeds_differ(self, trained_desk):
        from src.perturb.treatments import apply_perturbation

        spec = {"treatment": "synapse_knockout", "layer": "conv_2", "magnitude": 0.4}
        _, a = apply_perturbation(trained_desk, {**spec, "seed": 1})
        _, b = apply_perturbation(trained_desk, {**spec, "seed": 2})
        assert a.indices_hash != b.indices_hash

    def test_knockout_magnitude_validated(self):
        from pydantic import ValidationError

        from src.perturb.schemas import PerturbationSpec

        with pytest.raises(ValidationError):
            PerturbationSpec(treatment="node_knockout", layer="conv_1", magnitude=1.2)
        assert PerturbationSpec(treatment="gaussian", layer="conv_1", magnitude=3.0).magnitude == 3.0

    def test_unknown_layer(self, trained_desk):
        from src.errors import UnknownLayerError
        from src.perturb.treatments import apply_perturbation

        with pytest.raises(UnknownLayerError):
            apply_perturbation(
                trained_desk, {"treatment": "gaussian", "layer": "conv_9", "magnitude": 1.0}
            )
