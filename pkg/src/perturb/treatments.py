"""Synapse knockout, node knockout and Gaussian weight mutation.

Every treatment reads the network it is given, never modifies it, and
returns a perturbed copy whose only changed tensors belong to `layer`.
"""

import hashlib
import logging

import numpy as np

from src.errors import PerturbationError
from src.perturb.schemas import PerturbationReceipt, PerturbationSpec
from src.rng import box_muller_normals, make_rng, round_half_up, sample_without_replacement

logger = logging.getLogger(__name__)


def _check_proportion(p):
    if not 0.0 <= p <= 1.0:
        raise PerturbationError(f"knockout proportion must be in [0, 1], got {p}")


def _digest(*arrays):
    h = hashlib.sha256()
    for array in arrays:
        h.update(np.ascontiguousarray(array).tobytes())
    return h.hexdigest()


def _zero_random(tensor, p, rng):
    """Zero round(p * size) uniformly chosen entries of a copy; returns (copy, indices)."""
    count = round_half_up(p * tensor.size)
    chosen = sample_without_replacement(rng, tensor.size, count)
    out = tensor.copy()
    out.reshape(-1)[chosen] = 0.0
    return out, chosen


def synapse_knockout(network, layer, p, rng):
    """Zero a proportion `p` of the layer's weights and, separately, of its biases."""
    _check_proportion(p)
    params = network.layer_params(layer)
    weights, weight_idx = _zero_random(params.weights, p, rng)
    biases, bias_idx = _zero_random(params.biases, p, rng)

    perturbed = network.copy()
    perturbed.params[layer].weights = weights
    perturbed.params[layer].biases = biases
    receipt = PerturbationReceipt(
        treatment="synapse_knockout",
        layer=layer,
        magnitude=p,
        zeroed_weights=int(weight_idx.size),
        zeroed_biases=int(bias_idx.size),
        indices_hash=_digest(weight_idx, bias_idx),
    )
    logger.debug("synapse knockout %s p=%s: %d weights, %d biases", layer, p, weight_idx.size, bias_idx.size)
    return perturbed, receipt


def node_knockout(network, layer, p, rng):
    """Zero all incoming weights and the bias of a proportion `p` of output units.

    For conv2d a node is one filter (its full kernel slice); for dense one
    output unit (its weight row).
    """
    _check_proportion(p)
    params = network.layer_params(layer)
    nodes = params.weights.shape[0]
    count = round_half_up(p * nodes)
    chosen = np.sort(sample_without_replacement(rng, nodes, count))

    weights = params.weights.copy()
    biases = params.biases.copy()
    weights[chosen] = 0.0
    biases[chosen] = 0.0

    perturbed = network.copy()
    perturbed.params[layer].weights = weights
    perturbed.params[layer].biases = biases
    fan_in = int(np.prod(params.weights.shape[1:]))
    receipt = PerturbationReceipt(
        treatment="node_knockout",
        layer=layer,
        magnitude=p,
        zeroed_weights=int(count * fan_in),
        zeroed_biases=int(count),
        indices_hash=_digest(chosen),
    )
    logger.debug("node knockout %s p=%s: %d of %d nodes", layer, p, count, nodes)
    return perturbed, receipt


def gaussian_perturb(network, layer, m, rng):
    """Add N(0, (m * sigma)^2) to every weight and bias of the layer.

    sigma is the population standard deviation of the unperturbed weight
    tensor (for weights) or bias vector (for biases). Normals are drawn in a
    fixed order: weights row-major, then biases.
    """
    if not m >= 0.0:
        raise PerturbationError(f"gaussian magnitude must be >= 0, got {m}")
    params = network.layer_params(layer)
    sigma_w = float(np.std(params.weights, dtype=np.float64))
    sigma_b = float(np.std(params.biases, dtype=np.float64))
    normals = box_muller_normals(rng, params.weights.size + params.biases.size)

    degenerate = []
    perturbed = network.copy()
    summaries = {}
    for part, sigma, z in (
        ("weights", sigma_w, normals[: params.weights.size]),
        ("biases", sigma_b, normals[params.weights.size :]),
    ):
        original = getattr(params, part)
        if m > 0 and sigma == 0.0:
            degenerate.append(part)
            logger.warning("layer %s %s have sigma 0; gaussian deltas are zero", layer, part)
        if m == 0.0 or sigma == 0.0:
            updated = original.copy()
        else:
            delta = (m * sigma) * z.reshape(original.shape)
            updated = (original.astype(np.float64) + delta).astype(np.float32)
        setattr(perturbed.params[layer], part, updated)
        applied = updated.astype(np.float64) - original.astype(np.float64)
        summaries[part] = (float(applied.mean()), float(applied.std()), applied)

    receipt = PerturbationReceipt(
        treatment="gaussian",
        layer=layer,
        magnitude=m,
        weight_delta_mean=summaries["weights"][0],
        weight_delta_std=summaries["weights"][1],
        bias_delta_mean=summaries["biases"][0],
        bias_delta_std=summaries["biases"][1],
        degenerate=degenerate,
        indices_hash=_digest(summaries["weights"][2], summaries["biases"][2]),
    )
    return perturbed, receipt


TREATMENTS = {
    "synapse_knockout": synapse_knockout,
    "node_knockout": node_knockout,
    "gaussian": gaussian_perturb,
}


def apply_perturbation(network, spec):
    """Apply a PerturbationSpec with a generator seeded from ``spec.seed``."""
    if not isinstance(spec, PerturbationSpec):
        spec = PerturbationSpec.model_validate(spec)
    perturbed, receipt = TREATMENTS[spec.treatment](
        network, spec.layer, spec.magnitude, make_rng(spec.seed)
    )
    return perturbed, receipt.model_copy(update={"seed": spec.seed})
