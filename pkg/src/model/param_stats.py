"""Per-tensor descriptive statistics (size, moments, order statistics)."""

import logging

import numpy as np
from pydantic import BaseModel
from scipy import stats as sps

from src.errors import DegenerateInputError

logger = logging.getLogger(__name__)


class DescriptiveStats(BaseModel):
    """Population-style moments; kurtosis is excess (Fisher)."""

    size: int
    mean: float
    median: float
    sigma: float
    min: float
    max: float
    kurtosis: float | None
    skew: float | None


def describe(values):
    """Descriptive statistics of a flat sample.

    kurtosis and skew are None when the sample has zero variance.
    """
    data = np.asarray(values, dtype=np.float64).ravel()
    if data.size < 2:
        raise DegenerateInputError(f"statistics need at least 2 values, got {data.size}")
    if not np.all(np.isfinite(data)):
        raise DegenerateInputError("statistics input contains NaN or Inf")
    sigma = float(np.std(data))
    if sigma == 0.0:
        logger.warning("constant sample of %d values: kurtosis and skew undefined", data.size)
        kurtosis = skew = None
    else:
        kurtosis = float(sps.kurtosis(data, fisher=True, bias=True))
        skew = float(sps.skew(data, bias=True))
    return DescriptiveStats(
        size=int(data.size),
        mean=float(np.mean(data)),
        median=float(np.median(data)),
        sigma=sigma,
        min=float(np.min(data)),
        max=float(np.max(data)),
        kurtosis=kurtosis,
        skew=skew,
    )


def layer_param_stats(network, layer):
    """Weight and bias statistics of one parameterized layer, reported separately."""
    params = network.layer_params(layer)
    return {"weights": describe(params.weights), "biases": describe(params.biases)}


def network_param_stats(network):
    """(tensor name, DescriptiveStats) for every parameter tensor in network order."""
    return [(name, describe(tensor)) for name, tensor in network.named_tensors()]
