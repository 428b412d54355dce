"""Cell-level comparisons and fits over a finished sweep."""

import itertools
import logging
import math

from src.errors import CellNotFoundError, DegenerateInputError
from src.harness.schemas import CellKey
from src.stats.ranksum import wilcoxon_rank_sum
from src.stats.regression import linear_fit

logger = logging.getLogger(__name__)


def cell_accuracies(result, cell):
    """Trial accuracies of one cell, in trial order."""
    if isinstance(cell, str):
        cell = CellKey.parse(cell)
    key = CellKey(*cell)
    values = [
        r.accuracy
        for r in sorted(result.records, key=lambda r: r.trial)
        if r.cell == key
    ]
    if not values:
        known = sorted({str(r.cell) for r in result.records})
        raise CellNotFoundError(f"no trials for cell {key}; result has {known}")
    return values


def compare_cells(result, cell_a, cell_b):
    """Wilcoxon rank-sum test between two cells' trial accuracies."""
    test = wilcoxon_rank_sum(cell_accuracies(result, cell_a), cell_accuracies(result, cell_b))
    logger.debug("compare %s vs %s: p=%.4g (%s)", cell_a, cell_b, test.p_value, test.method)
    return test


def _cells_for(result, treatment=None, layers=None):
    cells = [c for c in result.cells if treatment is None or c.treatment == treatment]
    if layers is not None:
        cells = [c for c in cells if c.layer in layers]
    return cells


def _magnitudes(result, treatment, layer):
    return sorted({c.magnitude for c in _cells_for(result, treatment, [layer])})


def compare_layers(result, treatment, magnitude):
    """Pairwise tests between every two layers at one treatment and magnitude.

    Returns {(layer_a, layer_b): TestResult} in sweep layer order.
    """
    layers = []
    for cell in _cells_for(result, treatment):
        if cell.magnitude == magnitude and cell.layer not in layers:
            layers.append(cell.layer)
    if len(layers) < 2:
        raise CellNotFoundError(
            f"need at least two layers swept with {treatment} at {magnitude!r}, found {layers}"
        )
    return {
        (a, b): compare_cells(result, (treatment, a, magnitude), (treatment, b, magnitude))
        for a, b in itertools.combinations(layers, 2)
    }


def stepwise_tests(result, treatment, layer):
    """Test each consecutive magnitude step of one layer; [(low, high, TestResult)]."""
    magnitudes = _magnitudes(result, treatment, layer)
    if len(magnitudes) < 2:
        raise CellNotFoundError(f"{treatment}/{layer} has fewer than two magnitudes")
    return [
        (low, high, compare_cells(result, (treatment, layer, low), (treatment, layer, high)))
        for low, high in itertools.pairwise(magnitudes)
    ]


def monotone_violations(result, treatment, layer, tolerance=2.0):
    """Steps where mean accuracy rises by more than `tolerance` combined standard errors.

    The standard error of a step is sqrt(se_low^2 + se_high^2), se = std / sqrt(trials).
    An empty list means accuracy is non-increasing within tolerance.
    """
    cells = {c.magnitude: c for c in _cells_for(result, treatment, [layer])}
    if not cells:
        raise CellNotFoundError(f"no cells for {treatment}/{layer}")
    violations = []
    for low, high in itertools.pairwise(sorted(cells)):
        a, b = cells[low], cells[high]
        margin = tolerance * math.sqrt(a.std**2 / a.trials + b.std**2 / b.trials)
        if b.mean - a.mean > margin:
            violations.append((low, high, b.mean - a.mean, margin))
    return violations


def fit_falloff(result, layers, treatment=None):
    """Linear fit of per-cell mean accuracy against magnitude.

    `layers` is one layer name or several; several are pooled into one fit.
    With no `treatment`, the result must hold exactly one.
    """
    if isinstance(layers, str):
        layers = [layers]
    if treatment is None:
        treatments = {c.treatment for c in _cells_for(result, layers=layers)}
        if len(treatments) > 1:
            raise DegenerateInputError(
                f"result mixes treatments {sorted(treatments)}; name one to fit"
            )
    cells = _cells_for(result, treatment, layers)
    if not cells:
        raise CellNotFoundError(f"no cells for layers {layers}")
    for layer in layers:
        count = len({c.magnitude for c in cells if c.layer == layer})
        if count < 3:
            raise DegenerateInputError(
                f"falloff fit needs at least 3 magnitudes for {layer!r}, found {count}"
            )
    return linear_fit([c.magnitude for c in cells], [c.mean for c in cells])
