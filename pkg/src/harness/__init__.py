"""Sweep engine: grid execution, aggregation, comparisons and result files."""

from src.harness.analysis import (
    cell_accuracies,
    compare_cells,
    compare_layers,
    fit_falloff,
    monotone_violations,
    stepwise_tests,
)
from src.harness.export import export, load_result, plot_series, write_plot_series
from src.harness.schemas import CellKey, CellSummary, SweepConfig, SweepResult, TrialRecord
from src.harness.seeds import derive_seed
from src.harness.sweep import run_sweep

__all__ = [
    "CellKey",
    "CellSummary",
    "SweepConfig",
    "SweepResult",
    "TrialRecord",
    "cell_accuracies",
    "compare_cells",
    "compare_layers",
    "derive_seed",
    "export",
    "fit_falloff",
    "load_result",
    "monotone_violations",
    "plot_series",
    "run_sweep",
    "stepwise_tests",
    "write_plot_series",
]
