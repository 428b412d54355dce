"""Evaluation metric and significance testing."""

from src.stats.metrics import chance_level, mean_std, top_k_accuracy
from src.stats.ranksum import TestResult, wilcoxon_rank_sum
from src.stats.regression import FitResult, linear_fit

__all__ = [
    "FitResult",
    "TestResult",
    "chance_level",
    "linear_fit",
    "mean_std",
    "top_k_accuracy",
    "wilcoxon_rank_sum",
]
