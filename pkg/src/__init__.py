"""Fault injection and robustness analysis for convolutional neural networks."""

__version__ = "1.0.0"
