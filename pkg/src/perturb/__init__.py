"""Destructive treatments applied to one named layer of a network copy."""

from src.perturb.schemas import PerturbationReceipt, PerturbationSpec
from src.perturb.treatments import (
    apply_perturbation,
    gaussian_perturb,
    node_knockout,
    synapse_knockout,
)

__all__ = [
    "PerturbationReceipt",
    "PerturbationSpec",
    "apply_perturbation",
    "gaussian_perturb",
    "node_knockout",
    "synapse_knockout",
]
