"""Perturbation requests and their audit receipts."""

from typing import Literal

from pydantic import BaseModel, Field, model_validator

Treatment = Literal["synapse_knockout", "node_knockout", "gaussian"]
KNOCKOUTS = ("synapse_knockout", "node_knockout")


class PerturbationSpec(BaseModel):
    """One treatment applied to one layer.

    magnitude is a proportion in [0, 1] for knockouts and a multiple of the
    layer's parameter sigma for gaussian.
    """

    treatment: Treatment
    layer: str = Field(min_length=1)
    magnitude: float = Field(ge=0.0)
    seed: int = Field(default=0, ge=0, le=2**64 - 1)

    @model_validator(mode="after")
    def _check_magnitude(self):
        if self.treatment in KNOCKOUTS and self.magnitude > 1.0:
            raise ValueError(f"knockout proportion must be in [0, 1], got {self.magnitude}")
        return self


class PerturbationReceipt(BaseModel):
    """What a perturbation actually changed."""

    treatment: Treatment
    layer: str
    magnitude: float
    seed: int | None = None
    zeroed_weights: int = 0
    zeroed_biases: int = 0
    weight_delta_mean: float | None = None
    weight_delta_std: float | None = None
    bias_delta_mean: float | None = None
    bias_delta_std: float | None = None
    degenerate: list[str] = Field(default_factory=list)
    indices_hash: str = ""
