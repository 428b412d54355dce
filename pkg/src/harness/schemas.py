"""Sweep configuration, per-trial records and aggregated results."""

from typing import NamedTuple

from pydantic import BaseModel, Field, model_validator

from src.data.synthetic import SyntheticSpec
from src.errors import DataError
from src.perturb.schemas import KNOCKOUTS, Treatment


class CellKey(NamedTuple):
    treatment: str
    layer: str
    magnitude: float

    @classmethod
    def parse(cls, text):
        """Parse ``treatment:layer:magnitude``."""
        parts = text.rsplit(":", 2)
        if len(parts) != 3:
            raise DataError(f"cell must look like treatment:layer:magnitude, got {text!r}")
        treatment, layer, magnitude = parts
        try:
            return cls(treatment, layer, float(magnitude))
        except ValueError as exc:
            raise DataError(f"cell magnitude {magnitude!r} is not a number") from exc

    def __str__(self):
        return f"{self.treatment}:{self.layer}:{self.magnitude!r}"


class SweepConfig(BaseModel):
    """Layer x treatment x magnitude x trial grid.

    A single ``treatment`` key is accepted and wrapped into ``treatments``.
    """

    model_path: str | None = None
    images_path: str | None = None
    labels_path: str | None = None
    synthetic: SyntheticSpec | None = None
    data_seed: int = Field(default=0, ge=0)
    normalize: tuple[float, float] | None = None
    treatments: list[Treatment] = Field(min_length=1)
    layers: list[str] = Field(min_length=1)
    magnitudes: list[float] = Field(min_length=1)
    trials: int = Field(default=5, ge=1)
    top_k: int = Field(default=5, ge=1)
    seed: int = Field(default=0, ge=0, le=2**64 - 1)
    eval_subset: int | None = Field(default=None, ge=1)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _wrap_single_treatment(cls, data):
        if isinstance(data, dict) and "treatment" in data:
            data = dict(data)
            single = data.pop("treatment")
            if single is not None:
                data.setdefault("treatments", [single])
        return data

    @model_validator(mode="after")
    def _check_grid(self):
        for name, values in (
            ("treatments", self.treatments),
            ("layers", self.layers),
            ("magnitudes", self.magnitudes),
        ):
            if len(set(values)) != len(values):
                raise ValueError(f"{name} contains duplicates: {values}")
        for magnitude in self.magnitudes:
            if magnitude < 0:
                raise ValueError(f"magnitudes must be >= 0, got {magnitude}")
            if magnitude > 1 and any(t in KNOCKOUTS for t in self.treatments):
                raise ValueError(f"knockout proportions must be <= 1, got {magnitude}")
        if self.images_path is not None and self.labels_path is None:
            raise ValueError("images_path needs a matching labels_path")
        return self


class TrialRecord(BaseModel):
    treatment: Treatment
    layer: str
    magnitude: float
    trial: int
    seed: int
    top_k: int
    accuracy: float = Field(ge=0.0, le=1.0)
    n_images: int
    wall_ms: float

    @property
    def cell(self):
        return CellKey(self.treatment, self.layer, self.magnitude)


class CellSummary(BaseModel):
    treatment: Treatment
    layer: str
    magnitude: float
    trials: int
    mean: float
    std: float
    relative_drop: float | None = None

    @property
    def key(self):
        return CellKey(self.treatment, self.layer, self.magnitude)


class SweepResult(BaseModel):
    config: SweepConfig | None = None
    baseline: float | None = None
    records: list[TrialRecord] = Field(default_factory=list)
    cells: list[CellSummary] = Field(default_factory=list)
