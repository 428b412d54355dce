"""Network manifest schemas and shape inference."""

from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from src.errors import ManifestError

LayerKind = Literal["conv2d", "relu", "maxpool", "flatten", "dense", "dropout", "softmax"]
PARAMETERIZED_KINDS = ("conv2d", "dense")


class LayerSpec(BaseModel):
    """One layer of a network; hyperparameters depend on `kind`."""

    name: str = Field(min_length=1)
    kind: LayerKind
    filters: int | None = Field(default=None, ge=1)
    kernel_size: int | None = Field(default=None, ge=1)
    stride: int | None = Field(default=None, ge=1)
    padding: int | None = Field(default=None, ge=0)
    in_channels: int | None = Field(default=None, ge=1)
    units: int | None = Field(default=None, ge=1)
    in_features: int | None = Field(default=None, ge=1)
    rate: float | None = Field(default=None, ge=0.0, lt=1.0)
    window: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_kind_fields(self):
        required = {
            "conv2d": ("filters", "kernel_size"),
            "dense": ("units",),
            "maxpool": ("window",),
            "dropout": ("rate",),
        }.get(self.kind, ())
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"layer {self.name!r} ({self.kind}) is missing {missing}")
        return self

    @property
    def parameterized(self):
        return self.kind in PARAMETERIZED_KINDS


class NetworkManifest(BaseModel):
    """Ordered layer list plus the per-sample input shape [C, H, W]."""

    name: str = "network"
    input_shape: list[int] = Field(min_length=3, max_length=3)
    layers: list[LayerSpec] = Field(min_length=1)

    @field_validator("input_shape")
    @classmethod
    def _positive_extents(cls, value):
        if any(extent < 1 for extent in value):
            raise ValueError(f"input extents must be positive, got {value}")
        return value

    @model_validator(mode="after")
    def _unique_names(self):
        seen = set()
        for layer in self.layers:
            if layer.name in seen:
                raise ValueError(f"duplicate layer name {layer.name!r}")
            seen.add(layer.name)
        return self

    def layer(self, name):
        for spec in self.layers:
            if spec.name == name:
                return spec
        return None

    def layer_index(self, name):
        for index, spec in enumerate(self.layers):
            if spec.name == name:
                return index
        return None


def _conv_extent(size, spec):
    stride = spec.stride or 1
    padding = spec.padding or 0
    span = size + 2 * padding - spec.kernel_size
    if span < 0 or span % stride != 0:
        raise ManifestError(
            f"layer {spec.name!r}: extent {size} with kernel {spec.kernel_size}, "
            f"stride {stride}, padding {padding} is not an integer output size"
        )
    return span // stride + 1


def infer_shapes(manifest):
    """Per-sample output shape of every layer, in order.

    Raises ManifestError when adjacent layers do not compose.
    """
    shape = tuple(manifest.input_shape)
    shapes = []
    for spec in manifest.layers:
        if spec.kind == "conv2d":
            if len(shape) != 3:
                raise ManifestError(f"layer {spec.name!r}: conv2d needs a [C, H, W] input, got {list(shape)}")
            channels, height, width = shape
            if spec.in_channels is not None and spec.in_channels != channels:
                raise ManifestError(
                    f"layer {spec.name!r}: declares {spec.in_channels} input channels "
                    f"but receives {channels}"
                )
            shape = (spec.filters, _conv_extent(height, spec), _conv_extent(width, spec))
        elif spec.kind == "maxpool":
            if len(shape) != 3:
                raise ManifestError(f"layer {spec.name!r}: maxpool needs a [C, H, W] input")
            channels, height, width = shape
            stride = spec.stride or spec.window
            if spec.window > height or spec.window > width:
                raise ManifestError(
                    f"layer {spec.name!r}: window {spec.window} larger than {height}x{width}"
                )
            shape = (channels, (height - spec.window) // stride + 1, (width - spec.window) // stride + 1)
        elif spec.kind == "flatten":
            size = 1
            for extent in shape:
                size *= extent
            shape = (size,)
        elif spec.kind == "dense":
            if len(shape) != 1:
                raise ManifestError(
                    f"layer {spec.name!r}: dense needs a flat input, got {list(shape)} "
                    "(add a flatten layer)"
                )
            if spec.in_features is not None and spec.in_features != shape[0]:
                raise ManifestError(
                    f"layer {spec.name!r}: declares {spec.in_features} input features "
                    f"but receives {shape[0]}"
                )
            shape = (spec.units,)
        shapes.append(shape)
    return shapes


def param_shapes(manifest):
    """Map layer name -> (weight shape, bias shape) for parameterized layers."""
    shapes = {}
    previous = tuple(manifest.input_shape)
    for spec, out_shape in zip(manifest.layers, infer_shapes(manifest), strict=True):
        if spec.kind == "conv2d":
            weight = (spec.filters, previous[0], spec.kernel_size, spec.kernel_size)
            shapes[spec.name] = (weight, (spec.filters,))
        elif spec.kind == "dense":
            shapes[spec.name] = ((spec.units, previous[0]), (spec.units,))
        previous = out_shape
    return shapes


def parameter_count(manifest):
    total = 0
    for weight, bias in param_shapes(manifest).values():
        count = 1
        for extent in weight:
            count *= extent
        total += count + bias[0]
    return total
