"""Single-file model container.

Layout::

    8 bytes   magic b"ABLATEv1"
    4 bytes   manifest length, little-endian uint32
    n bytes   UTF-8 JSON manifest (network manifest + parameter entries)
    m bytes   float32 little-endian blob, row-major, in parameter-entry order
    8 bytes   FNV-1a 64 checksum of the blob, little-endian
"""

import json
import logging
import struct
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.errors import ContainerError, ManifestError
from src.model.network import LayerParams, Network
from src.model.schemas import NetworkManifest, param_shapes

logger = logging.getLogger(__name__)

MAGIC = b"ABLATEv1"
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF
_HEADER = len(MAGIC) + 4
_TRAILER = 8


def fnv1a64(data):
    """FNV-1a 64 of a bytes-like object. The hash is sequential, one byte per step."""
    value = FNV_OFFSET
    prime = FNV_PRIME
    mask = _MASK64
    for byte in bytes(data):
        value = ((value ^ byte) * prime) & mask
    return value


def encode(network):
    """Serialize a network to container bytes."""
    entries = []
    chunks = []
    offset = 0
    for name, tensor in network.named_tensors():
        raw = np.ascontiguousarray(tensor, dtype="<f4").tobytes()
        entries.append(
            {"name": name, "shape": list(tensor.shape), "offset": offset, "length": len(raw)}
        )
        chunks.append(raw)
        offset += len(raw)
    blob = b"".join(chunks)
    header = {
        "network": network.manifest.model_dump(mode="json", exclude_none=True),
        "parameters": entries,
    }
    manifest_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return b"".join(
        [
            MAGIC,
            struct.pack("<I", len(manifest_bytes)),
            manifest_bytes,
            blob,
            struct.pack("<Q", fnv1a64(blob)),
        ]
    )


def decode(data):
    """Parse container bytes back into a Network, validating every field."""
    if len(data) < _HEADER + _TRAILER or data[: len(MAGIC)] != MAGIC:
        raise ContainerError("not a model container (bad magic)")
    (manifest_len,) = struct.unpack("<I", data[len(MAGIC) : _HEADER])
    blob_start = _HEADER + manifest_len
    if blob_start + _TRAILER > len(data):
        raise ContainerError(
            f"manifest length {manifest_len} runs past the end of a {len(data)}-byte file"
        )
    try:
        header = json.loads(data[_HEADER:blob_start].decode("utf-8"))
        manifest = NetworkManifest.model_validate(header["network"])
        entries = header["parameters"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ContainerError(f"unreadable container manifest: {exc}") from exc
    except ValidationError as exc:
        raise ManifestError(f"invalid network manifest in container: {exc}") from exc

    blob = data[blob_start : len(data) - _TRAILER]
    (stored,) = struct.unpack("<Q", data[len(data) - _TRAILER :])
    if fnv1a64(blob) != stored:
        raise ContainerError("checksum mismatch: container is corrupted")

    try:
        expected = param_shapes(manifest)
    except ManifestError as exc:
        raise ContainerError(f"container manifest does not compose: {exc}") from exc
    tensors = {}
    spans = []
    for entry in entries:
        try:
            name, shape = entry["name"], tuple(entry["shape"])
            offset, length = int(entry["offset"]), int(entry["length"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ContainerError(f"malformed parameter entry {entry!r}") from exc
        if offset < 0 or length < 0 or offset + length > len(blob):
            raise ContainerError(
                f"parameter {name!r} spans bytes {offset}..{offset + length} "
                f"past the {len(blob)}-byte blob"
            )
        if length != 4 * int(np.prod(shape, dtype=np.int64)):
            raise ContainerError(f"parameter {name!r} length {length} does not match shape {list(shape)}")
        if name in tensors:
            raise ContainerError(f"parameter {name!r} appears more than once")
        spans.append((offset, length, name))
        tensors[name] = np.frombuffer(blob, dtype="<f4", count=length // 4, offset=offset).reshape(shape).astype(np.float32)

    expected_offset = 0
    for offset, length, name in sorted(spans):
        if offset != expected_offset:
            raise ContainerError(
                f"parameter {name!r} starts at byte {offset}, expected {expected_offset}: "
                "entries must tile the blob without gaps or overlap"
            )
        expected_offset += length
    if expected_offset != len(blob):
        raise ContainerError(
            f"parameter entries cover {expected_offset} bytes of a {len(blob)}-byte blob"
        )

    params = {}
    for layer, (weight_shape, bias_shape) in expected.items():
        weights = tensors.pop(f"{layer}_W", None)
        biases = tensors.pop(f"{layer}_b", None)
        if weights is None or biases is None:
            raise ContainerError(f"container is missing parameters for layer {layer!r}")
        if weights.shape != weight_shape or biases.shape != bias_shape:
            raise ContainerError(
                f"layer {layer!r} stored shapes {weights.shape}/{biases.shape} disagree "
                f"with manifest {weight_shape}/{bias_shape}"
            )
        params[layer] = LayerParams(weights, biases)
    if tensors:
        raise ContainerError(f"container has parameters for unknown layers: {sorted(tensors)}")
    return Network(manifest, params)


def save(network, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode(network))
    logger.info("saved %s to %s", network.manifest.name, path)
    return path


def load(path):
    path = Path(path)
    if not path.exists():
        raise ContainerError(f"model container not found at {path}")
    network = decode(path.read_bytes())
    logger.info("loaded %s from %s", network.manifest.name, path)
    return network
