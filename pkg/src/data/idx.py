"""IDX (MNIST-style) image and label files.

Header layout, big-endian::

    images: 0x00000803, count, rows, cols, then count*rows*cols unsigned bytes
    labels: 0x00000801, count, then count unsigned bytes
"""

import logging
import struct
from pathlib import Path

import numpy as np

from src.data.dataset import Dataset
from src.errors import DatasetFormatError

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def _read(path):
    path = Path(path)
    if not path.exists():
        raise DatasetFormatError(f"IDX file not found: {path}")
    return path.read_bytes()


def read_idx_images(path):
    """Raw (count, rows, cols) uint8 pixels from an IDX image file."""
    data = _read(path)
    if len(data) < 16:
        raise DatasetFormatError(f"{path}: truncated IDX image header")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IMAGE_MAGIC:
        raise DatasetFormatError(f"{path}: bad image magic 0x{magic:08x}")
    expected = count * rows * cols
    if len(data) - 16 != expected:
        raise DatasetFormatError(
            f"{path}: header claims {count}x{rows}x{cols} pixels ({expected} bytes) "
            f"but {len(data) - 16} bytes follow"
        )
    return np.frombuffer(data, dtype=np.uint8, offset=16).reshape(count, rows, cols)


def read_idx_labels(path):
    data = _read(path)
    if len(data) < 8:
        raise DatasetFormatError(f"{path}: truncated IDX label header")
    magic, count = struct.unpack(">II", data[:8])
    if magic != LABEL_MAGIC:
        raise DatasetFormatError(f"{path}: bad label magic 0x{magic:08x}")
    if len(data) - 8 != count:
        raise DatasetFormatError(
            f"{path}: header claims {count} labels but {len(data) - 8} bytes follow"
        )
    return np.frombuffer(data, dtype=np.uint8, offset=8).astype(np.int64)


def load_idx(images_path, labels_path, class_count=None):
    """Load an IDX image/label pair; pixels are scaled to [0, 1].

    The class count defaults to max(label) + 1.
    """
    pixels = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if pixels.shape[0] != labels.shape[0]:
        raise DatasetFormatError(
            f"{images_path} holds {pixels.shape[0]} images but {labels_path} holds "
            f"{labels.shape[0]} labels"
        )
    if pixels.shape[0] == 0:
        raise DatasetFormatError(f"{images_path} contains no images")
    if class_count is None:
        class_count = int(labels.max()) + 1
    images = (pixels.astype(np.float32) / np.float32(255.0))[:, None, :, :]
    logger.info("loaded %d images of %dx%d from %s", *pixels.shape, images_path)
    return Dataset(images, labels, class_count)


def write_idx(dataset, images_path, labels_path):
    """Write a single-channel dataset as IDX; pixels are quantized to round(x * 255)."""
    if dataset.images.shape[1] != 1:
        raise DatasetFormatError("IDX holds single-channel images only")
    if dataset.class_count > 256:
        raise DatasetFormatError("IDX labels are single bytes (at most 256 classes)")
    count, _, rows, cols = dataset.images.shape
    pixels = np.clip(np.rint(dataset.images[:, 0] * 255.0), 0, 255).astype(np.uint8)
    images_path, labels_path = Path(images_path), Path(labels_path)
    images_path.parent.mkdir(parents=True, exist_ok=True)
    labels_path.parent.mkdir(parents=True, exist_ok=True)
    images_path.write_bytes(struct.pack(">IIII", IMAGE_MAGIC, count, rows, cols) + pixels.tobytes())
    labels_path.write_bytes(
        struct.pack(">II", LABEL_MAGIC, count) + dataset.labels.astype(np.uint8).tobytes()
    )
    return images_path, labels_path
