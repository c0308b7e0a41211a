"""IDX-format ingestion, [0,1] normalization, deterministic splits and
minibatching.

The IDX container is the standard digit-dataset binary layout: a 4-byte
big-endian magic (0x00000803 for images, 0x00000801 for labels),
big-endian 4-byte dimension sizes, then an unsigned-byte payload.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import DataFormatError, ShapeError
from .linalg import Rng, derive_seed
from .nn import shuffled_batches

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


class Split(IntEnum):
    TRAIN = 0
    VALID = 1
    TEST = 2

    @classmethod
    def parse(cls, name: str) -> "Split":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown split '{name}' (valid: train, valid, test)") from None


def _read_be32(stream, what: str) -> int:
    data = stream.read(4)
    if len(data) != 4:
        raise DataFormatError(f"truncated IDX stream while reading {what}")
    return struct.unpack(">I", data)[0]


def _open_maybe(source, mode):
    if hasattr(source, "read") or hasattr(source, "write"):
        return source, False
    return open(source, mode), True


def load_idx_images(source):
    """Read an IDX image file (path or binary stream).

    Returns (count, rows, cols, pixels) with pixels an uint8 array of
    shape (count, rows, cols) in sample-major order.
    """
    stream, close = _open_maybe(source, "rb")
    try:
        magic = _read_be32(stream, "magic")
        if magic != IMAGE_MAGIC:
            raise DataFormatError(
                f"bad image magic: expected {IMAGE_MAGIC} (0x{IMAGE_MAGIC:08x}), found {magic}"
            )
        count = _read_be32(stream, "count")
        rows = _read_be32(stream, "rows")
        cols = _read_be32(stream, "cols")
        expected = count * rows * cols
        payload = stream.read(expected + 1)
        if len(payload) != expected:
            raise DataFormatError(
                f"image payload has {len(payload)} bytes, expected exactly {expected}"
            )
        pixels = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)
        return count, rows, cols, pixels
    finally:
        if close:
            stream.close()


def load_idx_labels(source) -> np.ndarray:
    """Read an IDX label file (path or binary stream) into an int array."""
    stream, close = _open_maybe(source, "rb")
    try:
        magic = _read_be32(stream, "magic")
        if magic != LABEL_MAGIC:
            raise DataFormatError(
                f"bad label magic: expected {LABEL_MAGIC} (0x{LABEL_MAGIC:08x}), found {magic}"
            )
        count = _read_be32(stream, "count")
        payload = stream.read(count + 1)
        if len(payload) != count:
            raise DataFormatError(
                f"label payload has {len(payload)} bytes, expected exactly {count}"
            )
        return np.frombuffer(payload, dtype=np.uint8).astype(np.int64)
    finally:
        if close:
            stream.close()


def write_idx_images(dest, images: np.ndarray) -> None:
    """Write an uint8 array of shape (count, rows, cols) as an IDX image file."""
    images = np.ascontiguousarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise ShapeError(f"images must be (count, rows, cols), got {images.shape}")
    stream, close = _open_maybe(dest, "wb")
    try:
        stream.write(struct.pack(">IIII", IMAGE_MAGIC, *images.shape))
        stream.write(images.tobytes())
    finally:
        if close:
            stream.close()


def write_idx_labels(dest, labels: np.ndarray) -> None:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ShapeError(f"labels must be 1-d, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() > 255):
        raise ValueError("labels must fit in an unsigned byte")
    stream, close = _open_maybe(dest, "wb")
    try:
        stream.write(struct.pack(">II", LABEL_MAGIC, labels.shape[0]))
        stream.write(labels.astype(np.uint8).tobytes())
    finally:
        if close:
            stream.close()


def normalize(pixels: np.ndarray) -> np.ndarray:
    """Map uint8 pixels to float64 in [0,1] (v/255), flattened row-major
    to shape (count, rows*cols)."""
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.ndim == 3:
        arr = arr.reshape(arr.shape[0], -1)
    return arr / 255.0


@dataclass
class Dataset:
    """Normalized samples in [0,1]^d with integer labels and split tags.

    Immutable by convention once constructed; all consumers read only.
    """

    samples: np.ndarray  # (n, d) float64 in [0, 1]
    labels: np.ndarray  # (n,) int
    n_classes: int
    split_tags: np.ndarray = field(default=None)  # (n,) uint8 of Split values

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.samples.ndim != 2:
            raise ShapeError(f"samples must be (n, d), got {self.samples.shape}")
        if self.split_tags is None:
            self.split_tags = np.full(self.samples.shape[0], Split.TRAIN, dtype=np.uint8)
        self.split_tags = np.asarray(self.split_tags, dtype=np.uint8)
        n = self.samples.shape[0]
        if self.labels.shape != (n,) or self.split_tags.shape != (n,):
            raise ShapeError(
                f"samples/labels/split_tags lengths differ: "
                f"{n}/{self.labels.shape[0]}/{self.split_tags.shape[0]}"
            )
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain non-finite values")
        if n and (self.samples.min() < 0.0 or self.samples.max() > 1.0):
            raise ValueError("samples must lie in [0, 1]")
        if n and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ValueError(
                f"labels must lie in [0, {self.n_classes}), "
                f"found range [{self.labels.min()}, {self.labels.max()}]"
            )

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def d(self) -> int:
        return self.samples.shape[1]

    def indices(self, tag: Split) -> np.ndarray:
        return np.nonzero(self.split_tags == tag)[0]

    def subset(self, tag: Split) -> tuple[np.ndarray, np.ndarray]:
        """Samples and labels carrying `tag` (views where possible)."""
        idx = self.indices(tag)
        return self.samples[idx], self.labels[idx]


def split(ds: Dataset, fractions: tuple[float, float, float], seed: int) -> Dataset:
    """Assign train/valid/test tags by a deterministic shuffle.

    Fractions must be positive and sum to 1 (within 1e-9); each split
    size lands within one sample of fraction * n via cumulative rounding.
    """
    fr = tuple(float(f) for f in fractions)
    if len(fr) != 3 or any(f <= 0 for f in fr):
        raise ValueError(f"fractions must be three positive numbers, got {fractions}")
    if abs(sum(fr) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {sum(fr)!r}")
    order = Rng(seed).permutation(ds.n)
    cuts = [int(round(ds.n * (fr[0]))), int(round(ds.n * (fr[0] + fr[1])))]
    tags = np.empty(ds.n, dtype=np.uint8)
    tags[order[: cuts[0]]] = Split.TRAIN
    tags[order[cuts[0] : cuts[1]]] = Split.VALID
    tags[order[cuts[1] :]] = Split.TEST
    return Dataset(ds.samples, ds.labels, ds.n_classes, tags)


def minibatches(
    ds: Dataset, tag: Split, batch_size: int, seed: int, epoch: int
) -> list[np.ndarray]:
    """Epoch-dependent deterministic batching of one split.

    Returns index arrays into ds.samples; every tagged sample appears
    exactly once and the last batch may be short. The shuffle is keyed
    by a stable combination of seed and epoch.
    """
    idx = ds.indices(tag)
    if idx.size == 0:
        raise ValueError(f"no samples tagged {Split(tag).name.lower()}")
    rng = Rng(derive_seed(seed, "minibatch", epoch))
    return [idx[b] for b in shuffled_batches(idx.size, batch_size, rng)]
