"""Built-in synthetic corpora for experiments and tests.

Two generators are provided:

* `bars` - an 8-dimensional one-hot "bars" set: each sample lights a
  single component and the label is that component's index. Small and
  exactly learnable, it drives autoencoder and grid-search smoke runs.

* `synthetic_digits` - an MNIST-format stand-in built from the bundled
  scikit-learn handwritten digit scans (1797 8x8 images, 10 classes).
  Each output sample upscales one scan to a random size, drops it at a
  random position on a 28x28 canvas and adds pixel noise, giving a
  784-dimensional task with genuine within-class variability where
  linear models pay for their lack of translation tolerance.

Both generators are fully deterministic per seed and can be exported to
IDX files for the command-line front end.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.ndimage import zoom as ndi_zoom

from .data import Dataset, Split, split, write_idx_images, write_idx_labels
from .linalg import Rng, derive_seed

DEFAULT_FRACTIONS = (5 / 7, 1 / 7, 1 / 7)


def bars(
    n_samples: int = 256,
    dim: int = 8,
    seed: int = 0,
    fractions: tuple[float, float, float] = (0.7, 0.15, 0.15),
) -> Dataset:
    """One-hot bars: sample i lights component i % dim; label = bar index."""
    samples = np.zeros((n_samples, dim))
    labels = np.arange(n_samples) % dim
    samples[np.arange(n_samples), labels] = 1.0
    ds = Dataset(samples, labels, n_classes=dim)
    return split(ds, fractions, derive_seed(seed, "bars-split"))


def _upscaled_bases(sizes: tuple[int, ...]) -> tuple[dict[int, np.ndarray], np.ndarray]:
    """Bundled 8x8 digit scans bilinearly upscaled to each size, in [0,1]."""
    from sklearn.datasets import load_digits

    raw = load_digits()
    images = raw.images / 16.0
    bases = {}
    for size in sizes:
        scaled = ndi_zoom(images, (1.0, size / 8.0, size / 8.0), order=1)
        bases[size] = np.clip(scaled, 0.0, 1.0)
    return bases, raw.target.astype(np.int64)


def synthetic_digits(
    n_samples: int = 13000,
    seed: int = 0,
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
    canvas: int = 28,
    glyph_sizes: tuple[int, ...] = (18, 20, 22),
    noise: float = 0.10,
) -> Dataset:
    """Digit images on a 28x28 canvas with random scale, position and noise.

    Every output sample picks one source scan, one glyph size and an
    integer placement uniformly over the canvas slack, then adds uniform
    pixel noise clipped back to [0,1]. The same seed always produces the
    same corpus, samples, labels and split tags included.
    """
    bases, base_labels = _upscaled_bases(glyph_sizes)
    rng = Rng(derive_seed(seed, "digits"))
    n_base = base_labels.shape[0]

    picks = rng.integers(0, n_base, size=n_samples)
    size_idx = rng.integers(0, len(glyph_sizes), size=n_samples)
    samples = np.zeros((n_samples, canvas, canvas))
    for i in range(n_samples):
        size = glyph_sizes[size_idx[i]]
        slack = canvas - size
        dx, dy = rng.integers(0, slack + 1, size=2)
        samples[i, dy : dy + size, dx : dx + size] = bases[size][picks[i]]
    if noise > 0:
        samples += rng.uniform(0.0, noise, size=samples.shape)
    samples = np.clip(samples, 0.0, 1.0).reshape(n_samples, canvas * canvas)
    ds = Dataset(samples, base_labels[picks], n_classes=10)
    return split(ds, fractions, derive_seed(seed, "digits-split"))


def export_idx(ds: Dataset, out_dir, prefix: str = "data", side: int | None = None) -> dict:
    """Write one IDX image/label file pair per nonempty split.

    Pixels are quantized to uint8 (round(v*255)). `side` forces the
    image shape; by default the sample dimension must be a square.
    Returns {split name: (images path, labels path)}.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if side is None:
        side = int(round(ds.d**0.5))
        if side * side != ds.d:
            raise ValueError(f"sample dimension {ds.d} is not square; pass side explicitly")
    if side < 1 or ds.d % side:
        raise ValueError(f"side {side} does not divide sample dimension {ds.d}")
    rows, cols = (side, ds.d // side)
    paths = {}
    for tag in Split:
        x, y = ds.subset(tag)
        if x.shape[0] == 0:
            continue
        images = np.round(x * 255.0).astype(np.uint8).reshape(-1, rows, cols)
        img_path = out_dir / f"{prefix}-{tag.name.lower()}-images.idx"
        lbl_path = out_dir / f"{prefix}-{tag.name.lower()}-labels.idx"
        write_idx_images(img_path, images)
        write_idx_labels(lbl_path, y)
        paths[tag.name.lower()] = (img_path, lbl_path)
    return paths
