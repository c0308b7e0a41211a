"""Dense numeric containers and seeded randomness.

Matrices are 2-d float64 numpy arrays in row-major order, vectors are
1-d float64 arrays. The constructors here are the only sanctioned way to
bring outside data into numeric state: they copy, upcast to float64 and
reject NaN/Inf so non-finite values never enter a parameter store.

Randomness is counter-based (Philox, keyed directly by the 64-bit seed)
rather than the platform default generator, so a given seed yields the
same draw sequence on every machine and every run.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import ShapeError


def require_finite(arr: np.ndarray, what: str = "array") -> None:
    """Reject NaN/Inf. `what` names the offending value in the message."""
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")


def as_matrix(data) -> np.ndarray:
    """Copy `data` into a finite 2-d float64 array."""
    m = np.array(data, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got {m.ndim}-d data")
    require_finite(m, "matrix")
    return m


def as_vector(data) -> np.ndarray:
    """Copy `data` into a finite 1-d float64 array."""
    v = np.array(data, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"expected a 1-d vector, got {v.ndim}-d data")
    require_finite(v, "vector")
    return v


def matvec(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product; result[i] = sum_j m[i,j] * v[j]."""
    if m.shape[1] != v.shape[0]:
        raise ShapeError(
            f"matvec: matrix has {m.shape[1]} columns but vector has length {v.shape[0]}"
        )
    return m @ v


def transpose(m: np.ndarray) -> np.ndarray:
    """Transpose view of `m` (no copy; shares storage with the input)."""
    return m.T


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labelled parts.

    Uses blake2b over the string forms, so derived streams are
    independent of Python's hash randomization and identical across
    platforms and runs.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


class Rng:
    """Deterministic random stream keyed by a 64-bit unsigned seed.

    Backed by numpy's Philox bit generator with the seed used directly
    as the key. Single-owner: clone independent streams with `split`
    instead of sharing one instance across concurrent work.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def uniform(self, lo: float, hi: float, size=None):
        """Draw from [lo, hi); scalar when size is None."""
        if not lo < hi:
            raise ValueError(f"uniform: lo ({lo}) must be < hi ({hi})")
        u = self._gen.random(size)
        return lo + (hi - lo) * u

    def integers(self, lo: int, hi: int, size=None):
        """Draw integers from [lo, hi)."""
        if not lo < hi:
            raise ValueError(f"integers: lo ({lo}) must be < hi ({hi})")
        return self._gen.integers(lo, hi, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def split(self, *tags) -> "Rng":
        """Independent child stream labelled by `tags`."""
        return Rng(derive_seed(self.seed, *tags))


def rng_uniform(rng: Rng, lo: float, hi: float) -> float:
    """Single uniform draw from [lo, hi), advancing the stream."""
    return float(rng.uniform(lo, hi))
