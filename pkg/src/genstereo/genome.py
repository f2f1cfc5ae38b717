"""Chromosome encoding and genetic operators.

A chromosome is a full candidate disparity map: an integer matrix with the
image's shape whose cell (r, c) holds the disparity of reference pixel
(r, c).  Chromosomes are plain ``int32`` numpy arrays.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .fuzzy import PossibilityVolume
from .imaging import DimensionError

CHROM_DTYPE = kernels.CHROM_DTYPE


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for ``seed``, forked by an integer key path.

    ``rng_stream(s, g, i)`` is the stream of child ``i`` in generation ``g``;
    streams with different keys are statistically independent and do not
    depend on the order in which they are created.
    """
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def validate_chromosome(chrom: np.ndarray, shape: tuple[int, int], d_max: int) -> None:
    if chrom.shape != tuple(shape):
        raise DimensionError(f"chromosome shape {chrom.shape} does not match {tuple(shape)}")
    if chrom.size and (chrom.min() < 0 or chrom.max() > d_max):
        raise ValueError(f"disparities must lie in [0, {d_max}]")


def random_init(height: int, width: int, d_max: int, rng: np.random.Generator) -> np.ndarray:
    if d_max < 0:
        raise ValueError("d_max must be >= 0")
    return rng.integers(0, d_max + 1, size=(height, width), dtype=CHROM_DTYPE)


def crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator, split: int | None = None) -> np.ndarray:
    """Row-split crossover: rows above the split come from ``a``, the rest from ``b``.

    The split row is drawn uniformly from 1..R-1 so both parents contribute;
    pass ``split`` to force it.  Single-row chromosomes are copied from ``a``.
    """
    if a.shape != b.shape:
        raise DimensionError(f"parents differ in shape: {a.shape} vs {b.shape}")
    rows = a.shape[0]
    if split is None:
        split = int(rng.integers(1, rows)) if rows > 1 else rows
    child = np.empty_like(a)
    child[:split] = a[:split]
    child[split:] = b[split:]
    return child


def weakest_cell(chrom: np.ndarray, vol: PossibilityVolume) -> tuple[int, int]:
    """Cell with the lowest current possibility; ties go to the first in row-major order."""
    plane = kernels.backend().cell_possibility(vol.values, chrom)
    idx = int(np.argmin(plane))
    return divmod(idx, chrom.shape[1])


def mutate(
    chrom: np.ndarray,
    vol: PossibilityVolume,
    rate: float,
    patch_radius: int,
    d_max: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Possibility-guided patch mutation.

    With probability ``rate`` the square patch of the given radius around the
    worst-matched cell is overwritten with one fresh uniform disparity; the
    patch is clipped at the image borders.  Otherwise a copy of the input is
    returned unchanged.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"mutation rate must lie in [0, 1], got {rate}")
    out = chrom.copy()
    if rng.random() >= rate:
        return out
    r, c = weakest_cell(chrom, vol)
    value = rng.integers(0, d_max + 1)
    out[max(r - patch_radius, 0) : r + patch_radius + 1, max(c - patch_radius, 0) : c + patch_radius + 1] = value
    return out
