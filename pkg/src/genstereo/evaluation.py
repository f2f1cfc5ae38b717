"""Bad-pixel scoring against ground truth, and a SAD block-matching baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .genome import CHROM_DTYPE
from .imaging import DimensionError, GrayImage, StereoPair


@dataclass(frozen=True)
class GroundTruth:
    """Stored ground-truth map; true disparity = stored / scale.

    Pixels whose stored value equals ``unknown_value`` carry no ground truth.
    Use ``unknown_value=None`` when every pixel is known.
    """

    stored: np.ndarray
    scale: float = 1.0
    unknown_value: int | None = None

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("ground-truth scale must be positive")
        if isinstance(self.stored, GrayImage):
            object.__setattr__(self, "stored", self.stored.pixels)

    @property
    def known(self) -> np.ndarray:
        if self.unknown_value is None:
            return np.ones(self.stored.shape, dtype=bool)
        return self.stored != self.unknown_value

    @property
    def disparity(self) -> np.ndarray:
        return self.stored.astype(np.float64) / self.scale


@dataclass(frozen=True)
class EvalReport:
    bad_pixel_rate: float
    evaluated_pixels: int
    threshold: float

    def to_csv_line(self) -> str:
        return f"{self.bad_pixel_rate!r},{self.evaluated_pixels},{self.threshold!r}"


def bad_pixel_rate(
    est: np.ndarray,
    gt: GroundTruth,
    threshold: float = 1.0,
    mask: np.ndarray | None = None,
) -> EvalReport:
    """Fraction of known pixels with |est - gt| strictly greater than ``threshold``.

    ``mask`` optionally restricts the evaluation further (e.g. to interior
    pixels of a synthetic scene).
    """
    est = np.asarray(est)
    if est.shape != gt.stored.shape:
        raise DimensionError(f"estimate {est.shape} and ground truth {gt.stored.shape} differ in size")
    valid = gt.known if mask is None else gt.known & mask
    n = int(valid.sum())
    if n == 0:
        raise ValueError("no pixels with known ground truth")
    err = np.abs(est.astype(np.float64) - gt.disparity)
    bad = int((err[valid] > threshold).sum())
    return EvalReport(bad / n, n, float(threshold))


def sad_cost_volume(pair: StereoPair, d_max: int, window_radius: int) -> np.ndarray:
    """(height, width, d_max + 1) SAD costs over edge-replicated windows."""
    if not 0 <= d_max < pair.shape[1]:
        raise ValueError(f"d_max must lie in [0, {pair.shape[1] - 1}], got {d_max}")
    h, w = pair.shape
    k = window_radius
    ref = np.pad(pair.reference.pixels.astype(np.int64), k, mode="edge")
    tgt = np.pad(pair.target.pixels.astype(np.int64), ((k, k), (k, k + d_max)), mode="edge")
    costs = np.empty((h, w, d_max + 1), dtype=np.int64)
    for d in range(d_max + 1):
        diff = np.abs(ref - tgt[:, d : d + w + 2 * k])
        ii = np.zeros((h + 2 * k + 1, w + 2 * k + 1), dtype=np.int64)
        ii[1:, 1:] = diff.cumsum(0).cumsum(1)
        n = 2 * k + 1
        costs[:, :, d] = ii[n:, n:] - ii[:-n, n:] - ii[n:, :-n] + ii[:-n, :-n]
    return costs


def sad_block_match(pair: StereoPair, d_max: int, window_radius: int = 2) -> np.ndarray:
    """Winner-take-all SAD disparities; ties resolve to the smaller disparity."""
    # argmin returns the first minimum, i.e. the smallest d
    return sad_cost_volume(pair, d_max, window_radius).argmin(axis=2).astype(CHROM_DTYPE)
