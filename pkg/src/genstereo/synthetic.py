"""Random-dot stereograms with exact ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import GrayImage, StereoPair


@dataclass(frozen=True)
class Stereogram:
    pair: StereoPair
    disparity: np.ndarray  # true disparity of every reference pixel
    visible: np.ndarray  # reference pixels whose match is not occluded in the target

    def interior_mask(self, radius: int) -> np.ndarray:
        """Pixels whose whole (2r+1)^2 window is visible, inside the image and
        at a single disparity."""
        h, w = self.disparity.shape
        mask = np.zeros((h, w), dtype=bool)
        mask[radius : h - radius, radius : w - radius] = True
        for i in range(-radius, radius + 1):
            for j in range(-radius, radius + 1):
                rs = slice(max(i, 0), h + min(i, 0))
                cs = slice(max(j, 0), w + min(j, 0))
                rd = slice(max(-i, 0), h + min(-i, 0))
                cd = slice(max(-j, 0), w + min(-j, 0))
                same = np.zeros((h, w), dtype=bool)
                same[rd, cd] = (self.disparity[rs, cs] == self.disparity[rd, cd]) & self.visible[rs, cs]
                mask &= same
        return mask


def _dots(shape, levels, dot_size, rng):
    h, w = shape
    coarse = rng.choice(np.asarray(levels), size=(-(-h // dot_size), -(-w // dot_size)))
    return np.kron(coarse, np.ones((dot_size, dot_size), dtype=coarse.dtype))[:h, :w]


def random_dot_stereogram(
    disparity: np.ndarray,
    rng: np.random.Generator,
    levels=range(256),
    dot_size: int = 1,
) -> Stereogram:
    """Build a pair whose reference pixel (r, c) reappears at target (r, c + d).

    Nearer surfaces (larger disparity) are painted last so they occlude
    farther ones; target pixels no surface lands on get fresh dots.
    """
    disparity = np.asarray(disparity, dtype=np.int64)
    h, w = disparity.shape
    ref = _dots((h, w), levels, dot_size, rng)
    tgt = _dots((h, w), levels, dot_size, rng)
    owner = np.full((h, w, 2), -1, dtype=np.int64)
    rows, cols = np.indices((h, w))
    for d in np.unique(disparity):
        sel = (disparity == d) & (cols + d < w)
        r, c = rows[sel], cols[sel]
        tgt[r, c + d] = ref[r, c]
        owner[r, c + d, 0] = r
        owner[r, c + d, 1] = c
    tc = cols + disparity
    inside = tc < w
    visible = np.zeros((h, w), dtype=bool)
    tcc = np.minimum(tc, w - 1)
    visible[inside] = (owner[rows, tcc, 1] == cols)[inside]
    pair = StereoPair(GrayImage(ref.astype(np.uint8)), GrayImage(tgt.astype(np.uint8)))
    return Stereogram(pair, disparity, visible)


def block_disparity(height: int, width: int, block: int, inner: int, outer: int = 0) -> np.ndarray:
    """A centred ``block`` x ``block`` square at disparity ``inner`` over ``outer``."""
    disp = np.full((height, width), outer, dtype=np.int64)
    r0, c0 = (height - block) // 2, (width - block) // 2
    disp[r0 : r0 + block, c0 : c0 + block] = inner
    return disp
