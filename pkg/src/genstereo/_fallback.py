"""Pure numpy implementations of the hot kernels."""

import numpy as np


def build_volume(ref, tgt, table, d_max):
    h, w = ref.shape
    vol = np.zeros((h, w, d_max + 1), dtype=np.float64)
    for d in range(d_max + 1):
        vol[:, : w - d, d] = table[ref[:, : w - d], tgt[:, d:]]
    return vol


def cell_possibility(vol, chrom):
    return np.take_along_axis(vol, chrom[:, :, None].astype(np.intp), axis=2)[:, :, 0]


def gradient_weights(ref_grad, tgt_grad, chrom):
    h, w = chrom.shape
    cols = np.arange(w)[None, :] + chrom
    inside = cols < w
    picked = np.take_along_axis(tgt_grad, np.minimum(cols, w - 1), axis=1)
    return np.where(inside, ref_grad * picked, 0.0)


def box_sum(plane, radius):
    """Zero-padded (2r+1)^2 window sums via an integral image."""
    h, w = plane.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(np.cumsum(plane, axis=0), axis=1, out=ii[1:, 1:])
    r0 = np.clip(np.arange(h) - radius, 0, h)
    r1 = np.clip(np.arange(h) + radius + 1, 0, h)
    c0 = np.clip(np.arange(w) - radius, 0, w)
    c1 = np.clip(np.arange(w) + radius + 1, 0, w)
    return ii[r1][:, c1] - ii[r0][:, c1] - ii[r1][:, c0] + ii[r0][:, c0]


def fitness(vol, ref_grad, tgt_grad, chrom, radius):
    weights = gradient_weights(ref_grad, tgt_grad, chrom)
    box = box_sum(cell_possibility(vol, chrom), radius)
    return float((weights * box).sum(axis=1).sum())
