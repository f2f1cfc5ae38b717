"""Fuzzy fitness of a disparity map.

    F(C) = sum_{r,c} S(r,c) * sum_{(i,j) in N} P(r+i, c+j, C(r+i, c+j))
    S(r,c) = |grad ref(r,c)| * |grad tgt(r, c + C(r,c))|

N is the square window of ``neighborhood_radius`` centred on (r, c);
window cells outside the image contribute nothing, and S is 0 when the
target column falls off the image.  The inner window sum is a box filter
over the per-cell possibility plane, so one evaluation is O(R*C).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .fuzzy import DEFAULT_PARAMS, MembershipParams, PossibilityVolume, build_possibility_volume
from .imaging import DimensionError, StereoPair, sobel_gradient_norm


@dataclass(frozen=True)
class FitnessContext:
    volume: PossibilityVolume
    ref_grad: np.ndarray
    tgt_grad: np.ndarray
    neighborhood_radius: int = 1

    def __post_init__(self):
        shape = (self.volume.height, self.volume.width)
        if self.ref_grad.shape != shape or self.tgt_grad.shape != shape:
            raise DimensionError("gradient maps and possibility volume differ in size")
        if self.neighborhood_radius < 0:
            raise ValueError("neighborhood_radius must be >= 0")
        for g in (self.ref_grad, self.tgt_grad):
            g.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.volume.height, self.volume.width)

    @property
    def d_max(self) -> int:
        return self.volume.d_max

    @classmethod
    def from_pair(
        cls,
        pair: StereoPair,
        d_max: int,
        neighborhood_radius: int = 1,
        params: MembershipParams = DEFAULT_PARAMS,
    ) -> FitnessContext:
        return cls(
            volume=build_possibility_volume(pair, d_max, params),
            ref_grad=sobel_gradient_norm(pair.reference),
            tgt_grad=sobel_gradient_norm(pair.target),
            neighborhood_radius=neighborhood_radius,
        )


def gradient_weight(ctx: FitnessContext, r: int, c: int, d: int) -> float:
    if c + d >= ctx.shape[1]:
        return 0.0
    return float(ctx.ref_grad[r, c] * ctx.tgt_grad[r, c + d])


def fitness(chrom: np.ndarray, ctx: FitnessContext, backend: str | None = None) -> float:
    """Score a chromosome; higher is better and the result is always >= 0."""
    if chrom.shape != ctx.shape:
        raise DimensionError(f"chromosome shape {chrom.shape} does not match context {ctx.shape}")
    return kernels.backend(backend).fitness(
        ctx.volume.values, ctx.ref_grad, ctx.tgt_grad, chrom, ctx.neighborhood_radius
    )
