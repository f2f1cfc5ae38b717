"""Grey-class memberships and the fuzzy matching-possibility metric.

Three Gaussian grey classes (black, average, white) are defined over the
intensity axis.  Two pixels are a "possible" match to the degree that they
belong to the same class; the possibility of a pairing is the max over
classes of the min of the two memberships.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .imaging import StereoPair

CLASSES = ("black", "average", "white")


class ConfigError(ValueError):
    """Invalid configuration value (disparity range, sigma, rates...)."""


@dataclass(frozen=True)
class MembershipParams:
    centers: tuple[float, float, float] = (0.0, 127.5, 255.0)
    sigmas: tuple[float, float, float] = (42.5, 42.5, 42.5)

    def __post_init__(self):
        if len(self.centers) != 3 or len(self.sigmas) != 3:
            raise ConfigError("exactly three grey classes are supported")
        if any(not s > 0 for s in self.sigmas):
            raise ConfigError(f"sigmas must be positive, got {self.sigmas}")

    @classmethod
    def with_sigma(cls, sigma: float) -> MembershipParams:
        return cls(sigmas=(sigma, sigma, sigma))


DEFAULT_PARAMS = MembershipParams()


def membership(intensity: float, params: MembershipParams = DEFAULT_PARAMS) -> tuple[float, float, float]:
    """Degrees of membership of ``intensity`` to (black, average, white)."""
    return tuple(
        math.exp(-((intensity - c) ** 2) / (2.0 * s * s))
        for c, s in zip(params.centers, params.sigmas)
    )


def matching_possibility(i1: float, i2: float, params: MembershipParams = DEFAULT_PARAMS) -> float:
    m1 = membership(i1, params)
    m2 = membership(i2, params)
    return max(min(a, b) for a, b in zip(m1, m2))


def membership_table(params: MembershipParams = DEFAULT_PARAMS) -> np.ndarray:
    """(256, 3) table of class memberships for every 8-bit intensity."""
    levels = np.arange(256, dtype=np.float64)[:, None]
    centers = np.asarray(params.centers, dtype=np.float64)
    sigmas = np.asarray(params.sigmas, dtype=np.float64)
    return np.exp(-((levels - centers) ** 2) / (2.0 * sigmas**2))


def possibility_table(params: MembershipParams = DEFAULT_PARAMS) -> np.ndarray:
    """(256, 256) table T[a, b] = matching possibility of intensities a and b."""
    mu = membership_table(params)
    return np.minimum(mu[:, None, :], mu[None, :, :]).max(axis=2)


@dataclass(frozen=True)
class PossibilityVolume:
    """Possibility of pairing reference (r, c) with target (r, c + d).

    ``values`` has shape (height, width, d_max + 1); cells whose target
    column falls outside the image hold exactly 0.
    """

    values: np.ndarray
    params: MembershipParams = field(default=DEFAULT_PARAMS)

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def d_max(self) -> int:
        return self.values.shape[2] - 1

    def __getitem__(self, key):
        return self.values[key]


def build_possibility_volume(
    pair: StereoPair, d_max: int, params: MembershipParams = DEFAULT_PARAMS
) -> PossibilityVolume:
    if not 0 <= d_max < pair.shape[1]:
        raise ConfigError(f"d_max must lie in [0, {pair.shape[1] - 1}], got {d_max}")
    table = possibility_table(params)
    values = kernels.backend().build_volume(
        pair.reference.pixels, pair.target.pixels, table, int(d_max)
    )
    return PossibilityVolume(values, params)
