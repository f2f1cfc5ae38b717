"""Grayscale rasters, PGM I/O and Sobel gradient norms."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PgmError(ValueError):
    """Base class for PGM parse failures."""


class UnsupportedMagicError(PgmError):
    pass


class MalformedHeaderError(PgmError):
    pass


class TruncatedDataError(PgmError):
    pass


class MaxvalError(PgmError):
    pass


class DimensionError(ValueError):
    """Raised when image dimensions are incompatible with an operation."""


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale raster stored as an (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.uint8, copy=True)
        if px.ndim != 2 or px.size == 0:
            raise DimensionError(f"expected a non-empty 2-D raster, got shape {px.shape}")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    @classmethod
    def from_array(cls, values) -> GrayImage:
        arr = np.asarray(values)
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("intensities must lie in [0, 255]")
        return cls(arr.astype(np.uint8))


@dataclass(frozen=True)
class StereoPair:
    """Rectified pair: pixel (r, c) of ``reference`` matches (r, c + d) of ``target``."""

    reference: GrayImage
    target: GrayImage

    def __post_init__(self):
        if self.reference.shape != self.target.shape:
            raise DimensionError(
                f"reference {self.reference.shape} and target {self.target.shape} differ in size"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return self.reference.shape


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise MalformedHeaderError("PGM header ended early")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def load_pgm(data: bytes) -> GrayImage:
    """Parse a P2 (ASCII) or P5 (binary) 8-bit PGM."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedMagicError(f"unsupported magic {magic!r}")
    tokens, pos = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise MalformedHeaderError(f"non-integer header field: {exc}") from None
    if width <= 0 or height <= 0:
        raise MalformedHeaderError(f"bad dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise MaxvalError(f"maxval {maxval} outside 1..255")
    n = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or not data[pos : pos + 1].isspace():
            raise MalformedHeaderError("missing whitespace after maxval")
        raw = data[pos + 1 : pos + 1 + n]
        if len(raw) < n:
            raise TruncatedDataError(f"expected {n} bytes of pixel data, got {len(raw)}")
        values = np.frombuffer(raw, dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
        if len(body) < n:
            raise TruncatedDataError(f"expected {n} samples, got {len(body)}")
        try:
            values = np.array([int(t) for t in body[:n]], dtype=np.int64)
        except ValueError:
            raise MalformedHeaderError("non-integer sample in P2 raster") from None
        if values.min() < 0 or values.max() > maxval:
            raise MalformedHeaderError("sample outside [0, maxval]")
    return GrayImage(values.reshape(height, width).astype(np.uint8))


def save_pgm(img: GrayImage, binary: bool = False) -> bytes:
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n255\n".encode()
    if binary:
        return header + img.pixels.tobytes()
    rows = (" ".join(str(v) for v in row) for row in img.pixels.tolist())
    return header + ("\n".join(rows) + "\n").encode()


def read_pgm(path) -> GrayImage:
    return load_pgm(Path(path).read_bytes())


def write_pgm(path, img: GrayImage, binary: bool = True) -> None:
    Path(path).write_bytes(save_pgm(img, binary=binary))


def sobel_gradient_norm(img: GrayImage | np.ndarray) -> np.ndarray:
    """Euclidean norm of the 3x3 Sobel gradient with edge-replicated borders.

    Returns a float64 array with the image's shape; every value is >= 0.
    """
    px = img.pixels if isinstance(img, GrayImage) else np.asarray(img)
    if px.ndim != 2 or px.shape[0] < 3 or px.shape[1] < 3:
        raise DimensionError(f"Sobel needs an image of at least 3x3, got {px.shape}")
    p = np.pad(px.astype(np.float64), 1, mode="edge")
    h, w = px.shape
    # p[1 + i : h + 1 + i, 1 + j : w + 1 + j] is the neighbour at offset (i, j)
    def at(i, j):
        return p[1 + i : h + 1 + i, 1 + j : w + 1 + j]

    gx = (at(-1, 1) + 2 * at(0, 1) + at(1, 1)) - (at(-1, -1) + 2 * at(0, -1) + at(1, -1))
    gy = (at(1, -1) + 2 * at(1, 0) + at(1, 1)) - (at(-1, -1) + 2 * at(-1, 0) + at(-1, 1))
    return np.sqrt(gx * gx + gy * gy)
