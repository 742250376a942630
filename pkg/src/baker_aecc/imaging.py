"""8-bit grayscale images: PGM I/O, pixel/analog scaling, blocking, quality metrics.

PGM grammar accepted by :func:`load_pgm` (binary ``P5`` only)::

    "P5" WS+ width WS+ height WS+ maxval WS raster

``WS+`` is one or more whitespace bytes, and ``#`` comments running to the
end of the line may appear anywhere in it. Exactly one whitespace byte
separates ``maxval`` from the raster. ``maxval`` must be 255 and the
raster holds ``width * height`` bytes in row-major order. Bytes after the
raster are ignored. :func:`save_pgm` writes ``P5\\n<w> <h>\\n255\\n`` and then
the raster.
"""
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chaos import DomainError

_WS = b" \t\n\r\v\f"


class PGMError(ValueError):
    """Malformed or unsupported PGM data; ``offset`` is the byte position."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class GrayImage:
    pixels: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError(f"image must be a non-empty 2-D array, got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.any((px < 0) | (px > 255)) or np.any(px != np.round(px)):
                raise DomainError("pixel values must be integers in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]


@dataclass
class BlockStream:
    blocks: np.ndarray  # (count, k) analog values
    pad_count: int


def scale_to_analog(pixel):
    """Map 0..255 onto [-1, 1) via ``(p - 128) / 128``; works on scalars and arrays."""
    p = np.asarray(pixel)
    if np.any((p < 0) | (p > 255)):
        raise DomainError("pixel values must lie in [0, 255]")
    v = (p.astype(np.float64) - 128.0) / 128.0
    return float(v) if v.ndim == 0 else v


def unscale(value):
    """Nearest pixel for an analog value, rounding half away from zero, clamped to 0..255."""
    t = np.asarray(value, dtype=np.float64) * 128.0 + 128.0
    r = np.clip(np.sign(t) * np.floor(np.abs(t) + 0.5), 0, 255).astype(np.uint8)
    return int(r) if r.ndim == 0 else r


def partition_blocks(img, k):
    if k < 2:
        raise ValueError(f"block size must be >= 2, got {k}")
    flat = scale_to_analog(img.pixels.reshape(-1))
    pad = (-flat.size) % k
    flat = np.concatenate([flat, np.zeros(pad)])
    return BlockStream(flat.reshape(-1, k), pad)


def reassemble(stream, width, height):
    values = np.asarray(stream.blocks).reshape(-1)
    count = values.size - stream.pad_count
    if count != width * height:
        raise ValueError(f"stream carries {count} pixels, image needs {width}x{height}")
    return GrayImage(unscale(values[:count]).reshape(height, width))


def _check_same(a, b):
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(f"image shapes differ: {a.pixels.shape} vs {b.pixels.shape}")


def mse(a, b):
    _check_same(a, b)
    diff = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    return float(np.mean(diff * diff))


def psnr(a, b, peak=255.0):
    """PSNR in dB; ``inf`` for identical images."""
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 20.0 * math.log10(peak / math.sqrt(err))


def _next_token(data, pos):
    """Skip whitespace and comments, then return ``(token, start, end)``."""
    n = len(data)
    while pos < n:
        ch = data[pos]
        if ch in _WS:
            pos += 1
        elif ch == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WS and data[pos] != ord("#"):
        pos += 1
    if start == pos:
        raise PGMError("unexpected end of header", start)
    return data[start:pos], start, pos


def _header_int(data, pos, what):
    tok, start, end = _next_token(data, pos)
    if not tok.isdigit():
        raise PGMError(f"bad {what} {tok[:16]!r}", start)
    value = int(tok)
    if value <= 0:
        raise PGMError(f"{what} must be positive", start)
    return value, start, end


def parse_pgm(data):
    data = bytes(data)
    if data[:2] != b"P5":
        raise PGMError(f"unsupported magic {data[:2]!r}, only binary P5 is accepted", 0)
    if len(data) > 2 and data[2] not in _WS and data[2] != ord("#"):
        raise PGMError("magic number must be followed by whitespace", 2)
    width, _, pos = _header_int(data, 2, "width")
    height, _, pos = _header_int(data, pos, "height")
    maxval, start, pos = _header_int(data, pos, "maxval")
    if maxval != 255:
        raise PGMError(f"unsupported maxval {maxval}", start)
    if pos >= len(data) or data[pos] not in _WS:
        raise PGMError("missing whitespace before raster", pos)
    pos += 1
    need = width * height
    if len(data) - pos < need:
        raise PGMError(f"truncated raster: need {need} bytes, have {len(data) - pos}", pos)
    px = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    return GrayImage(px.reshape(height, width).copy())


def load_pgm(path):
    return parse_pgm(Path(path).read_bytes())


def pgm_bytes(img):
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.pixels.tobytes()


def save_pgm(img, path):
    Path(path).write_bytes(pgm_bytes(img))


def synthetic_image(width=64, height=64, seed=0):
    """Deterministic synthetic scene with smooth shading, edges and fine texture."""
    yy, xx = np.mgrid[0:height, 0:width] / np.array([max(height - 1, 1), max(width - 1, 1)])[:, None, None]
    img = 40 + 150 * xx + 40 * np.sin(3 * np.pi * yy)
    r = np.hypot(xx - 0.35, yy - 0.4)
    img = np.where(r < 0.22, 235 - 120 * r, img)
    img = np.where((xx > 0.6) & (xx < 0.85) & (yy > 0.55) & (yy < 0.9), 25.0, img)
    img += np.random.default_rng(seed).normal(0.0, 6.0, img.shape)
    return GrayImage(np.clip(np.round(img), 0, 255).astype(np.uint8))
