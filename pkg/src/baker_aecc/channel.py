"""Continuous-amplitude QAM mapping and the AWGN channel.

x-states ride the I rail and y-states the Q rail. Both streams are ordered
block-major, then branch, then time. Noise is drawn from numpy's PCG64
generator seeded through :class:`numpy.random.SeedSequence`; sub-streams for
individual sweep points come from :func:`derive_seed`.
"""
import math
from dataclasses import dataclass

import numpy as np

from .codec import Codeword, ReceivedCodeword


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    delta: float = 1.0
    ep_mode: str = "measured"
    seed: int = 0
    symbols_per_pixel: float = 4.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"peak amplitude must be positive, got {self.delta}")
        if not self.symbols_per_pixel > 0:
            raise ValueError("symbols_per_pixel must be positive")
        if self.ep_mode not in ("measured", "nominal"):
            raise ValueError(f"ep_mode must be 'measured' or 'nominal', got {self.ep_mode!r}")


@dataclass
class ModulatedFrame:
    i_stream: np.ndarray
    q_stream: np.ndarray

    def __post_init__(self):
        if self.i_stream.shape != self.q_stream.shape:
            raise ValueError("I and Q streams must have equal length")

    @property
    def energy(self):
        return float(np.dot(self.i_stream, self.i_stream) + np.dot(self.q_stream, self.q_stream))

    def __len__(self):
        return self.i_stream.size + self.q_stream.size


@dataclass(frozen=True)
class NoiseModel:
    """One-sided spectral density ``n0``; each real dimension gets variance ``n0 / 2``."""

    n0: float

    @property
    def sigma(self):
        return math.sqrt(self.n0 / 2.0)


def cqam_pack(codeword, delta=1.0):
    return ModulatedFrame(
        delta * np.asarray(codeword.x, dtype=np.float64).reshape(-1),
        delta * np.asarray(codeword.y, dtype=np.float64).reshape(-1),
    )


def calibrate_n0(cfg, frame):
    """Noise density for ``cfg.snr_db`` given as Ep/N0.

    ``measured``: Ep is the frame's energy divided by the number of source
    pixels it carries. ``nominal``: Ep assumes uniformly distributed
    amplitudes, ``symbols_per_pixel * delta**2 / 3``.
    """
    if cfg.ep_mode == "measured":
        if len(frame) == 0:
            raise ValueError("cannot measure energy of an empty frame")
        pixels = len(frame) / cfg.symbols_per_pixel
        ep = frame.energy / pixels
    else:
        ep = cfg.symbols_per_pixel * cfg.delta**2 / 3.0
    return NoiseModel(ep / 10.0 ** (cfg.snr_db / 10.0))


def awgn(frame, noise, seed):
    """Add white Gaussian noise; ``seed`` is anything :func:`numpy.random.default_rng` takes."""
    rng = np.random.default_rng(seed)
    sigma = noise.sigma
    ni = rng.standard_normal(frame.i_stream.size)
    nq = rng.standard_normal(frame.q_stream.size)
    return ModulatedFrame(frame.i_stream + sigma * ni, frame.q_stream + sigma * nq)


def demodulate(frame, delta, params):
    """Undo :func:`cqam_pack`; returns ``(blocks, k, n)`` observations, unclipped."""
    per_block = params.k * params.n
    if frame.i_stream.size == 0 or frame.i_stream.size % per_block:
        raise ValueError(
            f"stream length {frame.i_stream.size} is not a multiple of k*n = {per_block}"
        )
    shape = (-1, params.k, params.n)
    return ReceivedCodeword(
        (frame.i_stream / delta).reshape(shape),
        (frame.q_stream / delta).reshape(shape),
    )


def derive_seed(master, *indices):
    """Child seed for a sweep point; a pure function of ``master`` and ``indices``."""
    return np.random.SeedSequence(int(master), spawn_key=tuple(int(i) for i in indices))
