"""BPSK over AWGN with unit symbol energy.

Mapping is bit 0 -> +1, bit 1 -> -1, so a positive LLR favours bit 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError


@dataclass(frozen=True)
class ChannelParams:
    ebno_db: float
    rate: float

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise UsageError(f"code rate must be in (0, 1], got {self.rate}")

    @property
    def ebno(self) -> float:
        return 10.0 ** (self.ebno_db / 10.0)

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 / (2.0 * self.rate * self.ebno))

    @property
    def lc(self) -> float:
        return 4.0 * self.rate * self.ebno


def bpsk_modulate(bits) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normal draws by Box-Muller from ``rng``'s uniform stream."""
    half = (size + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1], keeps log finite
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:size]


def awgn(x, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if sigma < 0:
        raise UsageError(f"noise standard deviation must be >= 0, got {sigma}")
    x = np.asarray(x, dtype=np.float64)
    if sigma == 0:
        return x.copy()
    return x + sigma * gaussian(rng, x.size).reshape(x.shape)


def channel_llr(y, lc: float) -> np.ndarray:
    return lc * np.asarray(y, dtype=np.float64)
