"""Block permutations placed between the constituent encoders/decoders."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UsageError


@dataclass(frozen=True, eq=False)
class Permutation:
    """``pi[k]`` is the source index of output position ``k``."""

    pi: np.ndarray
    pi_inv: np.ndarray
    kind: str = "custom"

    @classmethod
    def from_indices(cls, pi, kind: str = "custom") -> "Permutation":
        pi = np.array(pi, dtype=np.int64)
        if pi.ndim != 1 or pi.size == 0:
            raise ConfigurationError("permutation must be a non-empty 1-D sequence")
        if not np.array_equal(np.sort(pi), np.arange(pi.size)):
            raise ConfigurationError("not a bijection on 0..N-1")
        pi_inv = np.empty_like(pi)
        pi_inv[pi] = np.arange(pi.size)
        pi.setflags(write=False)
        pi_inv.setflags(write=False)
        return cls(pi, pi_inv, kind)

    @property
    def size(self) -> int:
        return int(self.pi.size)

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.pi, other.pi)

    __hash__ = None


def identity(n: int) -> Permutation:
    if n < 1:
        raise ConfigurationError("interleaver size must be >= 1")
    return Permutation.from_indices(np.arange(n), kind="identity")


def make_random_interleaver(n: int, seed: int) -> Permutation:
    if n < 1:
        raise ConfigurationError("interleaver size must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed & 0xFFFFFFFFFFFFFFFF))
    return Permutation.from_indices(rng.permutation(n), kind=f"random:{seed}")


def make_block_interleaver(rows: int, cols: int) -> Permutation:
    """Write row-wise, read column-wise."""
    if rows < 1 or cols < 1:
        raise ConfigurationError("block interleaver dimensions must be >= 1")
    pi = np.arange(rows * cols).reshape(rows, cols).T.ravel()
    return Permutation.from_indices(pi, kind=f"block:{rows}x{cols}")


def parse_interleaver(text: str, n: int) -> Permutation:
    """Build a permutation from ``"random:<seed>"``, ``"block:<rows>x<cols>"``
    or ``"identity"``."""
    kind, _, arg = text.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "random":
            return make_random_interleaver(n, int(arg))
        if kind == "block":
            rows, cols = (int(v) for v in arg.lower().split("x"))
            if rows * cols != n:
                raise ConfigurationError(
                    f"block interleaver {rows}x{cols} does not match block length {n}"
                )
            return make_block_interleaver(rows, cols)
        if kind == "identity" and not arg:
            return identity(n)
    except ValueError as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"malformed interleaver {text!r}") from None
    raise ConfigurationError(f"unknown interleaver {text!r}")


def interleave(p: Permutation, x):
    x = np.asarray(x)
    if x.shape[-1] != p.size:
        raise UsageError(f"length {x.shape[-1]} does not match interleaver size {p.size}")
    return x[..., p.pi]


def deinterleave(p: Permutation, y):
    y = np.asarray(y)
    if y.shape[-1] != p.size:
        raise UsageError(f"length {y.shape[-1]} does not match interleaver size {p.size}")
    return y[..., p.pi_inv]
