"""Parallel-concatenated turbo encoder, puncturing and receive-side depuncturing.

Serial layout of a codeword, per information bit ``k``:

* rate 1/3: ``sys_k, p1_k, p2_k``
* rate 1/2: ``sys_k, p1_k`` for even ``k`` and ``sys_k, p2_k`` for odd ``k``

followed, when encoder 1 is terminated, by ``K-1`` unpunctured
``(tail_bit, tail_parity1)`` pairs.  Encoder 2 is never terminated.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, UsageError
from .interleaver import Permutation, interleave, make_random_interleaver
from .trellis import RscSpec, Trellis, build_trellis, rsc_encode


class Rate(enum.Enum):
    R13 = "1/3"
    R12 = "1/2"

    @property
    def value_float(self) -> float:
        return 1 / 3 if self is Rate.R13 else 1 / 2

    @classmethod
    def parse(cls, text: str) -> "Rate":
        for r in cls:
            if text.strip() in (r.value, r.name):
                return r
        raise ConfigurationError(f"unsupported rate {text!r} (choose 1/2 or 1/3)")


@dataclass(frozen=True, eq=False)
class TurboConfig:
    spec: RscSpec
    n: int
    perm: Permutation
    rate: Rate = Rate.R13
    terminate: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError("block length must be >= 1")
        if self.perm.size != self.n:
            raise ConfigurationError(
                f"interleaver size {self.perm.size} != block length {self.n}"
            )

    @classmethod
    def default(cls, gen: str = "7,5", n: int = 1000, rate: Rate | str = Rate.R13,
                seed: int = 42, terminate: bool = True) -> "TurboConfig":
        if isinstance(rate, str):
            rate = Rate.parse(rate)
        return cls(RscSpec.from_octal(gen), n, make_random_interleaver(n, seed), rate, terminate)

    @cached_property
    def trellis(self) -> Trellis:
        return build_trellis(self.spec)

    @property
    def n_tail(self) -> int:
        return self.spec.memory if self.terminate else 0

    @property
    def code_rate(self) -> float:
        """Nominal rate, tail overhead excluded."""
        return self.rate.value_float

    @property
    def codeword_length(self) -> int:
        per_bit = 3 if self.rate is Rate.R13 else 2
        return per_bit * self.n + 2 * self.n_tail


@dataclass(frozen=True)
class Codeword:
    symbols: np.ndarray
    n_info: int
    n_tail: int


def puncture(sys, p1, p2) -> np.ndarray:
    """Rate-1/2 multiplex: every systematic bit, parities alternating p1/p2."""
    sys, p1, p2 = (np.asarray(v) for v in (sys, p1, p2))
    if not (sys.shape == p1.shape == p2.shape) or sys.ndim != 1:
        raise UsageError("systematic and parity streams must have equal length")
    out = np.empty(2 * sys.size, dtype=np.result_type(sys, p1, p2))
    out[0::2] = sys
    out[1::2] = np.where(np.arange(sys.size) % 2 == 0, p1, p2)
    return out


def _multiplex(rate: Rate, sys, p1, p2) -> np.ndarray:
    if rate is Rate.R12:
        return puncture(sys, p1, p2)
    return np.stack([sys, p1, p2], axis=1).ravel()


def turbo_encode(cfg: TurboConfig, u) -> Codeword:
    u = np.asarray(u, dtype=np.int8)
    if u.shape != (cfg.n,):
        raise UsageError(f"message length {u.size} != block length {cfg.n}")
    sys1, p1, _ = rsc_encode(cfg.trellis, u, terminate=cfg.terminate)
    _, p2, _ = rsc_encode(cfg.trellis, interleave(cfg.perm, u), terminate=False)
    n = cfg.n
    body = _multiplex(cfg.rate, sys1[:n], p1[:n], p2)
    tail = np.stack([sys1[n:], p1[n:]], axis=1).ravel()
    return Codeword(np.concatenate([body, tail]).astype(np.int8), n, cfg.n_tail)


def depuncture(cfg: TurboConfig, llr):
    """Split channel LLRs back into ``(r0, r1, r2)``.

    ``r0`` and ``r1`` carry the tail of encoder 1 (length ``N + n_tail``);
    ``r2`` has length ``N``.  Punctured positions are erasures (0.0).
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (cfg.codeword_length,):
        raise UsageError(
            f"received length {llr.size} != codeword length {cfg.codeword_length}"
        )
    n, t = cfg.n, cfg.n_tail
    r0 = np.zeros(n + t)
    r1 = np.zeros(n + t)
    r2 = np.zeros(n)
    if cfg.rate is Rate.R13:
        body = llr[: 3 * n].reshape(n, 3)
        r0[:n], r1[:n], r2[:] = body[:, 0], body[:, 1], body[:, 2]
        rest = llr[3 * n:]
    else:
        body = llr[: 2 * n].reshape(n, 2)
        r0[:n] = body[:, 0]
        r1[0:n:2] = body[0::2, 1]
        r2[1::2] = body[1::2, 1]
        rest = llr[2 * n:]
    tail = rest.reshape(t, 2)
    r0[n:], r1[n:] = tail[:, 0], tail[:, 1]
    return r0, r1, r2
