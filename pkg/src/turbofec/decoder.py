"""Log-MAP / Max-Log-MAP SISO decoding and the iterative turbo loop.

Branch metric for a transition with input ``u`` and parity ``p`` (mapped to
``+1`` for bit 0, ``-1`` for bit 1)::

    gamma = 0.5 * u * (apriori + sys_llr) + 0.5 * p * par_llr

Forward and backward metrics are normalised each step by their maximum.
Unreachable states carry the finite sentinel ``NEG_INF`` rather than
``-inf`` so normalisation never produces ``inf - inf``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .encoder import TurboConfig
from .errors import UsageError
from .trellis import Trellis

NEG_INF = -1e30


class MaxStarMode(enum.Enum):
    EXACT = "log-map"
    MAXLOG = "max-log-map"

    @classmethod
    def parse(cls, text: str) -> "MaxStarMode":
        t = text.strip().lower().replace("_", "-")
        for m in cls:
            if t in (m.value, m.name.lower()):
                return m
        raise UsageError(f"unknown decoder {text!r} (choose log-map or max-log-map)")


@numba.njit(cache=True, nogil=True, inline="always")
def _maxstar(a, b, exact):
    if a <= NEG_INF or b <= NEG_INF or not exact:
        return a if a > b else b
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@numba.njit(cache=True, nogil=True, inline="always")
def _add(a, b):
    r = a + b
    return NEG_INF if r < NEG_INF else r


def maxstar(a: float, b: float, mode: MaxStarMode = MaxStarMode.EXACT) -> float:
    """Jacobian logarithm ``ln(e^a + e^b)``, or ``max(a, b)`` in Max-Log mode."""
    return float(_maxstar(float(max(a, NEG_INF)), float(max(b, NEG_INF)),
                          mode is MaxStarMode.EXACT))


@numba.njit(cache=True, nogil=True)
def _bcjr(next_state, parity_out, sys_llr, par_llr, apriori, terminated, exact):
    n_states = next_state.shape[0]
    length = sys_llr.shape[0]
    n_info = apriori.shape[0]

    # gamma[k, u, p]: only four distinct branch metrics per step
    gamma = np.empty((length, 2, 2))
    for k in range(length):
        la = apriori[k] if k < n_info else 0.0
        hs = 0.5 * (la + sys_llr[k])
        hp = 0.5 * par_llr[k]
        gamma[k, 0, 0] = hs + hp
        gamma[k, 0, 1] = hs - hp
        gamma[k, 1, 0] = -hs + hp
        gamma[k, 1, 1] = -hs - hp

    alpha = np.full((length + 1, n_states), NEG_INF)
    alpha[0, 0] = 0.0
    for k in range(length):
        for s in range(n_states):
            a = alpha[k, s]
            if a <= NEG_INF:
                continue
            for u in range(2):
                ns = next_state[s, u]
                v = _add(a, gamma[k, u, parity_out[s, u]])
                alpha[k + 1, ns] = _maxstar(alpha[k + 1, ns], v, exact)
        m = alpha[k + 1, 0]
        for s in range(1, n_states):
            if alpha[k + 1, s] > m:
                m = alpha[k + 1, s]
        for s in range(n_states):
            alpha[k + 1, s] = _add(alpha[k + 1, s], -m)

    beta = np.full((length + 1, n_states), NEG_INF)
    if terminated:
        beta[length, 0] = 0.0
    else:
        beta[length, :] = 0.0
    for k in range(length - 1, -1, -1):
        m = NEG_INF
        for s in range(n_states):
            acc = NEG_INF
            for u in range(2):
                ns = next_state[s, u]
                v = _add(beta[k + 1, ns], gamma[k, u, parity_out[s, u]])
                acc = _maxstar(acc, v, exact)
            beta[k, s] = acc
            if acc > m:
                m = acc
        for s in range(n_states):
            beta[k, s] = _add(beta[k, s], -m)

    posterior = np.empty(n_info)
    for k in range(n_info):
        num0 = NEG_INF
        num1 = NEG_INF
        for s in range(n_states):
            a = alpha[k, s]
            if a <= NEG_INF:
                continue
            ns0 = next_state[s, 0]
            ns1 = next_state[s, 1]
            num0 = _maxstar(num0, _add(_add(a, gamma[k, 0, parity_out[s, 0]]), beta[k + 1, ns0]), exact)
            num1 = _maxstar(num1, _add(_add(a, gamma[k, 1, parity_out[s, 1]]), beta[k + 1, ns1]), exact)
        posterior[k] = num0 - num1
    return posterior


@dataclass
class SisoIo:
    sys_llr: np.ndarray
    par_llr: np.ndarray
    apriori: np.ndarray
    posterior: np.ndarray
    extrinsic: np.ndarray


def siso_decode(trellis: Trellis, sys_llr, par_llr, apriori=None, terminated: bool = False,
                mode: MaxStarMode = MaxStarMode.EXACT) -> SisoIo:
    """Run BCJR over one constituent code.

    ``sys_llr`` and ``par_llr`` cover the whole trellis (information bits plus
    ``K-1`` tail steps when ``terminated``); ``apriori`` covers information
    bits only.
    """
    sys_llr = np.ascontiguousarray(sys_llr, dtype=np.float64)
    par_llr = np.ascontiguousarray(par_llr, dtype=np.float64)
    if sys_llr.shape != par_llr.shape or sys_llr.ndim != 1:
        raise UsageError("systematic and parity LLRs must be 1-D of equal length")
    n_info = sys_llr.size - (trellis.memory if terminated else 0)
    if n_info < 1:
        raise UsageError("LLR sequence shorter than the termination tail")
    if apriori is None:
        apriori = np.zeros(n_info)
    apriori = np.ascontiguousarray(apriori, dtype=np.float64)
    if apriori.shape != (n_info,):
        raise UsageError(f"a priori length {apriori.size} != information length {n_info}")

    posterior = _bcjr(trellis.next_state, trellis.parity_out, sys_llr, par_llr, apriori,
                      terminated, mode is MaxStarMode.EXACT)
    extrinsic = posterior - sys_llr[:n_info] - apriori
    return SisoIo(sys_llr, par_llr, apriori, posterior, extrinsic)


def hard_decision(llr) -> np.ndarray:
    """Bit 0 for ``llr >= 0``, bit 1 otherwise."""
    return (np.asarray(llr) < 0).astype(np.int8)


@dataclass
class DecodeResult:
    hard_bits: np.ndarray
    posterior_per_iteration: list[np.ndarray] = field(default_factory=list)
    iterations_run: int = 0
    # diagnostics: SISO-1 posterior of each iteration
    siso1_posterior_per_iteration: list[np.ndarray] = field(default_factory=list)

    @property
    def posterior(self) -> np.ndarray:
        return self.posterior_per_iteration[-1]


def turbo_decode(cfg: TurboConfig, r0, r1, r2, n_iter: int = 6,
                 mode: MaxStarMode = MaxStarMode.EXACT) -> DecodeResult:
    """Iterate the two SISO decoders exchanging extrinsic information.

    SISO 2 works in the interleaved domain on ``interleave(r0[:N])`` and
    ``r2``; the hard decision is taken on its de-interleaved posterior.
    """
    if n_iter < 1:
        raise UsageError(f"iteration count must be >= 1, got {n_iter}")
    n, t = cfg.n, cfg.n_tail
    r0 = np.ascontiguousarray(r0, dtype=np.float64)
    r1 = np.ascontiguousarray(r1, dtype=np.float64)
    r2 = np.ascontiguousarray(r2, dtype=np.float64)
    if r0.shape != (n + t,) or r1.shape != (n + t,) or r2.shape != (n,):
        raise UsageError("stream lengths do not match the turbo configuration")

    trellis = cfg.trellis
    pi, pi_inv = cfg.perm.pi, cfg.perm.pi_inv
    sys2 = np.ascontiguousarray(r0[:n][pi])
    exact = mode is MaxStarMode.EXACT
    ns, po = trellis.next_state, trellis.parity_out

    result = DecodeResult(hard_bits=np.zeros(n, dtype=np.int8))
    apriori1 = np.zeros(n)
    for _ in range(n_iter):
        post1 = _bcjr(ns, po, r0, r1, apriori1, cfg.terminate, exact)
        ext1 = post1 - r0[:n] - apriori1
        apriori2 = np.ascontiguousarray(ext1[pi])
        post2 = _bcjr(ns, po, sys2, r2, apriori2, False, exact)
        ext2 = post2 - sys2 - apriori2
        apriori1 = np.ascontiguousarray(ext2[pi_inv])
        result.siso1_posterior_per_iteration.append(post1)
        result.posterior_per_iteration.append(post2[pi_inv])
        result.iterations_run += 1
    result.hard_bits = hard_decision(result.posterior)
    return result
