"""Independent reference implementations used as test oracles.

Nothing here touches the trellis tables or the BCJR kernel.
"""
import itertools

import numpy as np


def shift_register_encode(fb_octal, fw_octal, bits, terminate=False):
    """Direct RSC shift-register simulation, returns (sys, parity, registers)."""
    K = fb_octal.bit_length()
    fb = [int(c) for c in format(fb_octal, f"0{K}b")]
    fw = [int(c) for c in format(fw_octal, f"0{K}b")]
    regs = [0] * (K - 1)
    sys_out, par_out = [], []

    def step(u):
        a = u
        for tap, r in zip(fb[1:], regs):
            a ^= tap & r
        p = fw[0] & a
        for tap, r in zip(fw[1:], regs):
            p ^= tap & r
        regs.insert(0, a)
        regs.pop()
        return p

    for u in bits:
        sys_out.append(int(u))
        par_out.append(step(int(u)))
    if terminate:
        for _ in range(K - 1):
            u = 0
            for tap, r in zip(fb[1:], regs):
                u ^= tap & r
            sys_out.append(u)
            par_out.append(step(u))
    return sys_out, par_out, regs


def brute_force_posterior(fb_octal, fw_octal, sys_llr, par_llr, apriori, terminated):
    """Exact per-bit log-posterior ratios by enumerating every message.

    Log-likelihood of a codeword under the soft channel is
    ``0.5 * sum(x * L)`` with ``x = +1`` for bit 0.
    """
    n = len(apriori)
    la = np.concatenate([apriori, np.zeros(len(sys_llr) - n)])
    scores = []
    messages = list(itertools.product((0, 1), repeat=n))
    for m in messages:
        s, p, _ = shift_register_encode(fb_octal, fw_octal, m, terminate=terminated)
        xs = 1 - 2 * np.array(s)
        xp = 1 - 2 * np.array(p)
        scores.append(0.5 * np.sum(xs * (la + sys_llr)) + 0.5 * np.sum(xp * par_llr))
    scores = np.array(scores)
    msgs = np.array(messages)
    return np.array([
        np.logaddexp.reduce(scores[msgs[:, k] == 0]) - np.logaddexp.reduce(scores[msgs[:, k] == 1])
        for k in range(n)
    ])


def brute_force_turbo_codewords(cfg):
    """Every (message, codeword) pair of a small turbo code."""
    from turbofec.interleaver import interleave

    out = []
    fb, fw = cfg.spec.feedback_octal, cfg.spec.forward_octal
    for m in itertools.product((0, 1), repeat=cfg.n):
        s1, p1, _ = shift_register_encode(fb, fw, m, terminate=cfg.terminate)
        _, p2, _ = shift_register_encode(fb, fw, interleave(cfg.perm, np.array(m)))
        out.append((np.array(m), np.array(s1), np.array(p1), np.array(p2)))
    return out
