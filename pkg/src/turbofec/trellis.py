"""Recursive systematic convolutional (RSC) constituent codes.

Generators are given in octal with the most significant bit as the tap on
the current input / feedback node, so ``(7, 5)`` is feedback ``111`` and
forward ``101``.  Register ``m_1`` (newest) is the most significant bit of
the state index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class RscSpec:
    feedback_octal: int
    forward_octal: int

    def __post_init__(self):
        if self.feedback_octal < 1 or self.forward_octal < 1:
            raise ConfigurationError("generator polynomials must be positive")
        if self.constraint_length < 2:
            raise ConfigurationError(
                f"feedback {self.feedback_octal:o} gives constraint length < 2"
            )
        if self.forward_octal.bit_length() > self.constraint_length:
            raise ConfigurationError(
                f"forward polynomial {self.forward_octal:o} is wider than "
                f"feedback polynomial {self.feedback_octal:o}"
            )

    @property
    def constraint_length(self) -> int:
        return self.feedback_octal.bit_length()

    @property
    def memory(self) -> int:
        return self.constraint_length - 1

    @property
    def n_states(self) -> int:
        return 1 << self.memory

    @classmethod
    def from_octal(cls, text: str) -> "RscSpec":
        """Parse ``"7,5"`` style generator strings.

        A trailing third generator is accepted only when it is zero
        (``"15,12,0"``) and is ignored.
        """
        parts = [p.strip() for p in text.replace("(", "").replace(")", "").split(",")]
        parts = [p for p in parts if p]
        if len(parts) == 3 and int(parts[2], 8) == 0:
            parts = parts[:2]
        if len(parts) != 2:
            raise ConfigurationError(f"expected 'feedback,forward' octal pair, got {text!r}")
        try:
            fb, fw = (int(p, 8) for p in parts)
        except ValueError:
            raise ConfigurationError(f"generators must be octal: {text!r}") from None
        return cls(fb, fw)

    def __str__(self):
        return f"{self.feedback_octal:o},{self.forward_octal:o}"


def _taps(poly: int, width: int) -> list[int]:
    # taps[0] applies to the feedback node / input, taps[i] to register m_i
    return [(poly >> (width - 1 - i)) & 1 for i in range(width)]


@dataclass(frozen=True, eq=False)
class Trellis:
    """Unrolled state-transition tables of an RSC code.

    ``next_state[s, u]`` and ``parity_out[s, u]`` give the successor state and
    parity bit for input ``u`` from state ``s``; ``termination_bit[s]`` is the
    input that zeroes the feedback node.
    """

    spec: RscSpec
    next_state: np.ndarray
    parity_out: np.ndarray
    termination_bit: np.ndarray
    prev_state: np.ndarray = field(repr=False)
    prev_input: np.ndarray = field(repr=False)

    @property
    def n_states(self) -> int:
        return self.spec.n_states

    @property
    def memory(self) -> int:
        return self.spec.memory


def build_trellis(spec: RscSpec) -> Trellis:
    K = spec.constraint_length
    m = spec.memory
    fb = _taps(spec.feedback_octal, K)
    fw = _taps(spec.forward_octal, K)
    if fb[0] != 1:
        raise ConfigurationError("feedback polynomial must tap the current input")

    n_states = spec.n_states
    next_state = np.zeros((n_states, 2), dtype=np.int64)
    parity_out = np.zeros((n_states, 2), dtype=np.int8)
    termination_bit = np.zeros(n_states, dtype=np.int8)
    for s in range(n_states):
        regs = [(s >> (m - 1 - i)) & 1 for i in range(m)]  # m_1 .. m_{K-1}
        fb_sum = 0
        for i in range(m):
            fb_sum ^= fb[i + 1] & regs[i]
        termination_bit[s] = fb_sum
        for u in (0, 1):
            a = u ^ fb_sum
            p = fw[0] & a
            for i in range(m):
                p ^= fw[i + 1] & regs[i]
            parity_out[s, u] = p
            next_state[s, u] = (a << (m - 1)) | (s >> 1)

    # Each state has exactly two incoming transitions.
    prev_state = np.full((n_states, 2), -1, dtype=np.int64)
    prev_input = np.full((n_states, 2), -1, dtype=np.int8)
    fill = np.zeros(n_states, dtype=np.int64)
    for s in range(n_states):
        for u in (0, 1):
            ns = next_state[s, u]
            prev_state[ns, fill[ns]] = s
            prev_input[ns, fill[ns]] = u
            fill[ns] += 1

    for arr in (next_state, parity_out, termination_bit, prev_state, prev_input):
        arr.setflags(write=False)
    return Trellis(spec, next_state, parity_out, termination_bit, prev_state, prev_input)


def rsc_encode(trellis: Trellis, bits, terminate: bool = False):
    """Encode ``bits`` starting from the zero state.

    Returns ``(systematic, parity, final_state)``.  With ``terminate`` the
    K-1 tail inputs are appended to both output streams and the final state
    is 0.
    """
    bits = np.asarray(bits, dtype=np.int8)
    if bits.ndim != 1 or bits.size == 0:
        raise ValueError("bits must be a non-empty 1-D sequence")
    n_tail = trellis.memory if terminate else 0
    sys_out = np.empty(bits.size + n_tail, dtype=np.int8)
    par_out = np.empty(bits.size + n_tail, dtype=np.int8)
    sys_out[: bits.size] = bits
    state = 0
    ns, po = trellis.next_state, trellis.parity_out
    for k, u in enumerate(bits):
        par_out[k] = po[state, u]
        state = ns[state, u]
    for k in range(bits.size, bits.size + n_tail):
        u = trellis.termination_bit[state]
        sys_out[k] = u
        par_out[k] = po[state, u]
        state = ns[state, u]
    return sys_out, par_out, int(state)
