"""Monte Carlo BER/FER sweeps.

Every frame draws its message and noise from a private generator seeded by
``frame_seed(master_seed, point_index, frame_index)``, a SplitMix64
avalanche chain.  Frames are evaluated in chunks (optionally on a thread
pool) but counted strictly in frame-index order, so the stopping point and
every counter depend only on the sweep definition, never on worker count.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .channel import ChannelParams, awgn, bpsk_modulate, channel_llr
from .decoder import MaxStarMode, hard_decision, turbo_decode
from .encoder import TurboConfig, depuncture, turbo_encode
from .errors import ConfigurationError

MASK64 = (1 << 64) - 1
CSV_HEADER = ["ebno_db", "frames", "bits", "bit_errors", "frame_errors", "ber", "fer"]


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def frame_seed(master_seed: int, point_index: int, frame_index: int) -> int:
    h = splitmix64(master_seed & MASK64)
    h = splitmix64(h ^ (point_index & MASK64))
    return splitmix64(h ^ (frame_index & MASK64))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def run_frame(cfg: TurboConfig, ebno_db: float, n_iter: int, mode: MaxStarMode,
              seed: int, sigma: float | None = None) -> tuple[int, int]:
    """One end-to-end trial; returns ``(bit_errors, frame_error)``.

    ``sigma`` overrides the noise level derived from ``ebno_db`` (the channel
    reliability used for the LLRs still follows ``ebno_db``).
    """
    rng = _rng(seed)
    params = ChannelParams(ebno_db, cfg.code_rate)
    u = rng.integers(0, 2, cfg.n, dtype=np.int8)
    cw = turbo_encode(cfg, u)
    y = awgn(bpsk_modulate(cw.symbols), params.sigma if sigma is None else sigma, rng)
    r0, r1, r2 = depuncture(cfg, channel_llr(y, params.lc))
    decoded = turbo_decode(cfg, r0, r1, r2, n_iter, mode)
    errors = int(np.count_nonzero(decoded.hard_bits != u))
    return errors, int(errors > 0)


def run_uncoded_frame(n: int, ebno_db: float, seed: int) -> tuple[int, int]:
    rng = _rng(seed)
    params = ChannelParams(ebno_db, 1.0)
    u = rng.integers(0, 2, n, dtype=np.int8)
    y = awgn(bpsk_modulate(u), params.sigma, rng)
    errors = int(np.count_nonzero(hard_decision(y) != u))
    return errors, int(errors > 0)


def uncoded_ber(ebno_db: float) -> float:
    """Q(sqrt(2 Eb/N0)) for uncoded BPSK."""
    if math.isinf(ebno_db) and ebno_db > 0:
        return 0.0
    return 0.5 * math.erfc(math.sqrt(10.0 ** (ebno_db / 10.0)))


@dataclass
class SweepSpec:
    """A sweep definition.  ``cfg=None`` runs uncoded BPSK frames of
    ``uncoded_n`` bits."""

    cfg: TurboConfig | None
    ebno_points: list[float]
    n_iter: int = 6
    max_frames: int = 1000
    min_bit_errors: int = 100
    master_seed: int = 1
    mode: MaxStarMode = MaxStarMode.EXACT
    uncoded_n: int = 10_000

    def __post_init__(self):
        self.ebno_points = [float(e) for e in self.ebno_points]
        if not self.ebno_points:
            raise ConfigurationError("at least one Eb/N0 point is required")
        if any(b <= a for a, b in zip(self.ebno_points, self.ebno_points[1:])):
            raise ConfigurationError("Eb/N0 points must be strictly increasing")
        if self.max_frames < 1:
            raise ConfigurationError("max_frames must be >= 1")
        if self.n_iter < 1:
            raise ConfigurationError("iteration count must be >= 1")

    @property
    def block_length(self) -> int:
        return self.uncoded_n if self.cfg is None else self.cfg.n

    def frame_fn(self, ebno_db: float) -> Callable[[int], tuple[int, int]]:
        if self.cfg is None:
            return lambda seed: run_uncoded_frame(self.uncoded_n, ebno_db, seed)
        return lambda seed: run_frame(self.cfg, ebno_db, self.n_iter, self.mode, seed)


@dataclass
class PointResult:
    ebno_db: float
    frames: int = 0
    bits: int = 0
    bit_errors: int = 0
    frame_errors: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0


@dataclass
class SweepResult:
    points: list[PointResult] = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def _stopped(point: PointResult, spec: SweepSpec) -> bool:
    if point.frames >= spec.max_frames:
        return True
    return spec.min_bit_errors > 0 and point.bit_errors >= spec.min_bit_errors


def run_point(spec: SweepSpec, point_index: int, workers: int = 1,
              pool: ThreadPoolExecutor | None = None) -> PointResult:
    ebno_db = spec.ebno_points[point_index]
    fn = spec.frame_fn(ebno_db)
    point = PointResult(ebno_db)
    n = spec.block_length
    chunk = max(1, 4 * workers)
    next_frame = 0
    while not _stopped(point, spec):
        stop = min(next_frame + chunk, spec.max_frames)
        seeds = [frame_seed(spec.master_seed, point_index, f) for f in range(next_frame, stop)]
        outcomes = pool.map(fn, seeds) if pool is not None else map(fn, seeds)
        for bit_errors, frame_error in outcomes:
            point.frames += 1
            point.bits += n
            point.bit_errors += bit_errors
            point.frame_errors += frame_error
            if _stopped(point, spec):
                break
        next_frame = stop
    return point


def run_sweep(spec: SweepSpec, workers: int = 1,
              on_point: Callable[[PointResult], None] | None = None) -> SweepResult:
    result = SweepResult()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for i in range(len(spec.ebno_points)):
            point = run_point(spec, i, workers, pool)
            result.points.append(point)
            if on_point is not None:
                on_point(point)
    finally:
        if pool is not None:
            pool.shutdown()
    return result


def required_ebno(spec: SweepSpec, target_ber: float, workers: int = 1) -> tuple[float | None, SweepResult]:
    """Walk ``spec.ebno_points`` upward and return the first point whose BER
    is at or below ``target_ber`` (``None`` if never reached), plus every
    point measured on the way."""
    result = SweepResult()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for i, ebno in enumerate(spec.ebno_points):
            point = run_point(spec, i, workers, pool)
            result.points.append(point)
            if point.ber <= target_ber:
                return ebno, result
    finally:
        if pool is not None:
            pool.shutdown()
    return None, result


def parse_ebno(text: str) -> list[float]:
    """``"start:step:stop"`` (inclusive), a comma list, or a single value."""
    text = text.strip()
    if ":" in text:
        try:
            start, step, stop = (float(v) for v in text.split(":"))
        except ValueError:
            raise ConfigurationError(f"expected start:step:stop, got {text!r}") from None
        if step <= 0 or stop < start:
            raise ConfigurationError(f"empty or decreasing Eb/N0 range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"malformed Eb/N0 list {text!r}") from None


def format_csv(result: SweepResult | Iterable[PointResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in result:
        writer.writerow([repr(float(p.ebno_db)), p.frames, p.bits, p.bit_errors,
                         p.frame_errors, f"{p.ber:.6e}", f"{p.fer:.6e}"])
    return buf.getvalue()


def write_csv(result: SweepResult, destination) -> str:
    """Write the sweep as CSV to a path or text stream and return the text."""
    text = format_csv(result)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(os.fspath(destination), "w", newline="") as fh:
            fh.write(text)
    return text


def read_csv(source) -> SweepResult:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(os.fspath(source), newline="") as fh:
            text = fh.read()
    rows = list(csv.DictReader(io.StringIO(text)))
    return SweepResult([
        PointResult(float(r["ebno_db"]), int(r["frames"]), int(r["bits"]),
                    int(r["bit_errors"]), int(r["frame_errors"]))
        for r in rows
    ])
