import io
import math

import numpy as np
import pytest

from turbofec.decoder import MaxStarMode
from turbofec.encoder import TurboConfig
from turbofec.errors import ConfigurationError
from turbofec.harness import (PointResult, SweepResult, SweepSpec, format_csv, frame_seed,
                              parse_ebno, read_csv, run_frame, run_sweep, splitmix64,
                              uncoded_ber, write_csv)


@pytest.fixture(scope="module")
def cfg():
    return TurboConfig.default("7,5", 200, "1/3", seed=3)


def test_splitmix64_reference():
    # first outputs of the SplitMix64 generator seeded with 0
    state = 0
    outs = []
    for _ in range(3):
        outs.append(splitmix64(state))
        state = (state + 0x9E3779B97F4A7C15) % 2**64
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_frame_seeds_distinct():
    seeds = {frame_seed(1, p, f) for p in range(5) for f in range(1000)}
    assert len(seeds) == 5000


def test_uncoded_ber_values():
    assert uncoded_ber(0.0) == pytest.approx(7.865e-2, rel=1e-3)
    assert uncoded_ber(4.0) == pytest.approx(1.25e-2, rel=1e-2)
    assert uncoded_ber(math.inf) == 0.0
    assert uncoded_ber(30.0) < 1e-300 or uncoded_ber(30.0) == 0.0


@pytest.mark.parametrize("seed", [0, 1, 2**63 + 5])
def test_run_frame_noiseless(cfg, seed):
    assert run_frame(cfg, 0.0, 2, MaxStarMode.EXACT, seed, sigma=0.0) == (0, 0)


def test_run_frame_deterministic(cfg):
    a = run_frame(cfg, 0.5, 4, MaxStarMode.EXACT, 77)
    b = run_frame(cfg, 0.5, 4, MaxStarMode.EXACT, 77)
    assert a == b


def test_run_frame_below_waterfall():
    cfg = TurboConfig.default("7,5", 1000, "1/3")
    failed = {ebno: sum(run_frame(cfg, ebno, 8, MaxStarMode.EXACT, frame_seed(9, 0, f))[0] > 0
                        for f in range(20))
              for ebno in (0.0, 0.5)}
    assert failed[0.0] > 10  # most frames fail at 0 dB
    assert failed[0.5] >= 2


def test_single_frame_bound(cfg):
    res = run_sweep(SweepSpec(cfg, [1.0], n_iter=2, max_frames=1, min_bit_errors=0))
    assert res[0].frames == 1 and res[0].bits == 200


def test_min_errors_stop(cfg):
    res = run_sweep(SweepSpec(cfg, [-1.0], n_iter=2, max_frames=500, min_bit_errors=50))
    p = res[0]
    assert p.bit_errors >= 50 and p.frames < 500
    # one frame fewer would not have met the quota
    shorter = run_sweep(SweepSpec(cfg, [-1.0], n_iter=2, max_frames=p.frames - 1,
                                  min_bit_errors=0))
    assert shorter[0].bit_errors < 50


def test_counter_conservation(cfg):
    spec = SweepSpec(cfg, [0.0, 0.5], n_iter=2, max_frames=15, min_bit_errors=0, master_seed=4)
    res = run_sweep(spec)
    for i, p in enumerate(res):
        per_frame = [run_frame(cfg, p.ebno_db, 2, MaxStarMode.EXACT, frame_seed(4, i, f))
                     for f in range(15)]
        assert p.bit_errors == sum(e for e, _ in per_frame)
        assert p.frame_errors == sum(f for _, f in per_frame)
        assert p.bits == p.frames * cfg.n
        assert p.ber == p.bit_errors / p.bits and 0 <= p.ber <= 1


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_worker_count_independent(cfg, workers):
    spec = SweepSpec(cfg, [0.0, 0.5, 1.0], n_iter=3, max_frames=40, min_bit_errors=30)
    assert format_csv(run_sweep(spec, 1)) == format_csv(run_sweep(spec, workers))


def test_uncoded_sweep_matches_theory():
    spec = SweepSpec(None, [0.0, 2.0], max_frames=100, min_bit_errors=0, uncoded_n=10_000)
    for p in run_sweep(spec):
        q = uncoded_ber(p.ebno_db)
        assert abs(p.ber - q) <= 3 * math.sqrt(q * (1 - q) / p.bits)


def test_sweep_spec_validation(cfg):
    with pytest.raises(ConfigurationError):
        SweepSpec(cfg, [])
    with pytest.raises(ConfigurationError):
        SweepSpec(cfg, [1.0, 0.5])
    with pytest.raises(ConfigurationError):
        SweepSpec(cfg, [1.0], max_frames=0)


def test_parse_ebno():
    assert parse_ebno("0:0.5:2") == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert parse_ebno("0:0.1:0.3") == [0.0, 0.1, 0.2, 0.3]
    assert parse_ebno("1.5") == [1.5]
    assert parse_ebno("0,1,3") == [0.0, 1.0, 3.0]
    for bad in ["0:0:2", "2:0.5:0", "a:b:c", "x"]:
        with pytest.raises(ConfigurationError):
            parse_ebno(bad)


def test_csv_empty():
    assert format_csv(SweepResult()) == "ebno_db,frames,bits,bit_errors,frame_errors,ber,fer\n"


def test_csv_zero_point():
    text = format_csv(SweepResult([PointResult(2.0, 10, 1000, 0, 0)]))
    row = text.splitlines()[1].split(",")
    assert row[5] == "0.000000e+00" and float(row[5]) == 0.0


def test_csv_round_trip(tmp_path):
    res = SweepResult([PointResult(0.25, 10, 10000, 123, 7), PointResult(0.5, 11, 11000, 1, 1)])
    path = tmp_path / "r.csv"
    text = write_csv(res, path)
    assert path.read_text() == text
    back = read_csv(path)
    assert back == res
    assert read_csv(io.StringIO(text)) == res
    ber = text.splitlines()[1].split(",")[5]
    assert len(ber.split("e")[0].replace(".", "")) >= 6


def test_csv_unwritable(tmp_path):
    with pytest.raises(OSError):
        write_csv(SweepResult(), tmp_path / "missing" / "r.csv")
