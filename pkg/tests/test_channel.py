import math

import numpy as np
import pytest

from turbofec.channel import ChannelParams, awgn, bpsk_modulate, channel_llr, gaussian
from turbofec.decoder import hard_decision
from turbofec.errors import UsageError


def test_bpsk():
    assert bpsk_modulate([0, 1, 0]).tolist() == [1.0, -1.0, 1.0]
    assert (bpsk_modulate(np.zeros(7)) == 1).all()
    assert bpsk_modulate([]).size == 0


def test_channel_params_closed_forms():
    p = ChannelParams(0.0, 1 / 3)
    assert p.lc == pytest.approx(4 / 3, rel=1e-12)
    assert p.sigma ** 2 == pytest.approx(1.5, rel=1e-12)
    assert p.lc == pytest.approx(2 / p.sigma ** 2, rel=1e-12)
    assert ChannelParams(10 * math.log10(2), 0.5).lc == pytest.approx(4.0, rel=1e-12)
    assert ChannelParams(3.0103, 0.5).lc == pytest.approx(4.0, abs=1e-4)


def test_llr_examples():
    assert channel_llr([1.0], ChannelParams(0.0, 1 / 3).lc)[0] == pytest.approx(1.3333, abs=1e-4)
    assert channel_llr([0.0], 7.3).tolist() == [0.0]


def test_awgn_noiseless(rng):
    x = rng.normal(size=20)
    assert np.array_equal(awgn(x, 0.0, rng), x)


def test_awgn_negative_sigma(rng):
    with pytest.raises(UsageError):
        awgn([1.0], -0.1, rng)


def test_noise_mean():
    n = awgn(np.zeros(10**6), 1.0, np.random.default_rng(5))
    assert abs(n.mean()) < 0.01


def test_noise_variance():
    n = awgn(np.zeros(10**6), 1.5, np.random.default_rng(6))
    assert n.var() == pytest.approx(2.25, rel=0.02)


def test_gaussian_odd_length():
    assert gaussian(np.random.default_rng(0), 7).shape == (7,)


def test_noise_determinism():
    a = awgn(np.zeros(1000), 1.0, np.random.default_rng(11))
    b = awgn(np.zeros(1000), 1.0, np.random.default_rng(11))
    c = awgn(np.zeros(1000), 1.0, np.random.default_rng(12))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_llr_sign_symmetry(rng):
    y = rng.normal(size=100)
    assert np.array_equal(channel_llr(-y, 2.7), -channel_llr(y, 2.7))


def test_noiseless_round_trip(rng):
    bits = rng.integers(0, 2, 500)
    for lc in (0.01, 1.0, 40.0):
        assert np.array_equal(hard_decision(channel_llr(bpsk_modulate(bits), lc)), bits)
