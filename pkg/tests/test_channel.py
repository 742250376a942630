import numpy as np
import pytest

from baker_aecc.channel import (
    ChannelConfig,
    ModulatedFrame,
    NoiseModel,
    awgn,
    calibrate_n0,
    cqam_pack,
    demodulate,
    derive_seed,
)
from baker_aecc.codec import CodeParams, encode


def test_pack_scaling_and_layout():
    p = CodeParams(3, 2)
    cw = encode([0.5, -0.25, 1.0], p)
    f = cqam_pack(cw, 1.0)
    assert f.i_stream.size == f.q_stream.size == 6 and len(f) == 12
    assert np.array_equal(f.i_stream, cw.x.reshape(-1))
    assert np.array_equal(f.q_stream, cw.y.reshape(-1))
    assert cqam_pack(cw, 0.5).i_stream[4] == 0.5  # branch 3, time 0 carries u_3 = 1.0


def test_pack_demodulate_round_trip():
    p = CodeParams(3, 4)
    rng = np.random.default_rng(0)
    cw = encode(rng.uniform(-1, 1, (50, 3)), p)
    for delta in (1.0, 0.37, 2.0):
        r = demodulate(cqam_pack(cw, delta), delta, p)
        assert np.allclose(r.rx, cw.x, atol=1e-15) and np.allclose(r.ry, cw.y, atol=1e-15)
    r = demodulate(cqam_pack(cw, 0.5), 0.5, p)
    assert np.array_equal(r.rx, cw.x)


def test_demodulate_examples():
    p = CodeParams(3, 2)
    f = ModulatedFrame(np.full(6, 1.0), np.full(6, 3.0))
    r = demodulate(f, 2.0, p)
    assert r.rx.shape == (1, 3, 2)
    assert np.all(r.rx == 0.5)
    assert np.all(r.ry == 1.5)  # no clipping
    with pytest.raises(ValueError):
        demodulate(ModulatedFrame(np.zeros(7), np.zeros(7)), 1.0, p)


def test_calibrate_measured():
    f = ModulatedFrame(np.array([1.0, -1.0, 1.0, -1.0]), np.array([-1.0, 1.0, 1.0, 1.0]))
    cfg = ChannelConfig(snr_db=0.0, symbols_per_pixel=4)
    assert calibrate_n0(cfg, f).n0 == pytest.approx(4.0)
    cfg = ChannelConfig(snr_db=10.0, symbols_per_pixel=4, delta=1.0)
    assert calibrate_n0(cfg, f).n0 == pytest.approx(0.4)
    with pytest.raises(ValueError):
        calibrate_n0(cfg, ModulatedFrame(np.empty(0), np.empty(0)))


def test_energy_accounting():
    p = CodeParams(3, 2)
    rng = np.random.default_rng(4)
    f = cqam_pack(encode(rng.uniform(-1, 1, (100, 3)), p), 0.8)
    cfg = ChannelConfig(snr_db=0.0, symbols_per_pixel=p.symbols_per_pixel, delta=0.8)
    ep = calibrate_n0(cfg, f).n0
    assert ep * 300 == pytest.approx(np.sum(f.i_stream**2) + np.sum(f.q_stream**2), rel=1e-12)


def test_calibrate_nominal():
    cfg = ChannelConfig(snr_db=3.0, ep_mode="nominal", symbols_per_pixel=4, delta=2.0)
    f = ModulatedFrame(np.zeros(3), np.zeros(3))
    assert calibrate_n0(cfg, f).n0 == pytest.approx(4 * 4 / 3 / 10**0.3)


def test_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig(snr_db=1.0, delta=0.0)
    with pytest.raises(ValueError):
        ChannelConfig(snr_db=1.0, ep_mode="peak")
    with pytest.raises(ValueError):
        ChannelConfig(snr_db=1.0, symbols_per_pixel=0)


def test_awgn_deterministic_and_noiseless_limit():
    f = ModulatedFrame(np.linspace(-1, 1, 100), np.linspace(1, -1, 100))
    a = awgn(f, NoiseModel(0.5), derive_seed(7, 1, 2))
    b = awgn(f, NoiseModel(0.5), derive_seed(7, 1, 2))
    c = awgn(f, NoiseModel(0.5), derive_seed(7, 1, 3))
    assert np.array_equal(a.i_stream, b.i_stream) and np.array_equal(a.q_stream, b.q_stream)
    assert not np.array_equal(a.i_stream, c.i_stream)
    z = awgn(f, NoiseModel(0.0), 1)
    assert np.array_equal(z.i_stream, f.i_stream)


def test_awgn_variance_and_whiteness():
    f = ModulatedFrame(np.zeros(500_000), np.zeros(500_000))
    out = awgn(f, NoiseModel(2.0), 12345)
    noise = np.concatenate([out.i_stream, out.q_stream])
    assert 0.995 <= noise.var() <= 1.005
    assert abs(noise.mean()) < 5e-3
    z = noise - noise.mean()
    for lag in range(1, 11):
        rho = np.dot(z[:-lag], z[lag:]) / np.dot(z, z)
        assert abs(rho) < 0.01
