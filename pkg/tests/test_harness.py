import math

import numpy as np
import pytest

from oqamtr import alamouti, channel, oqam, timereversal
from oqamtr.errors import ConfigurationError
from oqamtr.filters import get_filter
from oqamtr.harness import (SCHEMES, BerRecord, SimConfig, bits_per_frame, derive_seed,
                            run_frame, run_sweep)

from oracles import binomial_sigma, qpsk_ber


@pytest.mark.parametrize("scheme", SCHEMES)
def test_noiseless_unit_channel_loopback(scheme):
    cfg = SimConfig(scheme=scheme, M=32, cp_len=8, channel="awgn", filter="tfl1")
    for seed in range(3):
        assert run_frame(cfg, seed, math.inf) == (bits_per_frame(cfg), 0)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_frame_determinism(scheme):
    cfg = SimConfig(scheme=scheme, M=32, cp_len=8)
    assert run_frame(cfg, 11, 8.0) == run_frame(cfg, 11, 8.0)


@pytest.mark.parametrize("scheme", ["siso_cpofdm", "alamouti_cpofdm"])
def test_cp_schemes_noiseless_rayleigh(scheme):
    # cp_len covers the 3-sample channel memory
    cfg = SimConfig(scheme=scheme, M=32, cp_len=4)
    assert sum(run_frame(cfg, s, math.inf)[1] for s in range(20)) == 0


def test_alamouti_reduces_to_siso_on_unit_channels():
    rng = np.random.default_rng(0)
    M, N = 32, 12
    f = get_filter("iota4", M)
    grid = oqam.qpsk_to_oqam(rng.integers(0, 2, M * N), M)
    siso = oqam.analyze(oqam.synthesize(grid, f), f, M, N).real
    coded = alamouti.gr2_encode(grid)
    s = sum(oqam.synthesize(g, f) / np.sqrt(2) for g in (coded.antenna0, coded.antenna1))
    y = oqam.analyze(s, f, M, N).real
    mimo = alamouti.gr2_decode(y, alamouti.MisoEqualizedPair(np.full(M, 2 ** -0.5),
                                                             np.full(M, 2 ** -0.5)))
    assert np.array_equal(oqam.oqam_to_qpsk(mimo), oqam.oqam_to_qpsk(siso))


def test_tr_gr2_chain_recovers_grid():
    # TR turns the channel real per subcarrier, so Re{} then GR2 recovers the symbols
    rng = np.random.default_rng(1)
    M, N = 256, 8
    f = get_filter("tfl1", M)
    grid = oqam.qpsk_to_oqam(rng.integers(0, 2, M * N), M)
    coded = alamouti.gr2_encode(grid)
    rx, gains = 0, []
    for j, g in enumerate((coded.antenna0, coded.antenna1)):
        h = channel.draw_channel(channel.REFERENCE_PROFILE, 10 + j)
        pre = timereversal.tr_prefilter(h)
        rx = rx + channel.apply_channel(np.convolve(oqam.synthesize(g, f), pre), h)
        eq = timereversal.equivalent_channel(h, pre, M)
        gains.append(eq.freq_response)
    y = oqam.analyze(rx[eq.center_index:], f, M, N)
    out = alamouti.gr2_decode(y.real, alamouti.MisoEqualizedPair(*gains))
    assert np.array_equal(oqam.oqam_to_qpsk(out), oqam.oqam_to_qpsk(grid))
    # the residual is channel-induced leakage, small compared with the symbols
    assert np.median(np.abs(out - grid)) < 0.05


def test_awgn_point_cpofdm():
    # Es/N0 = Eb/N0 + 3 dB for QPSK
    cfg = SimConfig(scheme="siso_cpofdm", M=64, cp_len=0, channel="awgn",
                    snr_db=[6 + 10 * math.log10(2)], min_bits=200_000)
    (r,) = run_sweep(cfg)
    p = qpsk_ber(6.0)
    assert p == pytest.approx(2.39e-3, rel=0.01)
    assert abs(r.ber - p) <= 3 * binomial_sigma(p, r.bits)


def test_sweep_noise_off():
    cfg = SimConfig(scheme="siso_oqam", M=32, channel="awgn", filter="tfl1",
                    snr_db=[math.inf], min_bits=10_000)
    (r,) = run_sweep(cfg)
    assert r.bit_errors == 0 and r.ber == 0.0
    assert r.bits >= 10_000 and not r.truncated


def test_truncation_flag():
    cfg = SimConfig(scheme="siso_oqam", M=32, snr_db=[10.0], min_bits=100_000, max_frames=3)
    (r,) = run_sweep(cfg)
    assert r.truncated and r.frames == 3 and r.bits == 3 * bits_per_frame(cfg)


def test_sorted_by_snr_and_monotone():
    cfg = SimConfig(scheme="siso_cpofdm", M=64, snr_db=[12.0, 0.0, 6.0], min_bits=100_000)
    recs = run_sweep(cfg)
    assert [r.snr_db for r in recs] == [0.0, 6.0, 12.0]
    for lo, hi in zip(recs, recs[1:]):
        # BER at +6 dB is not above BER at the lower point, up to CI overlap
        assert hi.ci()[0] <= lo.ci()[1]


def test_workers_do_not_change_results():
    cfg = SimConfig(scheme="alamouti_tr_oqam", M=32, snr_db=[5.0, 15.0], min_bits=20_000)
    assert run_sweep(cfg, workers=1) == run_sweep(cfg, workers=3)


def test_seed_derivation():
    assert derive_seed(0, 0, 0) == derive_seed(0, 0, 0)
    seeds = {derive_seed(0, i, k) for i in range(3) for k in range(100)}
    assert len(seeds) == 300


def test_record_ci():
    r = BerRecord("siso_oqam", "iota4", 10.0, 1, 1000, 100, 0)
    assert r.ber == 0.1
    lo, hi = r.ci()
    assert lo == pytest.approx(0.1 - 3 * math.sqrt(0.09 / 1000))
    assert hi == pytest.approx(0.1 + 3 * math.sqrt(0.09 / 1000))


@pytest.mark.parametrize("kw", [
    {"scheme": "mimo"},
    {"M": 100},
    {"snr_db": []},
    {"min_bits": 5000},
    {"frame_symbols": 51},
    {"scheme": "alamouti_cpofdm", "frame_symbols": 50},
    {"equalizer": "dfe"},
    {"delay_mode": "ceil"},
    {"filter": "hermite"},
])
def test_invalid_configs(kw):
    with pytest.raises(ConfigurationError):
        SimConfig(**kw)
