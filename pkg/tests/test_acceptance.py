"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the pytest terminal summary.
"""

import math
import time

import numpy as np

from oqamtr import alamouti, channel, timereversal
from oqamtr.analysis import (interference_weights, predict_intrinsic_interference,
                             residual_interference_grid)
from oqamtr.filters import get_filter
from oqamtr.harness import SimConfig, run_sweep
from oqamtr.io import emit_csv
from oqamtr.oqam import QPSK_AMPLITUDE, analyze, synthesize

from oracles import binomial_sigma, direct_synthesis, qpsk_ber

# QPSK: Es/N0 = Eb/N0 + 10 log10(2)
BITS_PER_SYMBOL_DB = 10 * math.log10(2)
SWEEP_SNR = [0, 5, 10, 15, 20, 25, 30]


def _random_grid(rng, M, N):
    return rng.choice([-QPSK_AMPLITUDE, QPSK_AMPLITUDE], size=(M, N))


def test_awgn_calibration(acceptance_line):
    ebn0 = [0, 2, 4, 6, 8]
    cfg = SimConfig(scheme="siso_cpofdm", M=64, cp_len=0, channel="awgn",
                    snr_db=[e + BITS_PER_SYMBOL_DB for e in ebn0], min_bits=1_000_000,
                    max_frames=1_000_000, master_seed=101)
    t0 = time.perf_counter()
    recs = run_sweep(cfg)
    elapsed = time.perf_counter() - t0
    z = [abs(r.ber - qpsk_ber(e)) / binomial_sigma(qpsk_ber(e), r.bits) for r, e in zip(recs, ebn0)]
    ok = all(v <= 3 for v in z) and all(r.bits >= 1_000_000 for r in recs) and elapsed < 120
    assert acceptance_line(1, ok, f"max |z| = {max(z):.2f} (<= 3), {recs[0].bits} bits/point, "
                                  f"{elapsed:.1f} s")


def test_perfect_reconstruction(acceptance_line):
    rng = np.random.default_rng(102)
    worst = {"tfl1": 0.0, "iota4": 0.0}
    for M in (8, 16, 32, 64):
        for name in worst:
            f = get_filter(name, M)
            for _ in range(5):
                grid = _random_grid(rng, M, 24)
                err = np.max(np.abs(analyze(synthesize(grid, f), f, M, 24).real - grid))
                worst[name] = max(worst[name], err)
    ok = worst["tfl1"] <= 1e-10 and worst["iota4"] <= 1e-3
    assert acceptance_line(2, ok, f"tfl1 {worst['tfl1']:.2e} (<= 1e-10), "
                                  f"iota4 {worst['iota4']:.2e} (<= 1e-3)")


def test_polyphase_equivalence(acceptance_line):
    rng = np.random.default_rng(103)
    diffs = {}
    for name in ("iota4", "tfl1"):
        f = get_filter(name, 16)
        grid = _random_grid(rng, 16, 8)
        diffs[name] = np.max(np.abs(synthesize(grid, f) - direct_synthesis(grid, f.coeffs, 16)))
    ok = max(diffs.values()) <= 1e-10
    assert acceptance_line(3, ok, ", ".join(f"{k} {v:.2e}" for k, v in diffs.items()) + " (<= 1e-10)")


def test_tr_realness(acceptance_line):
    res, c0_err = 0.0, 0.0
    for seed in range(1000):
        h = channel.draw_channel(channel.REFERENCE_PROFILE, seed).taps
        eq = timereversal.equivalent_channel(h, timereversal.tr_prefilter(h), M=128)
        res = max(res, eq.max_imag_residual)
        c0 = np.sum(np.abs(h) ** 2) / np.linalg.norm(h)
        c0_err = max(c0_err, abs(eq.center_tap - c0))
    h = np.array([1, 0.5])
    hand = timereversal.equivalent_channel(h, timereversal.tr_prefilter(h, normalize=False)).taps
    hand_ok = np.array_equal(hand, [0.5, 1.25, 0.5])
    ok = res <= 1e-10 and c0_err <= 1e-12 and hand_ok
    assert acceptance_line(4, ok, f"imag residual {res:.2e} (<= 1e-10), c0 error {c0_err:.2e} "
                                  f"(<= 1e-12), hand case {'exact' if hand_ok else hand}")


def test_alamouti_algebra(acceptance_line):
    rng = np.random.default_rng(105)
    a = rng.standard_normal((10_000, 2))
    H0, H1 = rng.standard_normal((2, 10_000))
    coded = alamouti.gr2_encode(a)
    y = H0[:, None] * coded.antenna0 + H1[:, None] * coded.antenna1
    err = np.max(np.abs(alamouti.gr2_decode(y, alamouti.MisoEqualizedPair(H0, H1)) - a))
    pair = np.array([[1.0, -1.0]])
    c = alamouti.gr2_encode(pair)
    worked = alamouti.gr2_decode(2 * c.antenna0 + 0.5 * c.antenna1,
                                 alamouti.MisoEqualizedPair(2.0, 0.5))
    worked_ok = np.allclose(worked, pair, rtol=0, atol=1e-15)
    ok = err <= 1e-12 and worked_ok
    assert acceptance_line(5, ok, f"max error {err:.2e} over 1e4 trials (<= 1e-12), worked pair "
                                  f"-> {worked.ravel().round(15).tolist()}")


def test_interference_decomposition(acceptance_line):
    rng = np.random.default_rng(106)
    decomp, ratio = 0.0, 0.0
    for M in (8, 16, 32):
        f = get_filter("tfl1", M)
        table = interference_weights(f, 1, 1)
        for _ in range(5):
            N = 16
            grid = _random_grid(rng, M, N)
            y = analyze(synthesize(grid, f), f, M, N)
            ai = predict_intrinsic_interference(grid, table)
            J = residual_interference_grid(grid, None, f, 1, 1)
            decomp = max(decomp, np.max(np.abs(y.imag - (ai + J.imag))))
            ratio = max(ratio, np.max(np.abs(J)) / np.max(np.abs(y.imag)))
    ok = decomp <= 1e-8 and ratio <= 1e-2
    assert acceptance_line(6, ok, f"decomposition error {decomp:.2e} (<= 1e-8), "
                                  f"Omega=1x1 max|J|/max|a_i| = {ratio:.3f} (<= 1e-2)")


def _ordering(better, worse, min_snr=10.0):
    """BER(better) <= BER(worse) at every point >= min_snr, and CI separation count."""
    pts = [(b, w) for b, w in zip(better, worse) if b.snr_db >= min_snr]
    le = all(b.ber <= w.ber for b, w in pts)
    separated = sum(b.ci()[1] < w.ci()[0] for b, w in pts)
    return le, separated


def _fmt(recs):
    return " ".join(f"{r.snr_db:g}:{r.ber:.2e}" for r in recs if r.snr_db >= 10)


def test_siso_ordering(acceptance_line):
    common = dict(M=128, equalizer="zf", snr_db=SWEEP_SNR, min_bits=1_000_000,
                  max_frames=100_000, master_seed=107)
    t0 = time.perf_counter()
    oq = run_sweep(SimConfig(scheme="siso_oqam", filter="iota4", **common))
    cp = run_sweep(SimConfig(scheme="siso_cpofdm", **common))
    elapsed = time.perf_counter() - t0
    le, sep = _ordering(oq, cp)
    ok = le and sep >= 2 and elapsed < 600
    assert acceptance_line(7, ok, f"oqam<=cp at all >=10 dB: {le}, CI-separated points {sep} "
                                  f"(>= 2), {elapsed:.0f} s | oqam {_fmt(oq)} | cp {_fmt(cp)}")


def test_miso_ordering(acceptance_line):
    common = dict(M=128, equalizer="zf", snr_db=SWEEP_SNR, min_bits=1_000_000,
                  max_frames=100_000, master_seed=108, miso_power="total")
    t0 = time.perf_counter()
    tr = run_sweep(SimConfig(scheme="alamouti_tr_oqam", filter="iota4", **common))
    acp = run_sweep(SimConfig(scheme="alamouti_cpofdm", **common))
    soq = run_sweep(SimConfig(scheme="siso_oqam", filter="iota4", **common))
    scp = run_sweep(SimConfig(scheme="siso_cpofdm", **common))
    elapsed = time.perf_counter() - t0
    le, sep = _ordering(tr, acp)
    div_oq = _ordering(tr, soq)
    div_cp = _ordering(acp, scp)
    diversity = all(l and s >= 2 for l, s in (div_oq, div_cp))
    ok = le and sep >= 2 and diversity
    assert acceptance_line(8, ok, f"tr_oqam<=alamouti_cp at all >=10 dB: {le}, CI-separated {sep} "
                                  f"(>= 2); alamouti beats siso: oqam {div_oq}, cp {div_cp}; "
                                  f"{elapsed:.0f} s | tr {_fmt(tr)} | cp {_fmt(acp)}")


def test_determinism(acceptance_line):
    texts = {}
    for workers in (1, 8):
        recs = []
        for scheme in ("siso_oqam", "siso_cpofdm", "alamouti_tr_oqam", "alamouti_cpofdm"):
            cfg = SimConfig(scheme=scheme, M=64, snr_db=[0, 10, 20], min_bits=50_000,
                            master_seed=109)
            recs += run_sweep(cfg, workers=workers)
        texts[workers] = emit_csv(recs).encode()
    ok = texts[1] == texts[8]
    assert acceptance_line(9, ok, f"1 vs 8 workers CSV byte-identical: {ok} "
                                  f"({len(texts[1])} bytes)")
