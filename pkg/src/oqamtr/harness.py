"""Scheme pipelines and the Monte-Carlo BER sweep.

Four schemes share one frame layout of ``M`` subcarriers by ``N`` real OQAM
instants (``N / 2`` QPSK symbols per subcarrier):

``siso_oqam``        OQAM, one-tap ZF/MMSE on the channel DFT.
``siso_cpofdm``      CP-OFDM, one-tap ZF/MMSE.
``alamouti_tr_oqam`` GR2 on real symbols, time-reversal prefilter per
                     antenna, real-part then GR2 decoding.
``alamouti_cpofdm``  classical complex Alamouti over OFDM symbol pairs.

The SNR is the transmit-referenced ``Es/N0``: the noise variance per sample
is the transmitted frame energy (all antennas) per QPSK data symbol times
``10**(-snr_db/10)``. Overhead such as the cyclic prefix therefore costs
SNR, while filter tails do not dilute the reference.

Every random draw of a frame comes from its integer ``frame_seed``, which the
sweep derives from ``(master_seed, snr_index, frame_index)``. Schemes run
with the same seeds see the same bits, channels and noise streams.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import alamouti, channel, cpofdm, equalizer, oqam, timereversal
from .channel import REFERENCE_PROFILE, PowerDelayProfile
from .errors import ConfigurationError
from .filters import FILTER_NAMES, get_filter

__all__ = [
    "SCHEMES",
    "SimConfig",
    "BerRecord",
    "derive_seed",
    "run_frame",
    "run_sweep",
    "bits_per_frame",
]

log = logging.getLogger(__name__)

SCHEMES = ("siso_oqam", "siso_cpofdm", "alamouti_tr_oqam", "alamouti_cpofdm")
OQAM_SCHEMES = ("siso_oqam", "alamouti_tr_oqam")


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "siso_oqam"
    M: int = 128
    filter: str = "iota4"
    cp_len: int = 32
    profile: PowerDelayProfile = REFERENCE_PROFILE
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    min_bits: int = 100_000
    max_frames: int = 10_000
    master_seed: int = 0
    equalizer: str = "zf"
    delay_mode: str = "floor"
    estimation_noise_db: float | None = None
    frame_symbols: int = 52
    channel: str = "rayleigh"
    miso_power: str = "total"
    tr_normalize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.M < 8 or self.M & (self.M - 1):
            raise ConfigurationError(f"M must be a power of two >= 8, got {self.M}")
        if self.scheme in OQAM_SCHEMES and self.filter not in FILTER_NAMES:
            raise ConfigurationError(f"unknown filter {self.filter!r}")
        if not self.snr_db:
            raise ConfigurationError("snr_db must list at least one point")
        if self.min_bits < 10_000:
            raise ConfigurationError("min_bits must be >= 1e4")
        if self.max_frames < 1:
            raise ConfigurationError("max_frames must be >= 1")
        if self.frame_symbols < 2 or self.frame_symbols % 2:
            raise ConfigurationError("frame_symbols must be an even number of OQAM instants")
        if self.scheme == "alamouti_cpofdm" and self.frame_symbols % 4:
            raise ConfigurationError("alamouti_cpofdm needs an even number of OFDM symbols "
                                     "(frame_symbols divisible by 4)")
        if self.equalizer not in ("zf", "mmse"):
            raise ConfigurationError(f"unknown equalizer {self.equalizer!r}")
        if self.delay_mode not in channel.DELAY_MODES:
            raise ConfigurationError(f"unknown delay_mode {self.delay_mode!r}")
        if self.channel not in ("rayleigh", "awgn"):
            raise ConfigurationError(f"unknown channel {self.channel!r}")
        if self.miso_power not in ("total", "per_antenna"):
            raise ConfigurationError(f"unknown miso_power {self.miso_power!r}")
        if self.scheme not in OQAM_SCHEMES:
            cpofdm.CpOfdmConfig(self.M, self.cp_len)

    @property
    def filter_label(self):
        return self.filter if self.scheme in OQAM_SCHEMES else "rect"


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    filter: str
    snr_db: float
    frames: int
    bits: int
    bit_errors: int
    seed: int
    truncated: bool = field(default=False, compare=False)

    @property
    def ber(self):
        return self.bit_errors / self.bits if self.bits else 0.0

    def ci(self, z=3.0):
        """Normal-approximation binomial interval ``ber +- z sigma``, clipped to [0, 1]."""
        p = self.ber
        half = z * math.sqrt(p * (1 - p) / self.bits) if self.bits else 1.0
        return max(0.0, p - half), min(1.0, p + half)


def derive_seed(master_seed, snr_index, frame_index):
    ss = np.random.SeedSequence([int(master_seed), int(snr_index), int(frame_index)])
    return int(ss.generate_state(1, np.uint64)[0])


def bits_per_frame(cfg: SimConfig):
    return cfg.M * cfg.frame_symbols


def _draw(cfg, seed):
    if cfg.channel == "awgn":
        return channel.unit_channel()
    return channel.draw_channel(cfg.profile, seed, cfg.delay_mode)


def _miso_scale(cfg):
    return 1 / np.sqrt(2) if cfg.miso_power == "total" else 1.0


def _reference_power(energy, n_sym, cfg, antennas):
    if antennas == 2 and cfg.miso_power == "per_antenna":
        return energy / (2 * n_sym)
    return energy / n_sym


def _siso_oqam(cfg, grid, seeds, snr_db):
    M, N = grid.shape
    f = get_filter(cfg.filter, M)
    s = oqam.synthesize(grid, f)
    h = _draw(cfg, seeds[1])
    ref = np.vdot(s, s).real / (M * N // 2)
    r = channel.add_awgn(channel.apply_channel(s, h), snr_db, ref, seeds[3])
    Y = oqam.analyze(r, f, M, N)
    H = channel.channel_frequency_response(h, M)
    nv = ref * 10.0 ** (-snr_db / 10) if math.isfinite(snr_db) else 0.0
    eq = equalizer.EqualizerConfig(cfg.equalizer, nv)
    return equalizer.equalize_oqam(Y, H, eq, on_singular="erase")


def _siso_cpofdm(cfg, grid, seeds, snr_db):
    M, N = grid.shape
    ocfg = cpofdm.CpOfdmConfig(M, cfg.cp_len)
    x = cpofdm.cp_modulate(oqam.staggered_to_complex(grid), ocfg)
    h = _draw(cfg, seeds[1])
    ref = np.vdot(x, x).real / (M * N // 2)
    r = channel.apply_channel(x, h)[:x.size]
    r = channel.add_awgn(r, snr_db, ref, seeds[3])
    H = channel.channel_frequency_response(h, M)
    nv = ref * 10.0 ** (-snr_db / 10) if math.isfinite(snr_db) else 0.0
    if cfg.equalizer == "zf" and np.any(H == 0):
        H = np.where(H == 0, np.inf, H)
    X = cpofdm.cp_demodulate(r, ocfg, H, cfg.equalizer, nv)
    return oqam.complex_to_staggered(X)


def _alamouti_tr_oqam(cfg, grid, seeds, snr_db):
    M, N = grid.shape
    f = get_filter(cfg.filter, M)
    coded = alamouti.gr2_encode(grid)
    scale = _miso_scale(cfg)
    chans = (_draw(cfg, seeds[1]), _draw(cfg, seeds[2]))
    rx = None
    energy = 0.0
    gains = []
    center = 0
    for j, (g, h) in enumerate(zip((coded.antenna0, coded.antenna1), chans)):
        h_est = timereversal.estimate_channel(h, cfg.estimation_noise_db, seeds[4 + j])
        pre = timereversal.tr_prefilter(h_est, normalize=cfg.tr_normalize)
        x = scale * np.convolve(oqam.synthesize(g, f), pre)
        energy += np.vdot(x, x).real
        y = channel.apply_channel(x, h)
        rx = y if rx is None else rx + y
        eq = timereversal.equivalent_channel(h, pre, M)
        gains.append(scale * eq.freq_response)
        center = eq.center_index
    ref = _reference_power(energy, M * N // 2, cfg, 2)
    rx = channel.add_awgn(rx, snr_db, ref, seeds[3])
    Y = oqam.analyze(rx[center:], f, M, N)
    pair = alamouti.MisoEqualizedPair(gains[0], gains[1])
    return alamouti.gr2_decode(Y.real, pair, on_singular="erase")


def _alamouti_cpofdm(cfg, grid, seeds, snr_db):
    M, N = grid.shape
    ocfg = cpofdm.CpOfdmConfig(M, cfg.cp_len)
    x0, x1 = cpofdm.alamouti_encode(oqam.staggered_to_complex(grid))
    scale = _miso_scale(cfg)
    chans = (_draw(cfg, seeds[1]), _draw(cfg, seeds[2]))
    rx = None
    energy = 0.0
    for X, h in zip((x0, x1), chans):
        x = scale * cpofdm.cp_modulate(X, ocfg)
        energy += np.vdot(x, x).real
        y = channel.apply_channel(x, h)[:x.size]
        rx = y if rx is None else rx + y
    ref = _reference_power(energy, M * N // 2, cfg, 2)
    rx = channel.add_awgn(rx, snr_db, ref, seeds[3])
    Y = cpofdm.cp_demodulate(rx, ocfg)
    H0, H1 = (scale * channel.channel_frequency_response(h, M) for h in chans)
    if np.any(np.abs(H0) ** 2 + np.abs(H1) ** 2 == 0):
        return np.zeros((M, N))
    return oqam.complex_to_staggered(cpofdm.alamouti_combine(Y, H0, H1))


_PIPELINES = {
    "siso_oqam": _siso_oqam,
    "siso_cpofdm": _siso_cpofdm,
    "alamouti_tr_oqam": _alamouti_tr_oqam,
    "alamouti_cpofdm": _alamouti_cpofdm,
}


def run_frame(cfg: SimConfig, frame_seed: int, snr_db: float):
    """Simulate one frame; returns ``(bits, bit_errors)``.

    ``snr_db = inf`` switches the noise off.
    """
    seeds = np.random.SeedSequence(int(frame_seed)).generate_state(6)
    rng = np.random.default_rng(seeds[0])
    nbits = bits_per_frame(cfg)
    tx = rng.integers(0, 2, nbits, dtype=np.int8)
    grid = oqam.qpsk_to_oqam(tx, cfg.M)
    try:
        est = _PIPELINES[cfg.scheme](cfg, grid, seeds, snr_db)
    except Exception:
        log.error("frame aborted: scheme=%s seed=%d snr=%s", cfg.scheme, frame_seed, snr_db)
        raise
    rx = equalizer.hard_decide(est)
    return nbits, int(np.count_nonzero(rx != tx))


def _run_chunk(args):
    cfg, jobs = args
    return [run_frame(cfg, derive_seed(cfg.master_seed, i, k), cfg.snr_db[i])[1] for i, k in jobs]


def _chunks(seq, n):
    size = max(1, math.ceil(len(seq) / n))
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def run_sweep(cfg: SimConfig, workers: int = 1):
    """BER at every SNR point of ``cfg``, sorted by SNR.

    Each point runs ``ceil(min_bits / bits_per_frame)`` frames, capped at
    ``max_frames`` (the record is then flagged ``truncated``). Results do not
    depend on ``workers``.
    """
    nbits = bits_per_frame(cfg)
    wanted = math.ceil(cfg.min_bits / nbits)
    frames = min(wanted, cfg.max_frames)
    truncated = wanted > cfg.max_frames
    if truncated:
        log.warning("%s: min_bits=%d needs %d frames, capped at %d",
                    cfg.scheme, cfg.min_bits, wanted, cfg.max_frames)
    jobs = [(i, k) for i in range(len(cfg.snr_db)) for k in range(frames)]
    if workers <= 1:
        errors = _run_chunk((cfg, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [(cfg, c) for c in _chunks(jobs, 4 * workers)])
            errors = [e for part in parts for e in part]
    totals = [0] * len(cfg.snr_db)
    for (i, _), e in zip(jobs, errors):
        totals[i] += e
    records = [
        BerRecord(cfg.scheme, cfg.filter_label, snr, frames, frames * nbits, totals[i],
                  cfg.master_seed, truncated)
        for i, snr in enumerate(cfg.snr_db)
    ]
    return sorted(records, key=lambda r: r.snr_db)


def with_overrides(cfg: SimConfig, **kw):
    return replace(cfg, **kw)
