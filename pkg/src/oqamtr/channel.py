"""Tapped-delay-line Rayleigh block-fading channel and AWGN."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "PowerDelayProfile",
    "ChannelRealization",
    "REFERENCE_PROFILE",
    "DELAY_MODES",
    "delays_to_samples",
    "delay_matrix",
    "draw_channel",
    "unit_channel",
    "apply_channel",
    "add_awgn",
    "channel_frequency_response",
]

DELAY_MODES = ("floor", "nearest", "sinc8")
SINC_TAPS = 8
# bulk delay that keeps the sinc8 branch causal
SINC_OFFSET = SINC_TAPS // 2 - 1


@dataclass(frozen=True)
class PowerDelayProfile:
    """Relative path powers (dB) and delays (microseconds)."""

    powers_db: tuple
    delays_us: tuple
    fs_hz: float = 10e6

    def __post_init__(self):
        p = tuple(float(v) for v in self.powers_db)
        d = tuple(float(v) for v in self.delays_us)
        object.__setattr__(self, "powers_db", p)
        object.__setattr__(self, "delays_us", d)
        if not p or len(p) != len(d):
            raise ConfigurationError("powers_db and delays_us must be nonempty and of equal length")
        if d[0] != 0 or any(b < a for a, b in zip(d, d[1:])):
            raise ConfigurationError("delays must start at 0 and be nondecreasing")
        if not self.fs_hz > 0:
            raise ConfigurationError("fs_hz must be positive")

    @property
    def linear_powers(self):
        """Path powers normalized to unit sum."""
        p = 10.0 ** (np.array(self.powers_db) / 10)
        return p / p.sum()


REFERENCE_PROFILE = PowerDelayProfile((0.0, -3.0, -2.2), (0.0, 0.2527, 0.32), 10e6)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    taps: np.ndarray
    profile: PowerDelayProfile | None = None
    seed_id: int | None = None
    path_gains: np.ndarray | None = field(default=None, repr=False)

    @property
    def memory(self):
        return self.taps.size - 1


def delays_to_samples(profile: PowerDelayProfile, mode: str = "floor"):
    """Convert path delays to sample units.

    ``floor`` and ``nearest`` return integer delays (half-up rounding for
    ``nearest``). ``sinc8`` returns the fractional-delay design matrix of
    :func:`delay_matrix`.
    """
    x = np.array(profile.delays_us) * 1e-6 * profile.fs_hz
    # delays like 0.2527 us * 10 MHz are not exact in binary; snap first
    x = np.round(x, 9)
    if mode == "floor":
        return np.floor(x).astype(int)
    if mode == "nearest":
        return np.floor(x + 0.5).astype(int)
    if mode == "sinc8":
        return delay_matrix(profile, mode)
    raise ConfigurationError(f"unknown delay mode {mode!r}; expected one of {DELAY_MODES}")


def delay_matrix(profile: PowerDelayProfile, mode: str = "floor"):
    """Matrix ``D`` with ``taps = D.T @ path_gains``.

    Integer modes give one-hot rows, so colliding paths add. ``sinc8`` rows
    are Hamming-windowed sinc interpolators centered on the fractional delay
    plus a bulk offset of ``SINC_OFFSET`` samples, scaled to unit energy.
    """
    if mode in ("floor", "nearest"):
        d = delays_to_samples(profile, mode)
        D = np.zeros((d.size, d.max() + 1))
        D[np.arange(d.size), d] = 1.0
        return D
    if mode != "sinc8":
        raise ConfigurationError(f"unknown delay mode {mode!r}; expected one of {DELAY_MODES}")
    x = np.round(np.array(profile.delays_us) * 1e-6 * profile.fs_hz, 9) + SINC_OFFSET
    start = np.floor(x).astype(int) - SINC_OFFSET
    D = np.zeros((x.size, start.max() + SINC_TAPS))
    for i, (xi, s) in enumerate(zip(x, start)):
        n = np.arange(s, s + SINC_TAPS)
        t = n - xi
        w = np.sinc(t) * (0.54 + 0.46 * np.cos(2 * np.pi * t / SINC_TAPS))
        D[i, n] = w / np.linalg.norm(w)
    return D


def draw_channel(profile: PowerDelayProfile, rng_seed: int, mode: str = "floor") -> ChannelRealization:
    """Draw one Rayleigh realization on the sample grid.

    Path ``l`` has gain ``sqrt(p_l / 2) (g1 + j g2)`` with standard normal
    ``g1, g2`` and powers normalized to unit sum.
    """
    rng = np.random.default_rng(rng_seed)
    p = profile.linear_powers
    g = np.sqrt(p / 2) * (rng.standard_normal(p.size) + 1j * rng.standard_normal(p.size))
    taps = delay_matrix(profile, mode).T @ g
    taps.setflags(write=False)
    return ChannelRealization(taps, profile, rng_seed, g)


def unit_channel() -> ChannelRealization:
    """The identity channel ``h = [1]``."""
    return ChannelRealization(np.ones(1, dtype=complex))


def apply_channel(x, h):
    """Full linear convolution ``x * h``."""
    taps = h.taps if isinstance(h, ChannelRealization) else np.asarray(h)
    return np.convolve(np.asarray(x), taps)


def add_awgn(x, snr_db, signal_power, rng_seed):
    """Add circular complex Gaussian noise of variance ``signal_power * 10**(-snr_db/10)``.

    ``snr_db = inf`` returns ``x`` unchanged.
    """
    x = np.asarray(x)
    if math.isinf(snr_db) and snr_db > 0:
        return x.copy()
    if not signal_power > 0:
        raise ConfigurationError("signal_power must be positive")
    var = signal_power * 10.0 ** (-snr_db / 10)
    rng = np.random.default_rng(rng_seed)
    noise = rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size)
    return x + np.sqrt(var / 2) * noise.reshape(x.shape)


def channel_frequency_response(h, M):
    """``H[m] = sum_l h[l] exp(-j 2 pi m l / M)``."""
    taps = h.taps if isinstance(h, ChannelRealization) else np.asarray(h)
    if taps.size > M:
        raise ConfigurationError(f"channel memory {taps.size - 1} must be below M={M}")
    return np.fft.fft(taps, M)
