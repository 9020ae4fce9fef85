"""Time-reversal prefiltering and the resulting equivalent channel.

With perfect channel knowledge the cascade of the prefilter and the channel
is the (scaled) channel autocorrelation: Hermitian-symmetric around its
center tap, hence real in the frequency domain once the center delay is
compensated. That realness is what keeps the OQAM intrinsic interference
purely imaginary after the channel.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import DegenerateChannelError

__all__ = [
    "EquivalentChannel",
    "tr_prefilter",
    "equivalent_channel",
    "estimate_channel",
    "centered_response",
]


@dataclass(frozen=True, eq=False)
class EquivalentChannel:
    """Prefilter-channel cascade ``c``.

    ``freq_response`` is the real part of the center-aligned DFT on ``M``
    bins; ``max_imag_residual`` is the largest imaginary part discarded,
    relative to ``|c[center_index]|``.
    """

    taps: np.ndarray
    center_index: int
    freq_response: np.ndarray
    max_imag_residual: float

    @property
    def center_tap(self):
        return self.taps[self.center_index]

    def hermitian_defect(self):
        c = self.taps
        k = self.center_index
        n = min(k, c.size - 1 - k)
        if n == 0:
            return 0.0
        left = c[k - n:k][::-1]
        right = c[k + 1:k + 1 + n]
        return float(np.max(np.abs(right - np.conj(left))))


def _taps(h):
    return h.taps if isinstance(h, ChannelRealization) else np.asarray(h, dtype=complex)


def tr_prefilter(h_est, normalize=True):
    """Conjugated, time-reversed channel estimate.

    With ``normalize`` (the default) the prefilter is scaled to unit
    energy so the transmit power does not depend on the channel draw;
    ``normalize=False`` gives the plain ``conj(h[::-1])``.
    """
    h = _taps(h_est)
    energy = np.vdot(h, h).real
    if h.size == 0 or energy == 0:
        raise DegenerateChannelError("time reversal of an all-zero channel")
    g = np.conj(h[::-1])
    return g / np.sqrt(energy) if normalize else g


def centered_response(taps, center, M):
    """``C[m] = sum_k c[k] exp(-j 2 pi m (k - center) / M)``."""
    taps = np.asarray(taps, dtype=complex)
    buf = np.zeros(M, dtype=complex)
    np.add.at(buf, (np.arange(taps.size) - center) % M, taps)
    return np.fft.fft(buf)


def equivalent_channel(h, prefilter, M=256) -> EquivalentChannel:
    """Cascade ``prefilter * h`` with its real per-subcarrier response."""
    h = _taps(h)
    g = np.asarray(prefilter, dtype=complex)
    c = np.convolve(g, h)
    center = g.size - 1
    C = centered_response(c, center, M)
    c0 = abs(c[center])
    residual = float(np.max(np.abs(C.imag)) / c0) if c0 > 0 else float("inf")
    c.setflags(write=False)
    return EquivalentChannel(c, center, C.real.copy(), residual)


def estimate_channel(h, estimation_noise_db, rng_seed):
    """Noisy channel estimate for sensitivity studies.

    Adds circular complex Gaussian error of total power
    ``10**(estimation_noise_db/10)`` spread evenly over the nonzero taps.
    ``None`` returns the exact taps.
    """
    taps = _taps(h)
    if estimation_noise_db is None:
        return taps.copy()
    support = np.flatnonzero(taps)
    if support.size == 0:
        support = np.arange(taps.size)
    var = 10.0 ** (estimation_noise_db / 10) / support.size
    rng = np.random.default_rng(rng_seed)
    err = np.sqrt(var / 2) * (rng.standard_normal(support.size) + 1j * rng.standard_normal(support.size))
    out = taps.astype(complex).copy()
    out[support] += err
    return out
