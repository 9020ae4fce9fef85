"""CP-OFDM baseline transceiver, including the classical 2x1 Alamouti code."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, FramingError, SingularChannelError

__all__ = [
    "CpOfdmConfig",
    "cp_modulate",
    "cp_demodulate",
    "alamouti_encode",
    "alamouti_combine",
]


@dataclass(frozen=True)
class CpOfdmConfig:
    M: int
    cp_len: int = 32
    constellation: str = "qpsk"

    def __post_init__(self):
        if not 0 <= self.cp_len < self.M:
            raise ConfigurationError(f"cp_len must satisfy 0 <= cp_len < M, got {self.cp_len}")
        if self.constellation != "qpsk":
            raise ConfigurationError(f"unsupported constellation {self.constellation!r}")

    @property
    def symbol_length(self):
        return self.M + self.cp_len


def cp_modulate(symbols, cfg: CpOfdmConfig):
    """Unitary IFFT per column, prepend the cyclic prefix, concatenate."""
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.ndim != 2 or symbols.shape[0] != cfg.M or symbols.shape[1] < 1:
        raise FramingError(f"expected an {cfg.M} x N grid with N >= 1, got {symbols.shape}")
    x = np.fft.ifft(symbols, axis=0, norm="ortho")
    if cfg.cp_len:
        x = np.concatenate([x[-cfg.cp_len:], x], axis=0)
    return x.T.ravel()


def cp_demodulate(signal, cfg: CpOfdmConfig, H=None, equalizer="zf", noise_var=0.0):
    """Strip prefixes, unitary FFT, one-tap equalization.

    Parameters
    ----------
    signal : array_like
        Received samples; only the first ``N * (M + cp_len)`` are used where
        ``N`` is the number of whole OFDM symbols available.
    H : array_like, optional
        Per-subcarrier channel gains. ``None`` skips equalization.
    equalizer : {"zf", "mmse"}
    noise_var : float
        Noise-to-symbol-energy ratio for MMSE.

    Returns
    -------
    ndarray
        ``M x N`` grid of equalized symbols.
    """
    signal = np.asarray(signal, dtype=complex)
    S = cfg.symbol_length
    N = signal.size // S
    if N < 1:
        raise FramingError(f"need at least {S} samples, got {signal.size}")
    blocks = signal[:N * S].reshape(N, S)[:, cfg.cp_len:]
    Y = np.fft.fft(blocks, axis=1, norm="ortho").T
    if H is None:
        return Y
    H = np.asarray(H, dtype=complex).reshape(-1)
    if H.size != cfg.M:
        raise FramingError(f"H has {H.size} entries, expected {cfg.M}")
    if equalizer == "zf":
        zero = np.flatnonzero(H == 0)
        if zero.size:
            raise SingularChannelError("zero channel gain under ZF", zero)
        return Y / H[:, None]
    if equalizer == "mmse":
        return Y * (np.conj(H) / (np.abs(H) ** 2 + noise_var))[:, None]
    raise ConfigurationError(f"unknown equalizer {equalizer!r}")


def alamouti_encode(symbols):
    """Space-time code over pairs of OFDM symbols, per subcarrier.

    Antenna 0 sends ``(s1, -conj(s2))`` and antenna 1 ``(s2, conj(s1))``.
    No power scaling is applied.
    """
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.shape[1] % 2:
        raise FramingError("Alamouti coding needs an even number of OFDM symbols")
    s1, s2 = symbols[:, 0::2], symbols[:, 1::2]
    x0 = np.empty_like(symbols)
    x1 = np.empty_like(symbols)
    x0[:, 0::2], x0[:, 1::2] = s1, -np.conj(s2)
    x1[:, 0::2], x1[:, 1::2] = s2, np.conj(s1)
    return x0, x1


def alamouti_combine(Y, H0, H1):
    """Linear Alamouti combining with per-subcarrier gains ``H0``, ``H1``."""
    Y = np.asarray(Y, dtype=complex)
    H0 = np.asarray(H0, dtype=complex)[:, None]
    H1 = np.asarray(H1, dtype=complex)[:, None]
    norm = np.abs(H0) ** 2 + np.abs(H1) ** 2
    zero = np.flatnonzero(norm[:, 0] == 0)
    if zero.size:
        raise SingularChannelError("both Alamouti branches vanish", zero)
    r1, r2 = Y[:, 0::2], Y[:, 1::2]
    out = np.empty_like(Y)
    out[:, 0::2] = (np.conj(H0) * r1 + H1 * np.conj(r2)) / norm
    out[:, 1::2] = (np.conj(H1) * r1 - H0 * np.conj(r2)) / norm
    return out
