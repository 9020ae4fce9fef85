"""OFDM/OQAM transmitter and receiver.

Real symbols ``a[m, n]`` (subcarrier ``m``, real-symbol instant ``n``) are
carried by the basis functions

    f_{m,n}[k] = f[k - n M/2] exp(j 2 pi m (k - (L-1)/2) / M) exp(j pi/2 (m + n))

The synthesis is premodulation, an M-point IFFT per instant, and polyphase
overlap-add at stride M/2. The analysis computes the inner products
``<y, f_{m,n}>`` with the dual chain (windowing, folding, FFT,
postdemodulation).
"""

import numpy as np

from .errors import FramingError

__all__ = [
    "QPSK_AMPLITUDE",
    "qpsk_map",
    "qpsk_demap",
    "qpsk_to_oqam",
    "oqam_to_qpsk",
    "complex_to_staggered",
    "staggered_to_complex",
    "frame_length",
    "synthesize",
    "analyze",
]

QPSK_AMPLITUDE = 1 / np.sqrt(2)


def qpsk_map(bits):
    """Gray-map bit pairs to unit-energy QPSK points.

    Bit 0 maps to ``+1/sqrt(2)`` and bit 1 to ``-1/sqrt(2)`` on each axis;
    the first bit of a pair drives the in-phase component.
    """
    bits = np.asarray(bits).astype(np.int8).ravel()
    if bits.size % 2:
        raise FramingError("QPSK mapping needs an even number of bits")
    levels = QPSK_AMPLITUDE * (1 - 2 * bits.astype(float))
    return levels[0::2] + 1j * levels[1::2]


def qpsk_demap(symbols):
    """Hard decisions for :func:`qpsk_map`; exact zero decides bit 0."""
    s = np.asarray(symbols).ravel()
    bits = np.empty(2 * s.size, dtype=np.int8)
    bits[0::2] = s.real < 0
    bits[1::2] = s.imag < 0
    return bits


def complex_to_staggered(symbols):
    """Split an ``M x T`` complex grid into an ``M x 2T`` real grid.

    The real part goes to instant ``2t`` and the imaginary part to ``2t+1``.
    """
    symbols = np.asarray(symbols)
    M, T = symbols.shape
    grid = np.empty((M, 2 * T))
    grid[:, 0::2] = symbols.real
    grid[:, 1::2] = symbols.imag
    return grid


def staggered_to_complex(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.shape[1] % 2:
        raise FramingError("staggered grid needs an even number of instants")
    return grid[:, 0::2] + 1j * grid[:, 1::2]


def qpsk_to_oqam(bits, M):
    """Bits to an ``M x N`` real OQAM grid.

    Consecutive bit pairs fill subcarriers first: QPSK symbol ``i`` lands on
    subcarrier ``i % M`` at QPSK instant ``i // M``.
    """
    bits = np.asarray(bits).ravel()
    if bits.size % (2 * M):
        raise FramingError(f"bit count {bits.size} is not a multiple of 2M = {2 * M}")
    sym = qpsk_map(bits).reshape(-1, M).T
    return complex_to_staggered(sym)


def oqam_to_qpsk(grid):
    """Inverse of :func:`qpsk_to_oqam` through hard decisions."""
    sym = staggered_to_complex(grid)
    return qpsk_demap(sym.T.ravel())


def frame_length(M, N, L):
    """Number of samples produced by :func:`synthesize`."""
    return (N - 1) * (M // 2) + L


def _phase(M, N, L):
    # burst n starts at sample n M/2, so the carrier phase at its first
    # local sample is exp(j pi m n)
    m = np.arange(M)[:, None]
    n = np.arange(N)[None, :]
    return (np.exp(0.5j * np.pi * (m + n) - 1j * np.pi * m * (L - 1) / M)
            * np.where((m * n) % 2, -1.0, 1.0))


def synthesize(grid, f):
    """Modulate a real ``M x N`` grid with prototype ``f``.

    Returns a complex vector of length ``(N-1) M/2 + L``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2:
        raise FramingError("grid must be two-dimensional")
    M, N = grid.shape
    if f.num_subcarriers != M:
        raise FramingError(f"filter designed for M={f.num_subcarriers}, grid has M={M}")
    L = f.length
    half = M // 2
    X = grid * _phase(M, N, L)
    # M * IFFT gives sum_m X[m] exp(+j 2 pi m k / M)
    b = M * np.fft.ifft(X, axis=0)
    bursts = np.tile(b.T, (1, L // M)) * f.coeffs
    n_seg = L // half
    segs = bursts.reshape(N, n_seg, half)
    out = np.zeros((N + n_seg - 1, half), dtype=complex)
    for j in range(n_seg):
        out[j:j + N] += segs[:, j]
    return out.ravel()


def analyze(signal, f, M, N):
    """Demodulate ``N`` instants: ``y[m, n] = sum_k signal[k] conj(f_{m,n}[k])``.

    ``signal[0]`` must be aligned with the first sample of the first burst.
    Samples past the last burst are ignored.
    """
    signal = np.asarray(signal)
    if f.num_subcarriers != M:
        raise FramingError(f"filter designed for M={f.num_subcarriers}, asked for M={M}")
    L = f.length
    need = frame_length(M, N, L)
    if signal.size < need:
        raise FramingError(f"signal has {signal.size} samples, {need} needed for N={N}")
    windows = np.lib.stride_tricks.sliding_window_view(signal[:need], L)[::M // 2]
    folded = (windows * f.coeffs).reshape(N, L // M, M).sum(axis=1)
    Y = np.fft.fft(folded, axis=1).T
    return Y * np.conj(_phase(M, N, L))
