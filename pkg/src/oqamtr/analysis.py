"""Intrinsic interference structure of the OQAM lattice.

Over an ideal channel the demodulated output is

    y[m, n] = a[m, n] + sum_{(p,q) != 0} (-1)**(p n) <f_{p,q}, f_{0,0}> a[m+p, n+q]

The inner products do not depend on ``m`` and depend on ``n`` only through
the sign ``(-1)**(p n)``. For a real-orthogonal prototype they are purely
imaginary, so the table keeps their imaginary parts as real weights and the
interference term is ``j a_i[m, n]``.

Subcarriers are cyclic (``M - 1`` neighbors ``0``). With the half-sample phase
reference of even-length filters the basis is anti-periodic in ``m``
(``f_{m+M,n} = -f_{m,n}``), so a neighbor reached across the band edge
enters with the opposite sign. Instants outside the frame count as zero.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, FramingError
from .filters import PrototypeFilter

__all__ = [
    "InterferenceTable",
    "interference_weights",
    "full_interference_table",
    "predict_intrinsic_interference",
    "residual_interference_grid",
    "residual_interference",
    "localization_measures",
    "HEISENBERG_BOUND",
]

HEISENBERG_BOUND = 1 / (4 * np.pi)


@dataclass(frozen=True, eq=False)
class InterferenceTable:
    """Weights ``w[p, q] = Im<f_{p,q}, f_{0,0}>`` for ``|p| <= delta_m``, ``|q| <= delta_n``.

    ``real_parts`` holds the matching real parts; away from the origin they
    measure the filter's departure from real orthogonality. The self term
    ``(0, 0)`` has real part 1 and weight 0.
    """

    weights: np.ndarray
    real_parts: np.ndarray
    delta_m: int
    delta_n: int
    num_subcarriers: int

    def __call__(self, p, q):
        return self.weights[p + self.delta_m, q + self.delta_n]

    def sign(self, p, n):
        """Sign rule ``(-1)**(p n)`` relating position ``(m, n)`` to the reference."""
        return -1.0 if (p * n) % 2 else 1.0

    def format(self, digits=4):
        """Aligned text table: rows are ``p``, columns ``q``."""
        qs = range(-self.delta_n, self.delta_n + 1)
        width = digits + 4
        lines = ["p\\q  " + "".join(f"{q:>{width}d}" for q in qs)]
        for i, p in enumerate(range(-self.delta_m, self.delta_m + 1)):
            # + 0.0 folds -0.0 into 0.0
            row = "".join(f"{round(w, digits) + 0.0:>{width}.{digits}f}" for w in self.weights[i])
            lines.append(f"{p:>4d} {row}")
        return "\n".join(lines)


def interference_weights(f: PrototypeFilter, delta_m: int, delta_n: int) -> InterferenceTable:
    """Tabulate ``<f_{p,q}, f_{0,0}>`` by direct summation over samples.

    ``delta_m = M // 2`` covers every subcarrier of the band.
    """
    M = f.num_subcarriers
    if delta_m < 1 or delta_n < 1:
        raise ConfigurationError("neighborhood half-widths must be >= 1")
    if delta_m > M // 2:
        raise ConfigurationError(f"delta_m={delta_m} exceeds M/2={M // 2}")
    c = f.coeffs
    L = c.size
    half = M // 2
    k = np.arange(L)
    ps = np.arange(-delta_m, delta_m + 1)
    carrier = np.exp(2j * np.pi * np.outer(ps, k - (L - 1) / 2) / M)
    vals = np.zeros((ps.size, 2 * delta_n + 1), dtype=complex)
    for j, q in enumerate(range(-delta_n, delta_n + 1)):
        shifted = np.zeros(L)
        s = q * half
        if abs(s) < L:
            if s >= 0:
                shifted[s:] = c[:L - s]
            else:
                shifted[:L + s] = c[-s:]
        prod = c * shifted
        vals[:, j] = carrier @ prod * np.exp(0.5j * np.pi * (ps + q))
    return InterferenceTable(vals.imag.copy(), vals.real.copy(), int(delta_m), int(delta_n), M)


def full_interference_table(f: PrototypeFilter) -> InterferenceTable:
    """Table covering every neighbor a prototype can reach in a frame."""
    M = f.num_subcarriers
    return interference_weights(f, M // 2, max(1, 2 * f.length // M - 1))


def _accumulate(grid, table, include, gains=None):
    grid = np.asarray(grid, dtype=float)
    M, N = grid.shape
    if M != table.num_subcarriers:
        raise FramingError(f"grid has {M} subcarriers, table was built for {table.num_subcarriers}")
    src = grid if gains is None else grid * np.asarray(gains, dtype=complex).reshape(-1)[:, None]
    out = np.zeros((M, N), dtype=src.dtype)
    odd = (np.arange(N) % 2).astype(bool)
    m = np.arange(M)
    dm = min(table.delta_m, M // 2)
    for p in range(-dm, dm + 1):
        if p == -(M // 2):
            # same source subcarrier as p = +M/2
            continue
        # cyclic source m+p; a wrapped source carries the anti-periodic sign
        wrapped = ((m + p) < 0) | ((m + p) >= M)
        shifted = np.roll(src, -p, axis=0)
        shifted = np.where(wrapped[:, None], -shifted, shifted)
        for q in range(-min(table.delta_n, N - 1), min(table.delta_n, N - 1) + 1):
            if (p, q) == (0, 0) or not include(p, q):
                continue
            w = table(p, q)
            if w == 0.0:
                continue
            n0, n1 = max(0, -q), min(N, N - q)
            contrib = w * shifted[:, n0 + q:n1 + q]
            if p % 2:
                contrib = np.where(odd[n0:n1], -contrib, contrib)
            out[:, n0:n1] += contrib
    return out


def predict_intrinsic_interference(grid, table: InterferenceTable):
    """``a_i[m, n]``: weighted sum of the neighbors covered by ``table``."""
    return _accumulate(grid, table, lambda p, q: True)


def residual_interference_grid(grid, H, f: PrototypeFilter, delta_m=1, delta_n=1):
    """Interference from symbols outside the neighborhood ``|p|<=delta_m, |q|<=delta_n``.

    ``|p|`` is the cyclic subcarrier distance.

    Returns the complex grid ``J[m, n] = j sum_{(p,q) outside} (-1)**(p n)
    w[p, q] H[m+p] a[m+p, n+q]``. ``H=None`` means a flat unit channel.
    """
    grid = np.asarray(grid, dtype=float)
    table = full_interference_table(f)
    outside = lambda p, q: abs(p) > delta_m or abs(q) > delta_n  # noqa: E731
    gains = np.ones(grid.shape[0]) if H is None else H
    return 1j * _accumulate(grid, table, outside, gains)


def residual_interference(grid, H, f: PrototypeFilter, delta_m=1, delta_n=1):
    """``max |J[m, n]|`` over the frame; see :func:`residual_interference_grid`."""
    J = residual_interference_grid(grid, H, f, delta_m, delta_n)
    return float(np.max(np.abs(J))) if J.size else 0.0


def localization_measures(f):
    """Time and frequency spreads of a prototype.

    The time spread is the RMS duration about the energy centroid (samples).
    The frequency spread (cycles per sample) uses the first-difference
    energy as the discrete stand-in for the derivative, which slightly
    underestimates the true spread of sharply varying filters. For smooth,
    well-sampled pulses ``heisenberg >= 1/(4 pi)``; ``xi`` is that bound
    divided by the product, 1 for a Gaussian.
    """
    c = f.coeffs if isinstance(f, PrototypeFilter) else np.asarray(f, dtype=float)
    energy = np.dot(c, c)
    k = np.arange(c.size)
    centroid = np.dot(k, c * c) / energy
    time_spread = np.sqrt(np.dot((k - centroid) ** 2, c * c) / energy)
    d = np.diff(np.concatenate(([0.0], c, [0.0])))
    freq_spread = np.sqrt(np.dot(d, d) / energy) / (2 * np.pi)
    product = time_spread * freq_spread
    return {
        "centroid": float(centroid),
        "time_spread": float(time_spread),
        "freq_spread": float(freq_spread),
        "heisenberg": float(product),
        "xi": float(HEISENBERG_BOUND / product),
    }
