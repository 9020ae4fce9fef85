"""Real orthogonal 2x1 space-time code (GR2) for OQAM symbols.

Over each pair of real-symbol instants ``(n, n+1)`` on subcarrier ``m``
antenna 0 sends ``(a[n], -a[n+1])`` and antenna 1 sends ``(a[n+1], a[n])``.
With real per-subcarrier gains ``H0``, ``H1`` the receiver sees

    y[n]   =  H0 a[n]   + H1 a[n+1]
    y[n+1] = -H0 a[n+1] + H1 a[n]

i.e. ``y = HC a`` with ``HC = [[H0, H1], [H1, -H0]]`` and
``HC.T @ HC = (H0**2 + H1**2) I``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FramingError, SingularChannelError

__all__ = ["StCodedGrids", "MisoEqualizedPair", "gr2_encode", "gr2_decode", "gr2_channel_matrix"]


@dataclass(frozen=True, eq=False)
class StCodedGrids:
    antenna0: np.ndarray
    antenna1: np.ndarray

    def follows_gr2(self, grid):
        """True when both grids are the GR2 coding of ``grid``."""
        a = np.asarray(grid)
        return (np.array_equal(self.antenna0[:, 0::2], a[:, 0::2])
                and np.array_equal(self.antenna0[:, 1::2], -a[:, 1::2])
                and np.array_equal(self.antenna1[:, 0::2], a[:, 1::2])
                and np.array_equal(self.antenna1[:, 1::2], a[:, 0::2]))


@dataclass(frozen=True, eq=False)
class MisoEqualizedPair:
    """Real per-subcarrier equivalent gains of the two branches."""

    H0: np.ndarray
    H1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "H0", np.atleast_1d(np.asarray(self.H0, dtype=float)))
        object.__setattr__(self, "H1", np.atleast_1d(np.asarray(self.H1, dtype=float)))
        if self.H0.shape != self.H1.shape:
            raise FramingError("H0 and H1 must have the same shape")

    @property
    def norm(self):
        return self.H0 ** 2 + self.H1 ** 2


def gr2_encode(grid) -> StCodedGrids:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2 or grid.shape[1] % 2:
        raise FramingError("GR2 coding needs a 2-D grid with an even number of instants")
    even, odd = grid[:, 0::2], grid[:, 1::2]
    a0 = np.empty_like(grid)
    a1 = np.empty_like(grid)
    a0[:, 0::2], a0[:, 1::2] = even, -odd
    a1[:, 0::2], a1[:, 1::2] = odd, even
    return StCodedGrids(a0, a1)


def gr2_channel_matrix(H0, H1):
    """The 2x2 ``HC`` matrix for scalar gains."""
    return np.array([[H0, H1], [H1, -H0]], dtype=float)


def gr2_decode(y, ch: MisoEqualizedPair, on_singular="raise"):
    """Invert the code per pair with ``HC.T / (H0**2 + H1**2)``.

    Parameters
    ----------
    y : array_like
        Real ``M x N`` grid (real part of the demodulated outputs).
    ch : MisoEqualizedPair
        Gains of length ``M`` (or scalars, broadcast over subcarriers).
    on_singular : {"raise", "erase"}
        Subcarriers where both gains vanish either raise
        :class:`SingularChannelError` or get their symbols set to zero.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 2 or y.shape[1] % 2:
        raise FramingError("GR2 decoding needs a 2-D grid with an even number of instants")
    M = y.shape[0]
    H0 = np.broadcast_to(ch.H0, (M,))[:, None]
    H1 = np.broadcast_to(ch.H1, (M,))[:, None]
    norm = H0 ** 2 + H1 ** 2
    dead = np.flatnonzero(norm[:, 0] == 0)
    if dead.size:
        if on_singular == "raise":
            raise SingularChannelError("zero-norm subcarrier in GR2 decoding", dead)
        norm = np.where(norm == 0, np.inf, norm)
    yn, yn1 = y[:, 0::2], y[:, 1::2]
    out = np.empty_like(y)
    out[:, 0::2] = (H0 * yn + H1 * yn1) / norm
    out[:, 1::2] = (H1 * yn - H0 * yn1) / norm
    return out
