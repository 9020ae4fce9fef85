"""One-tap per-subcarrier equalization and hard decisions."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, FramingError, SingularChannelError
from .oqam import oqam_to_qpsk

__all__ = ["EqualizerConfig", "equalize_oqam", "hard_decide"]


@dataclass(frozen=True)
class EqualizerConfig:
    kind: str = "zf"
    noise_var: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zf", "mmse"):
            raise ConfigurationError(f"unknown equalizer {self.kind!r}")
        if self.noise_var < 0:
            raise ConfigurationError("noise_var must be >= 0")


def equalize_oqam(y, H, cfg: EqualizerConfig = EqualizerConfig(), on_singular="raise"):
    """Real-symbol estimates ``Re{y / H}`` (ZF) or ``Re{y conj(H) / (|H|^2 + nv)}`` (MMSE).

    Zero gains under ZF raise :class:`SingularChannelError`, or with
    ``on_singular="erase"`` produce zero estimates on those subcarriers.
    """
    y = np.asarray(y)
    H = np.asarray(H, dtype=complex).reshape(-1)
    if y.ndim != 2 or H.size != y.shape[0]:
        raise FramingError(f"H has {H.size} entries for a grid of shape {y.shape}")
    if cfg.kind == "mmse":
        w = np.conj(H) / (np.abs(H) ** 2 + cfg.noise_var)
        return (y * w[:, None]).real
    dead = np.flatnonzero(H == 0)
    if dead.size:
        if on_singular == "raise":
            raise SingularChannelError("zero channel gain under ZF", dead)
    inv = np.zeros_like(H)
    live = H != 0
    inv[live] = 1 / H[live]
    return (y * inv[:, None]).real


def hard_decide(grid):
    """Sign decisions on a staggered real grid, then Gray demapping to bits.

    Exactly zero decides bit 0.
    """
    return oqam_to_qpsk(grid)
