"""OQAM multicarrier modulation with time-reversal prefiltering and real Alamouti coding."""

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DegenerateChannelError,
    FramingError,
    OqamTrError,
    SingularChannelError,
)
from .filters import PrototypeFilter, get_filter
from .harness import BerRecord, SimConfig, run_frame, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ConvergenceError",
    "DegenerateChannelError",
    "FramingError",
    "OqamTrError",
    "SingularChannelError",
    "PrototypeFilter",
    "get_filter",
    "BerRecord",
    "SimConfig",
    "run_frame",
    "run_sweep",
]
