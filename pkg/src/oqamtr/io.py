"""Config loading, CSV/SVG emission and the plain-text complex dump format."""

from __future__ import annotations

import csv
import io
import itertools
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .channel import REFERENCE_PROFILE, PowerDelayProfile
from .errors import ConfigurationError
from .harness import BerRecord, SimConfig

__all__ = [
    "CONFIG_KEYS",
    "CSV_HEADER",
    "load_configs",
    "configs_from_mapping",
    "emit_csv",
    "parse_csv",
    "emit_plot",
    "dump_complex",
    "load_complex",
]

CSV_HEADER = ("scheme", "filter", "snr_db", "frames", "bits", "bit_errors", "ber", "seed")

# key -> help text; printed by `oqamtr ber --help`
CONFIG_KEYS = {
    "scheme": "siso_oqam | siso_cpofdm | alamouti_tr_oqam | alamouti_cpofdm, or a list of them",
    "M": "number of subcarriers, power of two >= 8 (default 128)",
    "filter": "iota4 | tfl1 | rect, or a list; ignored by CP-OFDM schemes (default iota4)",
    "cp_len": "cyclic prefix length in samples (default 32)",
    "powers_db": "path powers in dB (default [0, -3, -2.2])",
    "delays_us": "path delays in microseconds (default [0, 0.2527, 0.32])",
    "fs_hz": "sampling frequency in Hz (default 10e6)",
    "delay_mode": "floor | nearest | sinc8 (default floor)",
    "snr_db": "list of transmit Es/N0 points in dB",
    "min_bits": "bits per SNR point, >= 1e4 (default 1e5)",
    "max_frames": "frame cap per SNR point (default 10000)",
    "master_seed": "integer seed (default 0)",
    "equalizer": "zf | mmse (default zf)",
    "estimation_noise_db": "channel estimate error power in dB for TR; omit for perfect CSI",
    "frame_symbols": "real OQAM instants per frame, even (default 52)",
    "channel": "rayleigh | awgn (default rayleigh)",
    "miso_power": "total | per_antenna (default total)",
    "tr_normalize": "unit-energy TR prefilter (default true)",
}

def configs_from_mapping(data: dict) -> list[SimConfig]:
    """Build configs from a flat mapping; list-valued scheme/filter expand to a product."""
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    data = dict(data)
    profile = PowerDelayProfile(
        tuple(data.pop("powers_db", REFERENCE_PROFILE.powers_db)),
        tuple(data.pop("delays_us", REFERENCE_PROFILE.delays_us)),
        float(data.pop("fs_hz", REFERENCE_PROFILE.fs_hz)),
    )
    schemes = data.pop("scheme", "siso_oqam")
    filters = data.pop("filter", "iota4")
    schemes = [schemes] if isinstance(schemes, str) else list(schemes)
    filters = [filters] if isinstance(filters, str) else list(filters)
    for key in ("min_bits", "max_frames", "M", "cp_len", "frame_symbols", "master_seed"):
        if key in data:
            data[key] = int(data[key])
    out = []
    for scheme, flt in itertools.product(schemes, filters):
        cfg = SimConfig(scheme=scheme, filter=flt, profile=profile, **data)
        # CP-OFDM does not use a prototype; keep one run per scheme
        if any(c.scheme == cfg.scheme and c.filter_label == cfg.filter_label for c in out):
            continue
        out.append(cfg)
    return out


def load_configs(path) -> list[SimConfig]:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc
    return configs_from_mapping(data)


def _fmt_snr(x):
    return repr(float(x))


def emit_csv(records, path=None) -> str:
    """Write records as CSV; returns the text. ``path=None`` only returns it."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.scheme, r.filter, _fmt_snr(r.snr_db), r.frames, r.bits, r.bit_errors,
                    f"{r.ber:.6g}", r.seed])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_csv(text) -> list[BerRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    out = []
    for row in rows[1:]:
        d = dict(zip(CSV_HEADER, row))
        out.append(BerRecord(d["scheme"], d["filter"], float(d["snr_db"]), int(d["frames"]),
                             int(d["bits"]), int(d["bit_errors"]), int(d["seed"])))
    return out


def emit_plot(records, path, title=None):
    """Log-y BER vs SNR, one series per (scheme, filter), as SVG.

    Zero-error points are dropped from the log axis.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # reproducible element ids
    matplotlib.rcParams["svg.hashsalt"] = "oqamtr"

    fig, ax = plt.subplots(figsize=(6, 4.5))
    series = {}
    for r in records:
        label = r.scheme if r.scheme.endswith("cpofdm") else f"{r.scheme} ({r.filter})"
        series.setdefault(label, []).append(r)
    for label, rs in series.items():
        rs = sorted((r for r in rs if r.bit_errors > 0), key=lambda r: r.snr_db)
        if rs:
            ax.semilogy([r.snr_db for r in rs], [r.ber for r in rs], marker="o", label=label)
    ax.set_xlabel("transmit SNR (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def dump_complex(array, path):
    """Plain-text dump: ``# shape d0 d1 ...`` then one ``re im`` pair per line (C order)."""
    a = np.asarray(array, dtype=complex)
    lines = ["# shape " + " ".join(str(s) for s in a.shape)]
    lines += [f"{z.real:.17g} {z.imag:.17g}" for z in a.ravel()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_complex(path):
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# shape"):
        raise ValueError("missing '# shape' header")
    shape = tuple(int(s) for s in lines[0].split()[2:])
    vals = np.array([[float(t) for t in ln.split()] for ln in lines[1:] if ln.strip()])
    z = vals[:, 0] + 1j * vals[:, 1] if vals.size else np.zeros(0, dtype=complex)
    return z.reshape(shape)
