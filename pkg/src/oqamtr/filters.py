"""Prototype filters for the OFDM/OQAM modem.

Three families are provided:

* ``iota4``: discrete IOTA pulse, 4M taps, obtained by orthogonalizing a
  sampled Gaussian in frequency and then in time, then truncating.
* ``tfl1``: M taps, exact orthogonality by construction (power-complementary
  coefficient pairs), shaped by maximizing a time-frequency localization
  measure.
* ``rect``: the M-tap rectangular pulse implicit in CP-OFDM.

All filters are even-symmetric and have unit energy, so the phase reference
``(L - 1) / 2`` of the modulator sits exactly at the filter center.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import optimize

from .errors import ConfigurationError, ConvergenceError

__all__ = [
    "PrototypeFilter",
    "FILTER_NAMES",
    "build_iota",
    "build_tfl1",
    "build_rect",
    "get_filter",
    "basis_function",
    "check_real_orthogonality",
    "heisenberg_objective",
    "save_filter",
    "load_filter",
]

FILTER_NAMES = ("iota4", "tfl1", "rect")

# truncation-limited vs constraint-exact
TOLERANCES = {"iota4": 1e-3, "tfl1": 1e-10, "rect": 1e-10}

TFL_FUNCTIONAL = "time second moment x first-difference energy (discrete Heisenberg)"


@dataclass(frozen=True, eq=False)
class PrototypeFilter:
    """Real, even-symmetric, unit-energy prototype filter.

    Attributes
    ----------
    coeffs : ndarray
        Filter taps ``f[0..L-1]`` (read-only).
    num_subcarriers : int
        Number of subcarriers ``M`` the filter was designed for.
    name : str
        One of ``FILTER_NAMES``.
    orthogonality_defect : float
        Measured ``max |Re<f_00, f_pq> - delta|`` over the overlapping
        neighborhood.
    tolerance : float
        Defect bound guaranteed by the construction.
    """

    coeffs: np.ndarray
    num_subcarriers: int
    name: str
    orthogonality_defect: float = float("nan")
    tolerance: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def length(self) -> int:
        return self.coeffs.size

    def __len__(self):
        return self.coeffs.size

    def __repr__(self):
        return (f"PrototypeFilter(name={self.name!r}, M={self.num_subcarriers}, "
                f"L={self.length}, defect={self.orthogonality_defect:.3g})")


def _check_m(M):
    if not isinstance(M, (int, np.integer)) or M < 8 or (M & (M - 1)) != 0:
        raise ConfigurationError(f"M must be a power of two >= 8, got {M!r}")
    return int(M)


def _finish(coeffs, M, name, **meta):
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    coeffs.setflags(write=False)
    f = PrototypeFilter(coeffs, M, name, tolerance=TOLERANCES[name], meta=meta)
    defect = check_real_orthogonality(f, 2, max(1, 2 * f.length // M - 1))
    object.__setattr__(f, "orthogonality_defect", float(defect))
    return f


def build_iota(M: int, oversampling: int = 16, iterations: int = 10) -> PrototypeFilter:
    """Discrete IOTA prototype of length ``4M``.

    A Gaussian is sampled on a periodic grid of ``oversampling * M`` points
    with the isotropic scaling (half symbol duration ``M/2`` samples equals
    the subcarrier spacing ``1/M`` in normalized units). It is normalized by
    the root power sum of its ``1/M``-spaced frequency shifts, then by the
    root power sum of its ``M/2``-spaced time shifts, and truncated to ``4M``
    taps around the center.

    With ``iterations > 1`` the two normalizations and the truncation are
    repeated on the truncated pulse. A single pass leaves a lag-``2M``
    autocorrelation of about 7e-4; ten passes bring the defect near 1e-5
    while moving no tap by more than about 2e-4.
    """
    M = _check_m(M)
    if oversampling < 8:
        raise ConfigurationError("oversampling must be >= 8 so truncation dominates")
    if iterations < 1:
        raise ConfigurationError("iterations must be >= 1")
    P = oversampling * M
    half = M // 2
    c = P // 2
    t = (np.arange(P) - (P - 1) / 2) * np.sqrt(2) / M
    x = np.exp(-np.pi * t ** 2)
    for _ in range(iterations):
        G = np.fft.fft(x)
        power = np.abs(G) ** 2
        G = G / np.sqrt(np.tile(power.reshape(-1, oversampling).sum(axis=0), M))
        x = np.fft.ifft(G).real

        power = x ** 2
        x = x / np.sqrt(np.tile(power.reshape(-1, half).sum(axis=0), P // half))
        x[:c - 2 * M] = 0.0
        x[c + 2 * M:] = 0.0

    f = x[c - 2 * M:c + 2 * M]
    f = 0.5 * (f + f[::-1])
    f = f / np.linalg.norm(f)
    return _finish(f, M, "iota4", oversampling=oversampling, iterations=iterations)


def build_rect(M: int) -> PrototypeFilter:
    M = _check_m(M)
    return _finish(np.full(M, 1 / np.sqrt(M)), M, "rect")


def _tfl_expand(theta, M):
    # (f[k], f[k+M/2]) = sqrt(2/M) (sin t_k, cos t_k) for k < M/4; the
    # remaining pairs follow from even symmetry
    s = np.sqrt(2.0 / M)
    q = M // 4
    k = np.arange(q)
    f = np.empty(M)
    f[k] = f[M - 1 - k] = s * np.sin(theta)
    f[k + M // 2] = f[M // 2 - 1 - k] = s * np.cos(theta)
    return f


def heisenberg_objective(coeffs):
    """Return ``m2 * d2`` and its gradient with respect to the taps.

    ``m2`` is the second time moment about the center ``(L-1)/2`` and ``d2``
    the energy of the first difference (zero-padded at both ends). Smaller is
    better localized.
    """
    f = np.asarray(coeffs, dtype=float)
    L = f.size
    w = (np.arange(L) - (L - 1) / 2) ** 2
    m2 = np.dot(w, f * f)
    fp = np.concatenate(([0.0], f, [0.0]))
    d = np.diff(fp)
    d2 = np.dot(d, d)
    grad_d2 = 2 * (d[:-1] - d[1:])
    return m2 * d2, 2 * w * f * d2 + m2 * grad_d2


def _tfl_cost(theta, M):
    f = _tfl_expand(theta, M)
    val, g = heisenberg_objective(f)
    s = np.sqrt(2.0 / M)
    q = M // 4
    k = np.arange(q)
    dsin = g[k] + g[M - 1 - k]
    dcos = g[k + M // 2] + g[M // 2 - 1 - k]
    return val, s * (np.cos(theta) * dsin - np.sin(theta) * dcos)


def tfl1_initial(M):
    """Half-sine starting point: power complementary, root-raised-cosine like."""
    return np.pi * (np.arange(M // 4) + 0.5) / M


def _optimize_tfl1(M, maxiter):
    theta0 = tfl1_initial(M)
    res = optimize.minimize(_tfl_cost, theta0, args=(M,), jac=True,
                            method="BFGS",
                            options={"maxiter": maxiter, "gtol": 1e-10})
    theta = res.x
    f = _tfl_expand(theta, M)
    gnorm = np.linalg.norm(res.jac) / max(res.fun, 1e-300)
    if not res.success and gnorm > 1e-6:
        best = PrototypeFilter(f, M, "tfl1")
        raise ConvergenceError(
            f"TFL optimization did not converge for M={M}: {res.message}",
            best_defect=check_real_orthogonality(best, 2, 1),
            best_coeffs=f,
        )
    return f


def _fixture_path(name, M):
    return resources.files("oqamtr") / "data" / f"{name}_M{M}.txt"


def build_tfl1(M: int, use_fixture: bool = True, maxiter: int = 20000) -> PrototypeFilter:
    """TFL prototype of length ``M``.

    Coefficient pairs satisfy ``f[k]**2 + f[k+M/2]**2 == 2/M`` by
    construction, which is the exact real-orthogonality condition for
    ``L = M``. The free angles are chosen by minimizing
    :func:`heisenberg_objective`. When a frozen coefficient file ships with
    the package it is used instead of re-running the optimizer.
    """
    M = _check_m(M)
    if use_fixture:
        path = _fixture_path("tfl1", M)
        if path.is_file():
            loaded = load_filter(path)
            return _finish(loaded.coeffs, M, "tfl1", functional=TFL_FUNCTIONAL,
                           source="fixture")
    f = _optimize_tfl1(M, maxiter)
    return _finish(f, M, "tfl1", functional=TFL_FUNCTIONAL, source="optimizer")


@functools.lru_cache(maxsize=None)
def get_filter(name: str, M: int) -> PrototypeFilter:
    """Cached constructor by name."""
    if name == "iota4":
        return build_iota(M)
    if name == "tfl1":
        return build_tfl1(M)
    if name == "rect":
        return build_rect(M)
    raise ConfigurationError(f"unknown filter {name!r}; expected one of {FILTER_NAMES}")


def basis_function(f, m, n, k):
    """Evaluate the modulated, shifted, phased prototype ``f_{m,n}[k]``.

    ``k`` is an integer array of sample indices; taps outside ``[0, L)``
    are zero. Uses the phase term ``pi/2 (m + n)``.
    """
    coeffs = f.coeffs if isinstance(f, PrototypeFilter) else np.asarray(f)
    M = f.num_subcarriers
    L = coeffs.size
    k = np.asarray(k)
    idx = k - n * (M // 2)
    inside = (idx >= 0) & (idx < L)
    g = np.where(inside, coeffs[np.clip(idx, 0, L - 1)], 0.0)
    return g * np.exp(2j * np.pi * m * (k - (L - 1) / 2) / M) * np.exp(0.5j * np.pi * (m + n))


def check_real_orthogonality(f: PrototypeFilter, span_m: int, span_n: int) -> float:
    """Max deviation of ``Re<f_00, f_pq>`` from ``delta_p delta_q``.

    Evaluated by building every basis function explicitly and summing over
    all samples where either is nonzero, for ``|p| <= span_m`` and
    ``|q| <= span_n``.
    """
    if span_m < 1 or span_n < 1:
        raise ConfigurationError("spans must be >= 1")
    M = f.num_subcarriers
    half = M // 2
    k = np.arange(-span_n * half, f.length + span_n * half)
    ref = basis_function(f, 0, 0, k)
    worst = 0.0
    for p in range(-span_m, span_m + 1):
        for q in range(-span_n, span_n + 1):
            val = np.sum(ref * np.conj(basis_function(f, p, q, k))).real
            worst = max(worst, abs(val - (1.0 if p == 0 and q == 0 else 0.0)))
    return worst


def save_filter(f: PrototypeFilter, path) -> None:
    """Write coefficients one per line with ``# key value`` header lines."""
    lines = [f"# name {f.name}", f"# M {f.num_subcarriers}",
             f"# defect {f.orthogonality_defect:.6e}"]
    if "functional" in f.meta:
        lines.append(f"# functional {f.meta['functional']}")
    lines += [f"{c:.16e}" for c in f.coeffs]
    Path(path).write_text("\n".join(lines) + "\n")


def load_filter(path) -> PrototypeFilter:
    """Read a file written by :func:`save_filter`.

    The stored defect is kept as-is; call :func:`check_real_orthogonality`
    to re-certify.
    """
    header = {}
    coeffs = []
    text = path.read_text() if hasattr(path, "read_text") else Path(path).read_text()
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(" ")
            header[key] = value.strip()
        else:
            coeffs.append(float(line))
    try:
        name = header["name"]
        M = int(header["M"])
    except KeyError as exc:
        raise ConfigurationError(f"filter file {path} lacks header {exc}") from None
    if name not in TOLERANCES:
        raise ConfigurationError(f"unknown filter name {name!r} in {path}")
    c = np.array(coeffs)
    c.setflags(write=False)
    defect = float(header.get("defect", "nan"))
    meta = {"functional": header["functional"]} if "functional" in header else {}
    return PrototypeFilter(c, M, name, defect, TOLERANCES[name], meta)
