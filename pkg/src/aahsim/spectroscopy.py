"""Loschmidt-echo spectroscopy: echo synthesis, windowing, Fourier intensity maps.

Conventions
-----------
The echo of site j is ``chi_j(t) = sum_n |C_nj|^2 exp(-i E_n t)`` and the
transform uses the kernel ``exp(+i omega t)``, so an eigenvalue E_n shows up
as a peak at ``omega = E_n``.  The integral is evaluated by the trapezoid rule
on the sample grid, which makes the peak of a windowed unit tone exactly
``T_m**2`` and puts its first zeros exactly at ``E_0 +- 2 pi / T_m``.

The measurement window has length ``T_m`` and starts at ``window_start``.  The
default start is ``-T_m / 2``: the decay envelope ``exp(-gamma |t|)`` is then
symmetric inside the window, which is the geometry whose line shape is
:func:`profile_combined`.  Negative-time samples need no extra physics since
``chi(-t) = conj(chi(t))``.  Pass ``window_start=0`` for a causal window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .model import AahParams
from .spectral import EigenSystem, chain_at, diagonalize_chain, parallel_map

NORMALIZE_MODES = ("raw", "per-scan")


@dataclass(frozen=True)
class SpectroscopyConfig:
    """Measurement settings; times in us, frequencies in rad/us.

    ``targets`` are 1-based site indices (``None`` means every site).  Use
    ``math.inf`` for ``t1`` or ``t2_star`` to switch that decay channel off.
    """

    t_window: float = 1.0
    dt: float = 0.002
    t1: float = 21.0
    t2_star: float = 1.2
    frame_detuning: float = 0.0
    targets: tuple[int, ...] | None = None
    window_start: float | None = None

    def __post_init__(self):
        if not (self.t_window > 0 and math.isfinite(self.t_window)):
            raise ValueError("t_window must be positive and finite")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > self.t_window / 16 * (1 + 1e-12):
            raise ValueError("dt must be at most t_window / 16")
        if not (self.t1 > 0 and self.t2_star > 0):
            raise ValueError("t1 and t2_star must be positive (inf disables decay)")
        if not math.isfinite(self.frame_detuning):
            raise ValueError("frame_detuning must be finite")
        if self.targets is not None:
            targets = tuple(int(s) for s in self.targets)
            if not targets:
                raise ValueError("target set is empty")
            if min(targets) < 1:
                raise ValueError("target sites are 1-based")
            object.__setattr__(self, "targets", targets)
        if self.window_start is not None and not math.isfinite(self.window_start):
            raise ValueError("window_start must be finite")

    @property
    def gamma(self) -> float:
        return 1.0 / (2.0 * self.t1) + 1.0 / self.t2_star

    @property
    def t2(self) -> float:
        g = self.gamma
        return math.inf if g == 0 else 1.0 / g

    @property
    def start(self) -> float:
        return -0.5 * self.t_window if self.window_start is None else float(self.window_start)

    def times(self) -> np.ndarray:
        """Uniform samples covering the window, both ends included."""
        n = max(16, int(round(self.t_window / self.dt)))
        return self.start + np.arange(n + 1) * (self.t_window / n)

    def target_sites(self, n_sites: int) -> tuple[int, ...]:
        if self.targets is None:
            return tuple(range(1, n_sites + 1))
        if max(self.targets) > n_sites:
            raise IndexError(f"target site beyond chain length {n_sites}")
        return self.targets


@dataclass(frozen=True, eq=False)
class EchoSignal:
    times: np.ndarray
    values: np.ndarray
    site: int | None = None


@dataclass(frozen=True, eq=False)
class ScanDefinition:
    parameter: str
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise ValueError("scan grid is empty")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class IntensityMap:
    """``intensity[i, k]`` is the summed |FT|^2 at scan value i and freqs[k]."""

    parameter: str
    scan_values: np.ndarray
    freqs: np.ndarray
    intensity: np.ndarray
    energies: np.ndarray
    normalize: str = "raw"


# ------------------------------------------------------------- time domain


def ideal_echo(es: EigenSystem, site: int, times) -> EchoSignal:
    """Decoherence-free echo of one site; exactly 1 at t = 0."""
    times = np.asarray(times, dtype=float).reshape(-1)
    weights = np.ascontiguousarray(es.overlaps([site]))
    values = _kernels.echo_signals(np.ascontiguousarray(es.energies), weights, times)[:, 0]
    values[times == 0.0] = 1.0
    return EchoSignal(times, values, int(site))


def echo_signals(es: EigenSystem, sites: Sequence[int], times) -> np.ndarray:
    """Echoes of several sites at once; shape (len(times), len(sites))."""
    times = np.asarray(times, dtype=float).reshape(-1)
    weights = np.ascontiguousarray(es.overlaps(sites))
    values = _kernels.echo_signals(np.ascontiguousarray(es.energies), weights, times)
    values[times == 0.0, :] = 1.0
    return values


def _envelope(times: np.ndarray, config: SpectroscopyConfig) -> np.ndarray:
    return np.exp(-config.gamma * np.abs(times) + 1j * config.frame_detuning * times)


def _window_mask(times: np.ndarray, config: SpectroscopyConfig) -> np.ndarray:
    eps = 1e-9 * config.t_window
    lo = config.start
    return (times >= lo - eps) & (times <= lo + config.t_window + eps)


def apply_decay_and_window(signal: EchoSignal, config: SpectroscopyConfig) -> EchoSignal:
    """Drop samples outside the window, weight by exp(-gamma|t|), shift the frame.

    The frame factor ``exp(+i frame_detuning t)`` moves every spectral peak by
    ``-frame_detuning``.
    """
    mask = _window_mask(signal.times, config)
    times = signal.times[mask]
    env = _envelope(times, config)
    values = signal.values[mask]
    values = values * (env if values.ndim == 1 else env[:, None])
    return EchoSignal(times, values, signal.site)


# -------------------------------------------------------- frequency domain


def trapezoid_weights(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ValueError("need at least two samples")
    steps = np.diff(times)
    w = np.zeros_like(times)
    w[:-1] += 0.5 * steps
    w[1:] += 0.5 * steps
    return w


def fourier_transform(signal: EchoSignal, freqs) -> np.ndarray:
    """``integral exp(+i omega t) chi(t) dt`` over the sampled grid."""
    freqs = np.ascontiguousarray(np.asarray(freqs, dtype=float).reshape(-1))
    values = signal.values
    single = values.ndim == 1
    block = np.ascontiguousarray(values.reshape(values.shape[0], -1), dtype=complex)
    out = _kernels.dtft(np.ascontiguousarray(signal.times), trapezoid_weights(signal.times), block, freqs)
    return out[:, 0] if single else out


def fourier_intensity(signal: EchoSignal, freqs) -> np.ndarray:
    return np.abs(fourier_transform(signal, freqs)) ** 2


# ------------------------------------------------------------ line shapes


def profile_window(omega, e_n, t_m):
    """``T_m^2 sinc^2((omega - E_n) T_m / 2)`` of a rectangular window."""
    x = (np.asarray(omega, dtype=float) - e_n) * t_m / 2.0
    return t_m**2 * np.sinc(x / np.pi) ** 2


def profile_decoherence(omega, e_n, t2):
    """Squared Lorentzian of a two-sided exponential decay, 4 T_2^2 at centre."""
    d = np.asarray(omega, dtype=float) - e_n
    g = 1.0 / t2
    return (2.0 * g) ** 2 / (g**2 + d**2) ** 2


def profile_combined(omega, e_n, t_m, t2):
    """|FT of exp(-|t|/T_2) over a window of length T_m centred on t = 0|^2.

    Written with ``expm1`` so both limits (T_2 -> inf gives the sinc^2 profile,
    T_m -> inf the squared Lorentzian) are reached without cancellation.
    """
    if math.isinf(t2):
        return profile_window(omega, e_n, t_m)
    if math.isinf(t_m):
        return profile_decoherence(omega, e_n, t2)
    d = np.asarray(omega, dtype=float) - e_n
    g = 1.0 / t2
    half = 0.5 * t_m
    decay = math.exp(-g * half)
    one_minus_cos = 2.0 * np.sin(0.5 * d * half) ** 2
    # 1 - E cos(d T/2) = (1 - E) + E (1 - cos(d T/2))
    re = g * (-math.expm1(-g * half) + decay * one_minus_cos) + decay * d * np.sin(d * half)
    return (2.0 * re) ** 2 / (g**2 + d**2) ** 2


@lru_cache(maxsize=None)
def _sinc2_half_point() -> float:
    return brentq(lambda x: np.sinc(x / np.pi) ** 2 - 0.5, 0.5, 2.5, xtol=1e-15)


def window_fwhm(t_m: float) -> float:
    """FWHM (rad/us) of the window profile, about 5.566 / T_m."""
    return 4.0 * _sinc2_half_point() / t_m


def decoherence_fwhm(t2: float) -> float:
    """FWHM (rad/us) of the decay profile, 2 sqrt(sqrt2 - 1) / T_2."""
    return 2.0 * math.sqrt(math.sqrt(2.0) - 1.0) / t2


def combined_fwhm(t_m: float, t2: float) -> float:
    if math.isinf(t2):
        return window_fwhm(t_m)
    if math.isinf(t_m):
        return decoherence_fwhm(t2)
    peak = float(profile_combined(0.0, 0.0, t_m, t2))

    def f(d):
        return float(profile_combined(d, 0.0, t_m, t2)) - 0.5 * peak

    # the main lobe half point is never beyond the narrower single-effect width
    hi = 0.5 * min(window_fwhm(t_m), decoherence_fwhm(t2))
    while f(hi) > 0:
        hi *= 1.5
    return 2.0 * brentq(f, 0.0, hi, xtol=1e-14)


def measure_fwhm(freqs, intensity) -> float:
    """FWHM of the tallest peak, with linear interpolation of the half crossings."""
    freqs = np.asarray(freqs, dtype=float)
    y = np.asarray(intensity, dtype=float)
    k = int(np.argmax(y))
    half = 0.5 * y[k]
    left = k
    while left > 0 and y[left] > half:
        left -= 1
    right = k
    while right < y.size - 1 and y[right] > half:
        right += 1
    if y[left] > half or y[right] > half:
        raise ValueError("peak is not resolved inside the frequency grid")

    def cross(i, j):
        return freqs[i] + (half - y[i]) * (freqs[j] - freqs[i]) / (y[j] - y[i])

    return float(cross(right - 1, right) - cross(left, left + 1))


# ------------------------------------------------------------- scan maps


def default_freq_grid(template: AahParams, config: SpectroscopyConfig, n_points: int = 1024) -> np.ndarray:
    """``n_points`` frequencies centred on the shifted reference frequency.

    The half span is the larger of 4u and the Gershgorin bound on
    ``|E - omega_ref|``, padded by four line widths so no band-edge peak is
    clipped.
    """
    bound = 2.0 * template.u * (1.0 + abs(template.lam)) + template.v
    half = max(4.0 * template.u, bound) + 4.0 * combined_fwhm(config.t_window, config.t2)
    centre = template.omega_ref - config.frame_detuning
    return np.linspace(centre - half, centre + half, n_points)


def chain_intensity(es: EigenSystem, config: SpectroscopyConfig, freqs) -> np.ndarray:
    """Summed |FT|^2 over the configured targets of one diagonalized chain."""
    sites = config.target_sites(es.n_sites)
    times = config.times()
    values = echo_signals(es, sites, times)
    signal = apply_decay_and_window(EchoSignal(times, values), config)
    spectra = fourier_transform(signal, freqs)
    return np.sum(np.abs(spectra) ** 2, axis=1)


def intensity_map(
    scan: ScanDefinition,
    template: AahParams,
    n_sites: int,
    config: SpectroscopyConfig,
    freqs=None,
    nnn=None,
    normalize: str = "raw",
    workers: int = 1,
) -> IntensityMap:
    """Realize, diagonalize and probe the chain at every scan value."""
    if normalize not in NORMALIZE_MODES:
        raise ValueError(f"normalize must be one of {NORMALIZE_MODES}")
    freqs = default_freq_grid(template, config) if freqs is None else np.asarray(freqs, dtype=float)
    if freqs.size == 0:
        raise ValueError("frequency grid is empty")
    config.target_sites(n_sites)

    def one(value):
        es = diagonalize_chain(chain_at(template, scan.parameter, value, n_sites, nnn))
        return chain_intensity(es, config, freqs), es.energies

    results = parallel_map(one, list(scan.values), workers)
    intensity = np.array([r[0] for r in results])
    energies = np.array([r[1] for r in results])
    if normalize == "per-scan":
        peak = intensity.max(axis=1, keepdims=True)
        intensity = np.divide(intensity, peak, out=np.zeros_like(intensity), where=peak > 0)
    return IntensityMap(scan.parameter, scan.values, freqs, intensity, energies, normalize)


def local_maxima(row: np.ndarray, rel_threshold: float = 0.1) -> np.ndarray:
    """Indices of interior local maxima above ``rel_threshold`` of the row max."""
    row = np.asarray(row, dtype=float)
    if row.size < 3:
        return np.zeros(0, dtype=int)
    inner = (row[1:-1] > row[:-2]) & (row[1:-1] >= row[2:])
    idx = np.flatnonzero(inner) + 1
    return idx[row[idx] >= rel_threshold * row.max()]

