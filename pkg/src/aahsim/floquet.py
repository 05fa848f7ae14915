"""Coupling control by periodic frequency modulation.

A qubit driven as ``omega(t) = mean_freq + eta * A * sin(mu t + phase)`` has
its exchange coupling to a neighbour renormalized by Bessel factors once the
fast ``mu`` oscillation is averaged out.  This module holds the series and
closed forms, the transmon flux map used to synthesize the control waveform,
calibration fits for the amplitude scale ``eta`` and the relative drive phase,
and a check of the averaged picture against direct integration.

Frequencies are angular (rad/us) unless a name says MHz.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, special

from . import _kernels
from .dynamics import basis_state, evolve_driven
from .errors import CalibrationError
from .model import ChainSpec
from .units import TWO_PI

DEFAULT_MU = TWO_PI * 80.0
DEFAULT_M_MAX = 40
PHASE_RELATIONS = ("same", "opposite", "single")
# first zero and first minimum of J0
J0_ZERO = float(special.jn_zeros(0, 1)[0])
J0_MIN_ARG = float(special.jn_zeros(1, 1)[0])


@dataclass(frozen=True)
class DriveSpec:
    """Sinusoidal frequency drive; ``eta`` scales the nominal amplitude."""

    amplitude: float
    mu: float = DEFAULT_MU
    phase: float = 0.0
    eta: float = 1.0
    mean_freq: float = 0.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if not self.eta > 0:
            raise ValueError("eta must be positive")

    @property
    def argument(self) -> float:
        """Bessel argument eta * A / mu."""
        return self.eta * self.amplitude / self.mu


@dataclass(frozen=True)
class TransmonSpec:
    """Flux-tunable transmon: omega = sqrt(8 E_JJ E_C |cos(k V + b)|) - E_C."""

    e_jj: float
    e_c: float
    k: float
    b: float = 0.0

    def __post_init__(self):
        if not (self.e_jj > 0 and self.e_c > 0):
            raise ValueError("e_jj and e_c must be positive")
        if self.k == 0:
            raise ValueError("k must be nonzero")

    @property
    def max_frequency(self) -> float:
        return math.sqrt(8.0 * self.e_jj * self.e_c) - self.e_c


@dataclass(frozen=True)
class EtaFit:
    eta: float
    residual_rms: float
    n_samples: int


@dataclass(frozen=True)
class RwaReport:
    """Swap couplings (rad/us): measured by integration vs the Bessel series."""

    f_swap_exact: float
    f_swap_effective: float
    rel_error: float
    decoupled: bool
    residual_amplitude: float


# ------------------------------------------------------ effective couplings


def bessel_tail_bound(x1: float, x2: float, m_max: int) -> float:
    """Upper bound on the dropped |m| > m_max part of the series (relative to g).

    Uses |J_m(x)| <= (|x|/2)^m / m! on the larger argument and |J_m| <= 1 on
    the other factor.
    """
    x = max(abs(x1), abs(x2)) / 2.0
    m = m_max + 1
    ratio = x / (m + 1)
    if ratio >= 1.0:
        return math.inf
    lead = math.exp(m * math.log(x) - math.lgamma(m + 1)) if x > 0 else 0.0
    return 2.0 * lead / (1.0 - ratio)


def effective_coupling_full(g: float, d1: DriveSpec, d2: DriveSpec, m_max: int = DEFAULT_M_MAX) -> complex:
    """Truncated series g * sum_m J_m(x1) J_{-m}(-x2) exp(i m (phi1 - phi2))."""
    if d1.mu != d2.mu:
        raise ValueError("both drives must share the same mu")
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    m = np.arange(-m_max, m_max + 1)
    terms = special.jv(m, d1.argument) * special.jv(-m, -d2.argument)
    total = np.sum(terms * np.exp(1j * m * (d1.phase - d2.phase)))
    return complex(g * total)


def effective_coupling_case(g: float, a1: float, a2: float, mu: float, phase_relation: str,
                            eta1: float = 1.0, eta2: float = 1.0) -> float:
    """Closed forms: ``same`` phases, ``opposite`` phases, or a ``single`` drive on site 1."""
    if a1 < 0 or a2 < 0:
        raise ValueError("amplitudes must be non-negative")
    if not mu > 0:
        raise ValueError("mu must be positive")
    x1, x2 = eta1 * a1 / mu, eta2 * a2 / mu
    if phase_relation == "same":
        return float(g * special.j0(x1 - x2))
    if phase_relation == "opposite":
        return float(g * special.j0(x1 + x2))
    if phase_relation == "single":
        return float(g * special.j0(x1))
    raise ValueError(f"phase_relation must be one of {PHASE_RELATIONS}")


def coupling_range(g: float) -> tuple[float, float]:
    """Smallest and largest coupling reachable with one drive."""
    return float(g * special.j0(J0_MIN_ARG)), float(g)


# ------------------------------------------------------------- transmon map


def zpa_to_frequency(t: TransmonSpec, vz):
    return np.sqrt(8.0 * t.e_jj * t.e_c * np.abs(np.cos(t.k * np.asarray(vz, dtype=float) + t.b))) - t.e_c


def frequency_to_zpa(t: TransmonSpec, omega, branch: int = 0):
    """Invert the flux map on a chosen branch of the reduced flux kV + b.

    Branch 0 is the principal branch kV + b in [0, pi/2]; odd branches mirror
    it, even ones repeat it shifted by multiples of pi.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= -t.e_c) or np.any(omega > t.max_frequency * (1 + 1e-15)):
        raise ValueError("frequency outside the tunable range (-E_C, omega_max]")
    c = np.clip((omega + t.e_c) ** 2 / (8.0 * t.e_jj * t.e_c), 0.0, 1.0)
    base = np.arccos(c)
    branch = int(branch)
    if branch % 2 == 0:
        theta = (branch // 2) * np.pi + base
    else:
        theta = ((branch + 1) // 2) * np.pi - base
    return (theta - t.b) / t.k


def synthesize_drive_zpa(t: TransmonSpec, d: DriveSpec, times, branch: int = 0) -> np.ndarray:
    """Control samples whose frequency is mean_freq + A sin(mu t + phase).

    The nominal amplitude is used; ``eta`` describes how the hardware deviates
    from it and so is not folded in here.
    """
    times = np.asarray(times, dtype=float)
    lo, hi = d.mean_freq - d.amplitude, d.mean_freq + d.amplitude
    if lo <= -t.e_c or hi > t.max_frequency:
        raise ValueError("drive excursion leaves the tunable frequency range")
    target = d.mean_freq + d.amplitude * np.sin(d.mu * times + d.phase)
    return frequency_to_zpa(t, target, branch)


# -------------------------------------------------------- swap experiments


def default_step(mu: float) -> float:
    return (TWO_PI / mu) / 40.0


def swap_trace(g: float, d1: DriveSpec | None, d2: DriveSpec | None, t_max: float = 2.0,
               dt: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """P_1(t) of a resonant pair starting in |10>, with optional drives."""
    mus = [d.mu for d in (d1, d2) if d is not None]
    dt = default_step(mus[0] if mus else DEFAULT_MU) if dt is None else dt
    means = [0.0 if d is None else d.mean_freq for d in (d1, d2)]
    chain = ChainSpec(np.array(means), np.array([g]))
    n = int(round(t_max / dt))
    times = np.arange(n + 1) * dt
    psi = evolve_driven(chain, [d1, d2], basis_state(2, 1), times, dt)
    return times, np.abs(psi[:, 0]) ** 2


def measure_swap_frequency(times, p1, omega_max: float, n_grid: int = 4096) -> float:
    """Angular frequency of the strongest non-DC oscillation in P_1(t).

    The mean-subtracted trace is transformed on a grid over (0, omega_max];
    the peak is refined by a parabola through its neighbours and ties go to
    the lower frequency.
    """
    times = np.asarray(times, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    span = times[-1] - times[0]
    if span <= 0:
        raise ValueError("need a time record of positive length")
    grid = np.linspace(0.0, omega_max, n_grid + 1)[1:]
    w = np.zeros_like(times)
    w[:-1] += 0.5 * np.diff(times)
    w[1:] += 0.5 * np.diff(times)
    x = (p1 - np.sum(w * p1) / span).astype(np.complex128)[:, None]
    spec = np.abs(_kernels.dtft(times, w, x, grid)[:, 0]) ** 2
    k = int(np.argmax(spec))
    if 0 < k < grid.size - 1:
        a, b, c = spec[k - 1], spec[k], spec[k + 1]
        denom = a - 2.0 * b + c
        shift = 0.5 * (a - c) / denom if denom < 0 else 0.0
        return float(grid[k] + shift * (grid[1] - grid[0]))
    return float(grid[k])


def validate_rwa(g: float, d1: DriveSpec | None, d2: DriveSpec | None = None, t_max: float = 2.0,
                 dt: float | None = None, decoupling_threshold: float = 0.05) -> RwaReport:
    """Compare the integrated swap coupling with the Bessel-series prediction."""
    drives = [d for d in (d1, d2) if d is not None]
    mu = drives[0].mu if drives else DEFAULT_MU
    if mu < 5.0 * abs(g):
        warnings.warn("mu < 5 |g|: the averaged coupling is a poor approximation", RuntimeWarning, stacklevel=2)
    z1 = d1 if d1 is not None else DriveSpec(0.0, mu)
    z2 = d2 if d2 is not None else DriveSpec(0.0, mu)
    g_eff = abs(effective_coupling_full(g, z1, z2))
    times, p1 = swap_trace(g, d1, d2, t_max, dt)
    residual = float(1.0 - p1.min())
    exact = 0.5 * measure_swap_frequency(times, p1, 4.0 * abs(g))
    rel = abs(exact - g_eff) / g_eff if g_eff > 0 else math.inf
    return RwaReport(exact, g_eff, rel, residual < decoupling_threshold, residual)


def swap_frequency_sweep(g: float, amplitudes: Sequence[float], mu: float = DEFAULT_MU, t_max: float = 2.0,
                         eta: float = 1.0) -> np.ndarray:
    """(A, f_swap in MHz) rows measured by integration with one driven qubit."""
    rows = []
    for a in amplitudes:
        times, p1 = swap_trace(g, DriveSpec(float(a), mu, eta=eta), None, t_max)
        rows.append((float(a), measure_swap_frequency(times, p1, 4.0 * abs(g)) / TWO_PI))
    return np.array(rows)


# ------------------------------------------------------------ calibration


def _eta_model(eta, amps, g, mu):
    return 2.0 * np.abs(g * special.j0(eta * amps / mu)) / TWO_PI


def fit_eta(samples, g: float, mu: float, bounds: tuple[float, float] = (0.5, 1.5)) -> EtaFit:
    """Least-squares eta from (A, f_swap) pairs, f_swap being P_1's frequency in MHz."""
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 3:
        raise ValueError("need at least three (A, f_swap) samples")
    amps, freqs = data[:, 0], data[:, 1]

    def cost(eta):
        return float(np.sum((_eta_model(eta, amps, g, mu) - freqs) ** 2))

    grid = np.linspace(bounds[0], bounds[1], 2001)
    costs = np.array([cost(e) for e in grid])
    k = int(np.argmin(costs))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = optimize.minimize_scalar(cost, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    eta = float(res.x)
    rms = math.sqrt(cost(eta) / amps.size)
    args = eta * amps / mu
    if not (args.min() < J0_ZERO < args.max()):
        raise ValueError("samples must span the first zero of J0")
    scale = 2.0 * abs(g) / TWO_PI
    if not res.success or rms > 0.1 * scale or eta <= bounds[0] + 1e-6 or eta >= bounds[1] - 1e-6:
        raise CalibrationError(f"eta fit did not converge (eta={eta:.4f}, rms={rms:.3g} MHz)", residual=rms)
    return EtaFit(eta, rms, int(amps.size))


def align_phase(samples, fit_halfwidth: float = np.pi / 3) -> float:
    """Phase offset maximizing f_swap, from a local cubic fit around the best sample.

    Returns a value in (-pi, pi].
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 5:
        raise ValueError("need at least five (phase, f_swap) samples")
    phases, freqs = data[:, 0], data[:, 1]
    order = np.argsort(phases)
    phases, freqs = phases[order], freqs[order]
    spacing = np.diff(phases)
    if np.ptp(phases) + np.max(spacing) < TWO_PI * (1 - 1e-9):
        raise ValueError("samples must cover a full 2 pi period")
    if np.ptp(freqs) <= 1e-9 * max(np.max(np.abs(freqs)), 1e-30):
        raise CalibrationError("swap frequency shows no phase dependence", residual=float(np.ptp(freqs)))
    centre = phases[int(np.argmax(freqs))]
    offs = np.angle(np.exp(1j * (phases - centre)))
    near = np.abs(offs) <= fit_halfwidth * (1 + 1e-9)  # keep grid points exactly on the edge symmetric
    if np.count_nonzero(near) < 4:
        raise ValueError("too few samples near the maximum for a cubic fit")
    coef = np.polyfit(offs[near], freqs[near], 3)
    fine = np.linspace(-fit_halfwidth, fit_halfwidth, 4001)
    best = fine[int(np.argmax(np.polyval(coef, fine)))]
    return float(np.angle(np.exp(1j * (centre + best))))


def phase_scan_samples(g: float, a1: float, a2: float, mu: float, phases, offset: float = 0.0) -> np.ndarray:
    """(delta phi, f_swap MHz) pairs from the Bessel series with a hidden phase offset."""
    rows = []
    for p in np.asarray(phases, dtype=float):
        coupling = effective_coupling_full(g, DriveSpec(a1, mu, phase=p - offset), DriveSpec(a2, mu))
        rows.append((p, 2.0 * abs(coupling) / TWO_PI))
    return np.array(rows)
