"""Single-excitation time evolution and quantum walks.

State vectors are plain complex arrays over the N one-excitation basis states.
Echo experiments carry an implicit vacuum amplitude, so their norm is 1/2
rather than 1; nothing here assumes unit norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .model import ChainSpec
from .spectral import EigenSystem, diagonalize_chain

# Largest phase advance per RK4 substep (rad).  Keeps the norm drift of a
# 2 us, A = 3.8 mu evolution below 1e-8.
_MAX_PHASE_STEP = 0.08


@dataclass(frozen=True, eq=False)
class WalkRecord:
    """Site-occupation probabilities ``probabilities[j, k] = P_{j+1}(times[k])``."""

    times: np.ndarray
    probabilities: np.ndarray
    start_site: int

    @property
    def n_sites(self) -> int:
        return self.probabilities.shape[0]


def _time_grid(times) -> np.ndarray:
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size == 0:
        raise ValueError("empty time grid")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending and non-negative")
    return times


def basis_state(n_sites: int, site: int) -> np.ndarray:
    if not 1 <= site <= n_sites:
        raise IndexError(f"site must lie in 1..{n_sites}")
    psi = np.zeros(n_sites, dtype=complex)
    psi[site - 1] = 1.0
    return psi


def evolve_static(es: EigenSystem, psi0, times) -> np.ndarray:
    """psi(t) = sum_n <phi_n|psi0> exp(-i E_n t) phi_n; shape (len(times), N)."""
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi0.size != es.n_sites:
        raise ValueError(f"state has {psi0.size} amplitudes, system has {es.n_sites} sites")
    times = _time_grid(times)
    coeff = es.states.T @ psi0
    phases = np.exp(-1j * np.outer(times, es.energies))
    out = (phases * coeff) @ es.states.T
    out[times == 0.0] = psi0
    return out


def substep(chain: ChainSpec, amplitudes: np.ndarray, dt: float) -> float:
    """RK4 step actually used for a requested step ``dt``.

    ``dt`` is split evenly until the fastest relative phase between coupled
    sites advances by at most ``_MAX_PHASE_STEP`` per step.
    """
    onsite = chain.onsite
    rate = 0.0
    for gap, coupling in ((1, chain.nn_coupling), (2, chain.nnn_coupling)):
        if coupling.size:
            detune = np.abs(onsite[gap:] - onsite[:-gap]) + amplitudes[gap:] + amplitudes[:-gap]
            rate = max(rate, float(np.max(detune + 2.0 * np.abs(coupling))))
    n_sub = max(1, int(math.ceil(dt * rate / _MAX_PHASE_STEP)))
    return dt / n_sub


def evolve_driven(chain: ChainSpec, drives: Sequence, psi0, times, dt: float) -> np.ndarray:
    """Integrate i dpsi/dt = H(t) psi with sinusoidally modulated onsite terms.

    ``drives[j]`` is a :class:`~aahsim.floquet.DriveSpec` or ``None``; the
    modulated frequency of site j is
    ``chain.onsite[j] + eta_j * A_j * sin(mu * t + phi_j)``.  All drives share
    one ``mu``.  The diagonal part is integrated exactly (interaction frame) and
    the couplings by fixed-step RK4, so the result is bit-reproducible.
    """
    n = chain.n_sites
    if len(drives) != n:
        raise ValueError(f"need {n} drive entries (None for undriven sites)")
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi0.size != n:
        raise ValueError("state dimension does not match the chain")
    times = _time_grid(times)
    active = [d for d in drives if d is not None]
    mus = {d.mu for d in active}
    if len(mus) > 1:
        raise ValueError("all drives must share the same modulation frequency")
    mu = mus.pop() if mus else 1.0
    if dt <= 0:
        raise ValueError("dt must be positive")
    if active and dt > (2.0 * np.pi / mu) / 40.0 * (1 + 1e-12):
        raise ValueError("dt must resolve the drive period: dt <= (2 pi / mu) / 40")
    amp = np.array([0.0 if d is None else d.eta * d.amplitude for d in drives])
    phase = np.array([0.0 if d is None else d.phase for d in drives])
    h = substep(chain, amp, dt)
    return _kernels.rk4_driven(
        np.ascontiguousarray(chain.onsite),
        np.ascontiguousarray(chain.nn_coupling),
        np.ascontiguousarray(chain.nnn_coupling),
        amp,
        float(mu),
        phase,
        psi0,
        times,
        float(h),
    )


def walk_times(t_max: float, dt: float) -> np.ndarray:
    if t_max <= 0 or dt <= 0:
        raise ValueError("t_max and dt must be positive")
    n = int(round(t_max / dt))
    return np.arange(n + 1) * dt


def quantum_walk(chain: ChainSpec, start_site: int, t_max: float = 1.0, dt: float = 0.002,
                 es: EigenSystem | None = None) -> WalkRecord:
    """Exact single-excitation walk from ``start_site`` (1-based)."""
    psi0 = basis_state(chain.n_sites, start_site)
    es = diagonalize_chain(chain) if es is None else es
    times = walk_times(t_max, dt)
    amps = evolve_static(es, psi0, times)
    return WalkRecord(times, np.abs(amps.T) ** 2, int(start_site))


def localization_score(record: WalkRecord, site: int, window: tuple[float, float]) -> float:
    """Time-average of P_site over the samples inside ``window``."""
    if not 1 <= site <= record.n_sites:
        raise IndexError(f"site must lie in 1..{record.n_sites}")
    t0, t1 = window
    mask = (record.times >= t0 - 1e-12) & (record.times <= t1 + 1e-12)
    if t1 < t0 or not np.any(mask):
        raise ValueError("window contains no samples")
    return float(np.clip(np.mean(record.probabilities[site - 1, mask]), 0.0, 1.0))
