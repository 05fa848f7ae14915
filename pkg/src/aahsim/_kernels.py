"""Hot numerical kernels with a numba path and a pure-numpy path.

The numba path of the driven integrator is used when numba imports and
``AAHSIM_DISABLE_NUMBA`` is not set to a truthy value.  Both paths are always importable as ``*_numpy`` and
(when numba is present) ``*_numba`` so tests and the benchmark can compare them.

Kernels
-------
echo_signals(energies, weights, times)
    chi[t, j] = sum_n weights[n, j] * exp(-1j * energies[n] * t)
dtft(times, coeffs, signals, omegas)
    F[w, j] = sum_t coeffs[t] * exp(1j * omegas[w] * t) * signals[t, j]
rk4_driven(onsite, nn, nnn, amp, mu, phase, psi0, t_out, h_max)
    fixed-step RK4 for a pentadiagonal chain whose onsite terms are
    ``onsite[j] + amp[j] * sin(mu * t + phase[j])``.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False


def _env_disabled() -> bool:
    return os.environ.get("AAHSIM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _env_disabled()
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path


def echo_signals_numpy(energies, weights, times):
    phases = np.exp(-1j * np.outer(times, energies))
    return phases @ weights.astype(np.complex128)


_DTFT_CHUNK = 1 << 20  # kernel entries per block, about 16 MB complex


def dtft_numpy(times, coeffs, signals, omegas):
    out = np.empty((omegas.size, signals.shape[1]), dtype=np.complex128)
    step = max(1, _DTFT_CHUNK // max(1, times.size))
    for lo in range(0, omegas.size, step):
        kernel = np.exp(1j * np.outer(omegas[lo:lo + step], times)) * coeffs[None, :]
        out[lo:lo + step] = kernel @ signals
    return out


def _interaction_rhs_numpy(t, c, delta, nn, nnn, amp, mu, phase, cos0):
    theta = delta * t - (amp / mu) * (np.cos(mu * t + phase) - cos0)
    z = np.exp(1j * theta)
    psi = np.conj(z) * c
    hpsi = np.zeros_like(psi)
    hpsi[:-1] += nn * psi[1:]
    hpsi[1:] += nn * psi[:-1]
    if nnn.size:
        hpsi[:-2] += nnn * psi[2:]
        hpsi[2:] += nnn * psi[:-2]
    return -1j * z * hpsi


def rk4_driven_numpy(onsite, nn, nnn, amp, mu, phase, psi0, t_out, h_max):
    n_sites = onsite.size
    center = float(np.mean(onsite))
    delta = onsite - center
    cos0 = np.cos(phase)
    out = np.empty((t_out.size, n_sites), dtype=np.complex128)
    c = psi0.astype(np.complex128).copy()
    t = 0.0
    args = (delta, nn, nnn, amp, mu, phase, cos0)
    for k in range(t_out.size):
        target = t_out[k]
        span = target - t
        if span > 0.0:
            n_steps = int(math.ceil(span / h_max - 1e-9))
            h = span / n_steps
            t0 = t
            for s in range(n_steps):
                ts = t0 + s * h
                k1 = _interaction_rhs_numpy(ts, c, *args)
                k2 = _interaction_rhs_numpy(ts + 0.5 * h, c + 0.5 * h * k1, *args)
                k3 = _interaction_rhs_numpy(ts + 0.5 * h, c + 0.5 * h * k2, *args)
                k4 = _interaction_rhs_numpy(ts + h, c + h * k3, *args)
                c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = target
        theta = delta * target - (amp / mu) * (np.cos(mu * target + phase) - cos0)
        out[k] = np.exp(-1j * theta) * c * np.exp(-1j * center * target)
    return out


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def echo_signals_numba(energies, weights, times):
        n_t = times.size
        n_levels, n_targets = weights.shape
        out = np.zeros((n_t, n_targets), dtype=np.complex128)
        for it in range(n_t):
            t = times[it]
            for n in range(n_levels):
                ph = complex(math.cos(energies[n] * t), -math.sin(energies[n] * t))
                for j in range(n_targets):
                    out[it, j] += weights[n, j] * ph
        return out

    @numba.njit(cache=True, nogil=True)
    def dtft_numba(times, coeffs, signals, omegas):
        n_w = omegas.size
        n_t, n_targets = signals.shape
        out = np.zeros((n_w, n_targets), dtype=np.complex128)
        for iw in range(n_w):
            w = omegas[iw]
            for it in range(n_t):
                arg = w * times[it]
                ph = complex(math.cos(arg), math.sin(arg)) * coeffs[it]
                for j in range(n_targets):
                    out[iw, j] += ph * signals[it, j]
        return out

    @numba.njit(cache=True, nogil=True)
    def _interaction_rhs_numba(t, c, delta, nn, nnn, amp, mu, phase, cos0, z, psi, out):
        n = c.size
        for j in range(n):
            theta = delta[j] * t - (amp[j] / mu) * (math.cos(mu * t + phase[j]) - cos0[j])
            z[j] = complex(math.cos(theta), math.sin(theta))
            psi[j] = z[j].conjugate() * c[j]
        for j in range(n):
            acc = 0.0j
            if j > 0:
                acc += nn[j - 1] * psi[j - 1]
            if j < n - 1:
                acc += nn[j] * psi[j + 1]
            if nnn.size > 0:
                if j > 1:
                    acc += nnn[j - 2] * psi[j - 2]
                if j < n - 2:
                    acc += nnn[j] * psi[j + 2]
            out[j] = -1j * z[j] * acc

    @numba.njit(cache=True, nogil=True)
    def rk4_driven_numba(onsite, nn, nnn, amp, mu, phase, psi0, t_out, h_max):
        n = onsite.size
        center = 0.0
        for j in range(n):
            center += onsite[j]
        center /= n
        delta = onsite - center
        cos0 = np.cos(phase)
        out = np.empty((t_out.size, n), dtype=np.complex128)
        c = psi0.astype(np.complex128).copy()
        z = np.empty(n, dtype=np.complex128)
        psi = np.empty(n, dtype=np.complex128)
        k1 = np.empty(n, dtype=np.complex128)
        k2 = np.empty(n, dtype=np.complex128)
        k3 = np.empty(n, dtype=np.complex128)
        k4 = np.empty(n, dtype=np.complex128)
        tmp = np.empty(n, dtype=np.complex128)
        t = 0.0
        for k in range(t_out.size):
            target = t_out[k]
            span = target - t
            if span > 0.0:
                n_steps = int(math.ceil(span / h_max - 1e-9))
                h = span / n_steps
                t0 = t
                for s in range(n_steps):
                    ts = t0 + s * h
                    _interaction_rhs_numba(ts, c, delta, nn, nnn, amp, mu, phase, cos0, z, psi, k1)
                    for j in range(n):
                        tmp[j] = c[j] + 0.5 * h * k1[j]
                    _interaction_rhs_numba(ts + 0.5 * h, tmp, delta, nn, nnn, amp, mu, phase, cos0, z, psi, k2)
                    for j in range(n):
                        tmp[j] = c[j] + 0.5 * h * k2[j]
                    _interaction_rhs_numba(ts + 0.5 * h, tmp, delta, nn, nnn, amp, mu, phase, cos0, z, psi, k3)
                    for j in range(n):
                        tmp[j] = c[j] + h * k3[j]
                    _interaction_rhs_numba(ts + h, tmp, delta, nn, nnn, amp, mu, phase, cos0, z, psi, k4)
                    for j in range(n):
                        c[j] = c[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
                t = target
            glob = complex(math.cos(center * target), -math.sin(center * target))
            for j in range(n):
                theta = delta[j] * target - (amp[j] / mu) * (math.cos(mu * target + phase[j]) - cos0[j])
                out[k, j] = complex(math.cos(theta), -math.sin(theta)) * c[j] * glob
        return out

else:  # pragma: no cover
    echo_signals_numba = dtft_numba = rk4_driven_numba = None


def _select(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl


# the two dense transforms are plain matrix products, where BLAS beats the
# compiled loops (benchmarks/bench_kernels.py); only the integrator is jitted
echo_signals = echo_signals_numpy
dtft = dtft_numpy
rk4_driven = _select(rk4_driven_numba, rk4_driven_numpy)
