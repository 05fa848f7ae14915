"""Independent reference computations used only by the tests.

Nothing here imports the package's numerical code: Hamiltonians are built by
explicit loops, spectra come from the dense LAPACK driver, propagation from
``scipy.linalg.expm`` or an adaptive Runge-Kutta solver, and Bloch bands from
the periodic unit-cell matrix.
"""

import numpy as np
import scipy.integrate
import scipy.linalg


def hamiltonian(onsite, nn, nnn=None):
    n = len(onsite)
    h = np.zeros((n, n))
    for j in range(n):
        h[j, j] = onsite[j]
    for j in range(n - 1):
        h[j, j + 1] = h[j + 1, j] = nn[j]
    if nnn is not None:
        for j in range(n - 2):
            h[j, j + 2] = h[j + 2, j] = nnn[j]
    return h


def aah_chain(n, u, lam=0.0, b_lambda=0.0, phi_lambda=0.0, v=0.0, b_v=0.0, phi_v=0.0, omega_ref=0.0):
    onsite = [omega_ref + v * np.cos(2 * np.pi * b_v * j + phi_v) for j in range(1, n + 1)]
    nn = [u * (1 + lam * np.cos(2 * np.pi * b_lambda * j + phi_lambda)) for j in range(1, n)]
    return np.array(onsite), np.array(nn)


def eigen(h):
    return np.linalg.eigh(h)


def propagate(h, psi0, t):
    return scipy.linalg.expm(-1j * h * t) @ psi0


def integrate_driven(onsite, nn, amps, mu, phases, psi0, times):
    """Lab-frame Schrodinger equation with sinusoidal onsite modulation (DOP853)."""
    onsite = np.asarray(onsite, float)
    base = hamiltonian(onsite, nn)

    def rhs(t, y):
        h = base + np.diag(np.asarray(amps) * np.sin(mu * t + np.asarray(phases)))
        return -1j * (h @ y)

    sol = scipy.integrate.solve_ivp(rhs, (times[0], times[-1]), np.asarray(psi0, complex), t_eval=times,
                                    method="DOP853", rtol=1e-11, atol=1e-12)
    return sol.y.T


def bloch_band_groups(p, q, u, v, nk=401):
    """Merged energy intervals of the infinite diagonal AAH chain at b_v = p/q."""
    bands = []
    ks = np.linspace(-np.pi, np.pi, nk)
    for k in ks:
        h = np.zeros((q, q), complex)
        for j in range(q):
            h[j, j] = v * np.cos(2 * np.pi * p / q * (j + 1))
        for j in range(q - 1):
            h[j, j + 1] += u
            h[j + 1, j] += u
        h[q - 1, 0] += u * np.exp(1j * k)
        h[0, q - 1] += u * np.exp(-1j * k)
        bands.append(np.linalg.eigvalsh(h))
    bands = np.array(bands)
    intervals = sorted((bands[:, b].min(), bands[:, b].max()) for b in range(q))
    merged = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1] + 1e-9:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return merged


def windowed_tone_ft(delta, t_lo, t_hi, gamma=0.0):
    """|integral_{t_lo}^{t_hi} exp(i delta t - gamma |t|) dt|^2 by adaptive quadrature."""
    out = []
    for d in np.atleast_1d(delta):
        pieces = [(t_lo, min(t_hi, 0.0)), (max(t_lo, 0.0), t_hi)]
        re = im = 0.0
        for a, b in pieces:
            if b <= a:
                continue
            re += scipy.integrate.quad(lambda t: np.exp(-gamma * abs(t)) * np.cos(d * t), a, b,
                                       limit=400, epsabs=1e-14, epsrel=1e-13)[0]
            im += scipy.integrate.quad(lambda t: np.exp(-gamma * abs(t)) * np.sin(d * t), a, b,
                                       limit=400, epsabs=1e-14, epsrel=1e-13)[0]
        out.append(re * re + im * im)
    return np.array(out)
