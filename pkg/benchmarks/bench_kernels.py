"""Time the numba and numpy kernel backends on workloads of realistic size.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call includes JIT compilation and is reported separately.
"""

import argparse
import time

import numpy as np

from aahsim import _kernels as k


def workloads():
    rng = np.random.default_rng(0)
    n = 41
    energies = rng.normal(0, 100, n)
    weights = rng.random((n, n))
    times = np.linspace(-0.5, 0.5, 501)
    coeffs = np.full(times.size, times[1] - times[0])
    signals = rng.normal(size=(times.size, n)) + 1j * rng.normal(size=(times.size, n))
    omegas = np.linspace(-300, 300, 1024)
    mu = 2 * np.pi * 80
    onsite = np.zeros(2)
    driven = (onsite, np.array([2 * np.pi * 7.6]), np.zeros(0), np.array([mu, 0.0]), mu,
              np.zeros(2), np.array([1.0 + 0j, 0.0]), np.arange(0, 2.0001, 2 * np.pi / mu / 40), 2 * np.pi / mu / 40)
    return {
        "echo_signals (41 levels x 501 t x 41 sites)": ("echo_signals", (energies, weights, times)),
        "dtft (1024 w x 501 t x 41 sites)": ("dtft", (times, coeffs, signals, omegas)),
        "rk4_driven (2 sites, 2 us at mu/2pi=80 MHz)": ("rk4_driven", driven),
    }


def best_of(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"active backend: {k.BACKEND}")
    print(f"{'kernel':48s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'jit [ms]':>9s} {'speedup':>8s}")
    for label, (name, fargs) in workloads().items():
        t_np = best_of(getattr(k, f"{name}_numpy"), fargs, args.repeat)
        if not k.HAVE_NUMBA:
            print(f"{label:48s} {t_np * 1e3:11.2f} {'-':>11s} {'-':>9s} {'-':>8s}")
            continue
        fn = getattr(k, f"{name}_numba")
        t0 = time.perf_counter()
        fn(*fargs)
        t_jit = time.perf_counter() - t0
        t_nb = best_of(fn, fargs, args.repeat)
        print(f"{label:48s} {t_np * 1e3:11.2f} {t_nb * 1e3:11.2f} {t_jit * 1e3:9.1f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
