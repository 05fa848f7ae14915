"""Unit helpers.

Internally every frequency is an angular frequency in rad/us and every time
is in us, so ``exp(-1j * E * t)`` needs no conversion factor.  Linear MHz only
appears at I/O boundaries.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def mhz(f):
    """Linear frequency in MHz -> angular frequency in rad/us."""
    return TWO_PI * np.asarray(f, dtype=float) if np.ndim(f) else TWO_PI * float(f)


def to_mhz(w):
    """Angular frequency in rad/us -> linear frequency in MHz."""
    return np.asarray(w, dtype=float) / TWO_PI if np.ndim(w) else float(w) / TWO_PI
