"""Diagonalization, projected band scans, edge-mode and gap diagnostics."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from .model import AahParams, ChainSpec, assemble_hamiltonian, realize_chain

SCAN_PARAMETERS = ("phi_lambda", "phi_v", "b_v", "b_lambda")


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending energies and the matching orthonormal eigenvectors (columns)."""

    energies: np.ndarray
    states: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.energies.size

    def overlaps(self, sites: Sequence[int]) -> np.ndarray:
        """|<phi_n|e_site>|^2 as an (n_levels, n_sites) array; sites are 1-based."""
        idx = _site_indices(sites, self.n_sites)
        return self.states[idx, :].T ** 2


@dataclass(frozen=True)
class EdgeModeReport:
    index: int
    energy: float
    edge_weight_left: float
    edge_weight_right: float
    ipr: float

    @property
    def edge_weight(self) -> float:
        return self.edge_weight_left + self.edge_weight_right

    @property
    def side(self) -> str:
        return "left" if self.edge_weight_left >= self.edge_weight_right else "right"


def _site_indices(sites, n_sites: int) -> np.ndarray:
    idx = np.asarray(sites, dtype=int).reshape(-1) - 1
    if idx.size and (idx.min() < 0 or idx.max() >= n_sites):
        raise IndexError(f"site indices must lie in 1..{n_sites}")
    return idx


def _fix_signs(states: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each eigenvector made positive
    pivot = np.argmax(np.abs(states), axis=0)
    signs = np.sign(states[pivot, np.arange(states.shape[1])])
    signs[signs == 0] = 1.0
    return states * signs


def _bandwidth(h: np.ndarray) -> int:
    n = h.shape[0]
    for k in range(n - 1, 0, -1):
        if np.any(np.diagonal(h, k) != 0.0):
            return k
    return 0


def diagonalize(h) -> EigenSystem:
    """Eigen-decomposition of a real symmetric matrix.

    Pentadiagonal input (every chain Hamiltonian) goes through LAPACK's banded
    solver; anything wider falls back to the dense one.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("Hamiltonian must be a square matrix")
    if not np.all(np.isfinite(h)):
        raise ValueError("Hamiltonian has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if np.max(np.abs(h - h.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("Hamiltonian is not symmetric")
    n = h.shape[0]
    bw = _bandwidth(h)
    if n > 2 and bw <= 2:
        band = np.zeros((bw + 1, n))
        for k in range(bw + 1):
            band[k, : n - k] = np.diagonal(h, -k)
        energies, states = scipy.linalg.eig_banded(band, lower=True)
    else:
        energies, states = np.linalg.eigh(h)
    order = np.argsort(energies, kind="stable")
    return EigenSystem(energies[order], _fix_signs(states[:, order]))


def diagonalize_chain(chain: ChainSpec) -> EigenSystem:
    return diagonalize(assemble_hamiltonian(chain))


def ipr(state) -> float:
    """Inverse participation ratio sum_j |phi_j|^4 of a normalized state."""
    p = np.abs(np.asarray(state)) ** 2
    return float(np.sum(p**2) / np.sum(p) ** 2)


def edge_weights(es: EigenSystem, n_edge: int) -> tuple[np.ndarray, np.ndarray]:
    prob = es.states**2
    return prob[:n_edge].sum(axis=0), prob[-n_edge:].sum(axis=0)


def detect_edge_modes(
    es: EigenSystem,
    energy_window: float,
    n_edge: int = 3,
    edge_threshold: float = 0.5,
    reference: float = 0.0,
) -> list[EdgeModeReport]:
    """Eigenstates near ``reference`` whose probability sits on the outer sites.

    A state is reported when ``|E - reference| <= energy_window`` and the
    combined weight on the ``n_edge`` outermost sites of both ends reaches
    ``edge_threshold``.
    """
    if energy_window <= 0:
        raise ValueError("energy_window must be positive")
    if n_edge < 1 or n_edge > es.n_sites / 4:
        raise ValueError(f"n_edge must lie in 1..{es.n_sites // 4}")
    left, right = edge_weights(es, n_edge)
    reports = []
    for n in np.flatnonzero(np.abs(es.energies - reference) <= energy_window):
        if left[n] + right[n] >= edge_threshold:
            reports.append(
                EdgeModeReport(
                    index=int(n),
                    energy=float(es.energies[n]),
                    edge_weight_left=float(left[n]),
                    edge_weight_right=float(right[n]),
                    ipr=ipr(es.states[:, n]),
                )
            )
    return reports


def central_gap(es: EigenSystem, band_split: int, exclude: Iterable[int] = ()) -> float:
    """E_{band_split+1} - E_{band_split} (1-based levels).

    Levels listed in ``exclude`` (0-based eigenindices, e.g. edge modes) are
    removed first; the split then moves down by the number of excluded levels
    below it so the gap is always measured between the two bulk levels that
    straddle the original boundary.
    """
    n = es.n_sites
    if not 1 <= band_split < n:
        raise IndexError(f"band_split must lie in 1..{n - 1}")
    excluded = set(int(i) for i in exclude)
    keep = np.array([i for i in range(n) if i not in excluded], dtype=int)
    split = band_split - sum(1 for i in excluded if i < band_split)
    if not 1 <= split < keep.size:
        raise IndexError("exclusions leave no levels on one side of the split")
    energies = es.energies[keep]
    return float(energies[split] - energies[split - 1])


def find_gap_minima(grid, gaps, periodic: bool = True) -> np.ndarray:
    """Grid values where ``gaps`` has a strict local minimum."""
    grid = np.asarray(grid, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    n = gaps.size
    found = []
    for i in range(n):
        if not periodic and (i == 0 or i == n - 1):
            continue
        prev, nxt = gaps[(i - 1) % n], gaps[(i + 1) % n]
        if gaps[i] < prev and gaps[i] <= nxt:
            found.append(grid[i])
    return np.array(found)


def parallel_map(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """Ordered map; results never depend on ``workers``."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def chain_at(template: AahParams, parameter: str, value: float, n_sites: int, nnn=None) -> ChainSpec:
    if parameter not in SCAN_PARAMETERS:
        raise ValueError(f"scan parameter must be one of {SCAN_PARAMETERS}")
    chain = realize_chain(template.replace(**{parameter: float(value)}), n_sites)
    if nnn is not None:
        chain = chain.with_nnn(nnn)
    return chain


def projected_band_scan(
    template: AahParams,
    parameter: str,
    grid,
    n_sites: int,
    nnn=None,
    workers: int = 1,
) -> np.ndarray:
    """Spectra E_n - omega_ref along a parameter grid; shape (len(grid), n_sites)."""
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("scan grid is empty")

    def one(value):
        es = diagonalize_chain(chain_at(template, parameter, value, n_sites, nnn))
        return es.energies - template.omega_ref

    return np.array(parallel_map(one, list(grid), workers))


def default_phase_grid(n_points: int = 121) -> np.ndarray:
    """``n_points`` phases covering [0, 2 pi) without the endpoint."""
    return np.arange(n_points) * (2.0 * np.pi / n_points)
