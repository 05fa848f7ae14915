"""Single-excitation Hamiltonians of generalized AAH chains.

Site ``j`` of the modulation formulas runs 1..N while arrays are 0-based:

    onsite[j-1]  = omega_ref + v * cos(2 pi b_v j + phi_v)
    nn[j-1]      = u * (1 + lam * cos(2 pi b_lambda j + phi_lambda)),  j = 1..N-1

Optional next-nearest-neighbour bonds ``nnn[j-1]`` couple sites j and j+2.
"""

from __future__ import annotations

import dataclasses
import io
from dataclasses import dataclass, field

import numpy as np

from .units import TWO_PI, to_mhz


@dataclass(frozen=True)
class AahParams:
    """Parameters of a generalized AAH chain (angular frequencies in rad/us)."""

    u: float
    lam: float = 0.0
    b_lambda: float = 0.0
    phi_lambda: float = 0.0
    v: float = 0.0
    b_v: float = 0.0
    phi_v: float = 0.0
    omega_ref: float = 0.0

    def __post_init__(self):
        for name in ("u", "lam", "b_lambda", "phi_lambda", "v", "b_v", "phi_v", "omega_ref"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.u < 0 or self.v < 0:
            raise ValueError("u and v must be non-negative")
        for name in ("b_lambda", "b_v"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    def replace(self, **changes) -> AahParams:
        return dataclasses.replace(self, **changes)


def _frozen(values, length: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.size != length:
        raise ValueError(f"{name} must have length {length}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """Concrete onsite frequencies and bond couplings of one chain instance."""

    onsite: np.ndarray
    nn_coupling: np.ndarray
    nnn_coupling: np.ndarray = field(default=None)

    def __post_init__(self):
        onsite = np.array(self.onsite, dtype=float).reshape(-1)
        n = onsite.size
        if n < 1:
            raise ValueError("a chain needs at least one site")
        object.__setattr__(self, "onsite", _frozen(onsite, n, "onsite"))
        object.__setattr__(self, "nn_coupling", _frozen(self.nn_coupling, max(n - 1, 0), "nn_coupling"))
        nnn = np.zeros(max(n - 2, 0)) if self.nnn_coupling is None else self.nnn_coupling
        object.__setattr__(self, "nnn_coupling", _frozen(nnn, max(n - 2, 0), "nnn_coupling"))

    @property
    def n_sites(self) -> int:
        return self.onsite.size

    @property
    def has_nnn(self) -> bool:
        return bool(np.any(self.nnn_coupling != 0.0))

    def with_nnn(self, nnn_coupling) -> ChainSpec:
        return ChainSpec(self.onsite, self.nn_coupling, nnn_coupling)

    def __eq__(self, other):
        if not isinstance(other, ChainSpec):
            return NotImplemented
        return (
            np.array_equal(self.onsite, other.onsite)
            and np.array_equal(self.nn_coupling, other.nn_coupling)
            and np.array_equal(self.nnn_coupling, other.nnn_coupling)
        )

    __hash__ = None


@dataclass(frozen=True)
class NnnDisorderSpec:
    """Normal distribution (clamped at zero) for disordered NNN couplings."""

    mean: float
    stdev: float
    seed: int = 42

    def __post_init__(self):
        if self.mean < 0:
            raise ValueError("mean must be non-negative")
        if self.stdev < 0:
            raise ValueError("stdev must be non-negative")


def realize_chain(params: AahParams, n_sites: int) -> ChainSpec:
    """Evaluate the AAH modulation formulas for an ``n_sites`` chain."""
    if int(n_sites) != n_sites or n_sites < 2:
        raise ValueError("n_sites must be an integer >= 2")
    n_sites = int(n_sites)
    j = np.arange(1, n_sites + 1, dtype=float)
    onsite = params.omega_ref + params.v * np.cos(TWO_PI * params.b_v * j + params.phi_v)
    bonds = j[:-1]
    nn = params.u * (1.0 + params.lam * np.cos(TWO_PI * params.b_lambda * bonds + params.phi_lambda))
    return ChainSpec(onsite, nn)


def sample_nnn_disorder(spec: NnnDisorderSpec, n_sites: int) -> np.ndarray:
    """Draw ``n_sites - 2`` NNN couplings; negative draws are set to zero."""
    if n_sites < 3:
        raise ValueError("NNN bonds need at least 3 sites")
    if spec.stdev < 0:
        raise ValueError("stdev must be non-negative")
    rng = np.random.default_rng(spec.seed)
    draws = rng.normal(spec.mean, spec.stdev, size=n_sites - 2)
    return np.clip(draws, 0.0, None)


def assemble_hamiltonian(chain: ChainSpec) -> np.ndarray:
    """Dense real-symmetric pentadiagonal matrix of ``chain``."""
    n = chain.n_sites
    h = np.zeros((n, n))
    idx = np.arange(n)
    h[idx, idx] = chain.onsite
    if n > 1:
        h[idx[:-1], idx[:-1] + 1] = chain.nn_coupling
        h[idx[:-1] + 1, idx[:-1]] = chain.nn_coupling
    if n > 2:
        h[idx[:-2], idx[:-2] + 2] = chain.nnn_coupling
        h[idx[:-2] + 2, idx[:-2]] = chain.nnn_coupling
    return h


def banded_lower(chain: ChainSpec) -> np.ndarray:
    """Lower banded storage (3 x N) as used by ``scipy.linalg.eig_banded``."""
    n = chain.n_sites
    band = np.zeros((3, n))
    band[0] = chain.onsite
    band[1, : n - 1] = chain.nn_coupling
    band[2, : max(n - 2, 0)] = chain.nnn_coupling
    return band


# ----------------------------------------------------------- text round trip


def chain_to_text(chain: ChainSpec, header: str | None = None) -> str:
    """Tabular dump: ``index onsite_MHz nn_MHz nnn_MHz`` per site.

    ``nn`` on row j is the bond (j, j+1); ``nnn`` is the bond (j, j+2).  Missing
    trailing bonds are written as ``nan``.
    """
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    buf.write(f"# n_sites={chain.n_sites}\n")
    buf.write("# index\tonsite_MHz\tnn_MHz\tnnn_MHz\n")
    n = chain.n_sites
    for j in range(n):
        nn = to_mhz(chain.nn_coupling[j]) if j < n - 1 else float("nan")
        nnn = to_mhz(chain.nnn_coupling[j]) if j < n - 2 else float("nan")
        buf.write(f"{j + 1}\t{to_mhz(chain.onsite[j])!r}\t{nn!r}\t{nnn!r}\n")
    return buf.getvalue()


def chain_from_text(text: str) -> ChainSpec:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not rows:
        raise ValueError("no chain rows found")
    data = np.array([[float(x) for x in row] for row in rows])
    if data.shape[1] != 4:
        raise ValueError("expected 4 columns per row")
    if not np.array_equal(data[:, 0], np.arange(1, len(rows) + 1)):
        raise ValueError("site indices must run 1..N in order")
    n = len(rows)
    onsite = TWO_PI * data[:, 1]
    nn = TWO_PI * data[: n - 1, 2]
    nnn = TWO_PI * data[: max(n - 2, 0), 3]
    return ChainSpec(onsite, nn, nnn)
