"""Single-excitation simulator for generalized Aubry-Andre-Harper chains."""

from ._kernels import BACKEND
from ._version import __version__
from .dynamics import WalkRecord, evolve_driven, evolve_static, localization_score, quantum_walk
from .errors import AahsimError, CalibrationError, ConfigError, NumericalError
from .floquet import (
    DriveSpec,
    TransmonSpec,
    align_phase,
    effective_coupling_case,
    effective_coupling_full,
    fit_eta,
    frequency_to_zpa,
    synthesize_drive_zpa,
    validate_rwa,
    zpa_to_frequency,
)
from .model import (
    AahParams,
    ChainSpec,
    NnnDisorderSpec,
    assemble_hamiltonian,
    realize_chain,
    sample_nnn_disorder,
)
from .spectral import (
    EdgeModeReport,
    EigenSystem,
    central_gap,
    detect_edge_modes,
    diagonalize,
    projected_band_scan,
)
from .spectroscopy import (
    EchoSignal,
    IntensityMap,
    ScanDefinition,
    SpectroscopyConfig,
    apply_decay_and_window,
    fourier_intensity,
    ideal_echo,
    intensity_map,
    profile_combined,
    profile_decoherence,
    profile_window,
)
from .units import mhz, to_mhz

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
