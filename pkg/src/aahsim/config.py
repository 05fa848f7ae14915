"""Experiment configuration: nested settings, YAML round trip, validation.

Frequencies are linear MHz in the file (field names end in ``_mhz``), times
are us and phases rad.  Conversion to internal angular units happens in the
``to_*`` helpers only.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .errors import ConfigError
from .floquet import TransmonSpec
from .model import AahParams, NnnDisorderSpec
from .spectroscopy import NORMALIZE_MODES, SpectroscopyConfig
from .spectral import SCAN_PARAMETERS
from .units import mhz

KINDS = ("butterfly", "band-scan", "walk", "floquet-validate", "calibration-fit", "profile")


@dataclass
class ModelSettings:
    n_sites: int = 41
    u_mhz: float = 7.6
    lam: float = 0.0
    b_lambda: float = 0.0
    phi_lambda: float = 0.0
    v_mhz: float = 0.0
    b_v: float = 0.0
    phi_v: float = 0.0
    omega_ref_mhz: float = 0.0

    def to_params(self) -> AahParams:
        return AahParams(
            u=mhz(self.u_mhz), lam=self.lam, b_lambda=self.b_lambda, phi_lambda=self.phi_lambda,
            v=mhz(self.v_mhz), b_v=self.b_v, phi_v=self.phi_v, omega_ref=mhz(self.omega_ref_mhz),
        )


@dataclass
class ScanSettings:
    """Either explicit ``values`` or ``n_points`` samples from start to stop."""

    parameter: str = "phi_lambda"
    start: float = 0.0
    stop: float = 2.0 * math.pi
    n_points: int = 121
    endpoint: bool = False
    values: list | None = None

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        return np.linspace(self.start, self.stop, self.n_points, endpoint=self.endpoint)


@dataclass
class SpectroscopySettings:
    t_window: float = 1.0
    dt: float = 0.002
    t1: float = 21.0
    t2_star: float = 1.2
    frame_detuning_mhz: float = 0.0
    targets: list | None = None
    window_start: float | None = None
    n_freq: int = 1024
    normalize: str = "raw"

    def to_config(self) -> SpectroscopyConfig:
        return SpectroscopyConfig(
            t_window=self.t_window, dt=self.dt, t1=self.t1, t2_star=self.t2_star,
            frame_detuning=mhz(self.frame_detuning_mhz),
            targets=None if self.targets is None else tuple(self.targets),
            window_start=self.window_start,
        )


@dataclass
class EdgeSettings:
    n_edge: int = 3
    threshold: float = 0.5
    window_u: float = 0.5


@dataclass
class NnnSettings:
    enabled: bool = False
    mean_mhz: float = 0.7
    stdev_mhz: float = 0.3

    def to_spec(self, seed: int) -> NnnDisorderSpec:
        return NnnDisorderSpec(mhz(self.mean_mhz), mhz(self.stdev_mhz), seed)


@dataclass
class WalkSettings:
    start_sites: list = field(default_factory=lambda: [1])
    t_max: float = 1.0
    dt: float = 0.002
    score_window: list = field(default_factory=lambda: [0.0, 1.0])


@dataclass
class FloquetSettings:
    g_mhz: float = 7.6
    mu_mhz: list = field(default_factory=lambda: [80.0])
    amplitudes_over_mu: list = field(default_factory=lambda: [0.0, 1.0])
    t_max: float = 2.0
    eta: float = 1.0
    phase_offset: float = 0.0
    n_phase: int = 36
    phase_amplitude_mhz: float = 100.0
    e_jj_mhz: float = 22250.0
    e_c_mhz: float = 200.0
    k: float = 1.0
    b: float = 0.0
    mean_freq_mhz: float = 5100.0
    drive_amplitude_mhz: float = 200.0

    def transmon(self) -> TransmonSpec:
        return TransmonSpec(mhz(self.e_jj_mhz), mhz(self.e_c_mhz), self.k, self.b)


@dataclass
class ProfileSettings:
    t_window: float = 1.0
    t2: float = 1.0
    span_mhz: float = 5.0
    n_points: int = 2001


_SECTIONS = {
    "model": ModelSettings,
    "scan": ScanSettings,
    "spectroscopy": SpectroscopySettings,
    "edge": EdgeSettings,
    "nnn": NnnSettings,
    "walk": WalkSettings,
    "floquet": FloquetSettings,
    "profile": ProfileSettings,
}


@dataclass
class ExperimentConfig:
    kind: str
    preset: str | None = None
    figure: str = ""
    description: str = ""
    seed: int = 42
    out_dir: str | None = None
    model: ModelSettings = field(default_factory=ModelSettings)
    scan: ScanSettings = field(default_factory=ScanSettings)
    spectroscopy: SpectroscopySettings = field(default_factory=SpectroscopySettings)
    edge: EdgeSettings = field(default_factory=EdgeSettings)
    nnn: NnnSettings = field(default_factory=NnnSettings)
    walk: WalkSettings = field(default_factory=WalkSettings)
    floquet: FloquetSettings = field(default_factory=FloquetSettings)
    profile: ProfileSettings = field(default_factory=ProfileSettings)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "kind" not in data:
            raise ConfigError("config needs a 'kind'")
        kwargs: dict[str, Any] = {}
        for key, value in data.items():
            if key in _SECTIONS:
                kwargs[key] = _section(_SECTIONS[key], key, value)
            else:
                kwargs[key] = value
        return cls(**kwargs)

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)

    def validate(self) -> None:
        """Build every domain object once so bad values fail before any work."""
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}")
        try:
            if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
                raise ValueError("seed must be an unsigned 64-bit integer")
            if self.kind in ("butterfly", "band-scan", "walk"):
                params = self.model.to_params()
                if self.model.n_sites < 2:
                    raise ValueError("n_sites must be >= 2")
                if self.nnn.enabled:
                    self.nnn.to_spec(self.seed)
            if self.kind in ("butterfly", "band-scan"):
                if self.scan.parameter not in SCAN_PARAMETERS:
                    raise ValueError(f"scan parameter must be one of {SCAN_PARAMETERS}")
                grid = self.scan.grid()
                if grid.size == 0:
                    raise ValueError("scan grid is empty")
                for value in grid:
                    params.replace(**{self.scan.parameter: float(value)})
                cfg = self.spectroscopy.to_config()
                cfg.target_sites(self.model.n_sites)
                if self.spectroscopy.n_freq < 2:
                    raise ValueError("n_freq must be >= 2")
                if self.spectroscopy.normalize not in NORMALIZE_MODES:
                    raise ValueError(f"normalize must be one of {NORMALIZE_MODES}")
                if self.kind == "band-scan" and not 1 <= self.edge.n_edge <= self.model.n_sites / 4:
                    raise ValueError("edge.n_edge must lie in 1..n_sites/4")
            if self.kind == "walk":
                if not self.walk.start_sites:
                    raise ValueError("walk needs at least one start site")
                for s in self.walk.start_sites:
                    if not 1 <= int(s) <= self.model.n_sites:
                        raise ValueError(f"start site {s} outside 1..{self.model.n_sites}")
                if self.walk.t_max <= 0 or self.walk.dt <= 0:
                    raise ValueError("walk t_max and dt must be positive")
            if self.kind in ("floquet-validate", "calibration-fit"):
                if not self.floquet.mu_mhz or min(self.floquet.mu_mhz) <= 0:
                    raise ValueError("mu_mhz must be a non-empty list of positive values")
                if not self.floquet.amplitudes_over_mu or min(self.floquet.amplitudes_over_mu) < 0:
                    raise ValueError("amplitudes_over_mu must be non-negative")
                self.floquet.transmon()
            if self.kind == "profile":
                p = self.profile
                if p.t_window <= 0 or p.t2 <= 0 or p.span_mhz <= 0 or p.n_points < 3:
                    raise ValueError("profile settings must be positive")
        except ConfigError:
            raise
        except (ValueError, TypeError, IndexError) as exc:
            raise ConfigError(str(exc)) from exc


def _section(cls, name: str, value):
    if isinstance(value, cls):
        return value
    if not isinstance(value, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(value) - known
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")
    return cls(**value)


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False, default_flow_style=None)


def load_config_text(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    try:
        return ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return load_config_text(text)
