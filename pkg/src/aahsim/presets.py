"""Shipped experiment presets, one per reproduced figure panel group."""

from __future__ import annotations

import math
from typing import Callable

from .config import (
    EdgeSettings,
    ExperimentConfig,
    FloquetSettings,
    ModelSettings,
    NnnSettings,
    ProfileSettings,
    ScanSettings,
    SpectroscopySettings,
    WalkSettings,
)

# reference frequencies of the two calibrations (MHz)
OMEGA_REF_DIAGONAL = 5107.0
OMEGA_REF_OFFDIAGONAL = 5020.0

PI_FLUX = dict(u_mhz=4.78, lam=0.4, b_lambda=0.5, omega_ref_mhz=OMEGA_REF_OFFDIAGONAL)
QUARTER_FLUX_GAPPED = dict(u_mhz=3.35, lam=1.0, b_lambda=0.25, omega_ref_mhz=OMEGA_REF_OFFDIAGONAL)
QUARTER_FLUX_CLOSED = dict(u_mhz=2.77, lam=math.sqrt(2.0), b_lambda=0.25, omega_ref_mhz=OMEGA_REF_OFFDIAGONAL)


def _butterfly(n_sites: int, name: str, figure: str, description: str) -> ExperimentConfig:
    return ExperimentConfig(
        kind="butterfly",
        preset=name,
        figure=figure,
        description=description,
        model=ModelSettings(n_sites=n_sites, u_mhz=7.6, v_mhz=15.2, omega_ref_mhz=OMEGA_REF_DIAGONAL),
        scan=ScanSettings(parameter="b_v", start=0.0, stop=1.0, n_points=121, endpoint=True),
        spectroscopy=SpectroscopySettings(frame_detuning_mhz=OMEGA_REF_DIAGONAL),
    )


def _band_scan(n_sites: int, model: dict, name: str, figure: str, description: str, targets=None,
               nnn: bool = False, normalize: str = "per-scan") -> ExperimentConfig:
    edge = EdgeSettings(n_edge=max(1, n_sites // 4) if nnn else 3)
    return ExperimentConfig(
        kind="band-scan",
        preset=name,
        figure=figure,
        description=description,
        model=ModelSettings(n_sites=n_sites, **model),
        scan=ScanSettings(parameter="phi_lambda", start=0.0, stop=2.0 * math.pi, n_points=121),
        spectroscopy=SpectroscopySettings(
            frame_detuning_mhz=model["omega_ref_mhz"], targets=targets, normalize=normalize
        ),
        edge=edge,
        nnn=NnnSettings(enabled=nnn),
    )


def _walk(n_sites: int, phi: float, name: str, figure: str) -> ExperimentConfig:
    return ExperimentConfig(
        kind="walk",
        preset=name,
        figure=figure,
        description=f"single-excitation walks from both boundary qubits, N={n_sites}, phi_lambda={phi:g}",
        model=ModelSettings(n_sites=n_sites, phi_lambda=phi, **PI_FLUX),
        walk=WalkSettings(start_sites=[1, n_sites]),
    )


def _registry() -> dict[str, Callable[[], ExperimentConfig]]:
    p = {}
    p["fig2-butterfly"] = lambda: _butterfly(41, "fig2-butterfly", "Fig. 2(d)", "diagonal AAH butterfly, 121 b_v values")
    p["fig3a-pi-flux-even"] = lambda: _band_scan(40, PI_FLUX, "fig3a-pi-flux-even", "Fig. 3(a)", "pi-flux band scan, all targets")
    p["fig3b-pi-flux-odd"] = lambda: _band_scan(41, PI_FLUX, "fig3b-pi-flux-odd", "Fig. 3(b)", "pi-flux band scan, all targets")
    p["fig3c-edge-q1-even"] = lambda: _band_scan(40, PI_FLUX, "fig3c-edge-q1-even", "Fig. 3(c)", "left boundary qubit", [1])
    p["fig3d-edge-q40-even"] = lambda: _band_scan(40, PI_FLUX, "fig3d-edge-q40-even", "Fig. 3(d)", "right boundary qubit", [40])
    p["fig3e-edge-q1-odd"] = lambda: _band_scan(41, PI_FLUX, "fig3e-edge-q1-odd", "Fig. 3(e)", "left boundary qubit", [1])
    p["fig3f-edge-q41-odd"] = lambda: _band_scan(41, PI_FLUX, "fig3f-edge-q41-odd", "Fig. 3(f)", "right boundary qubit", [41])
    p["fig3gh-walk-even-phi0"] = lambda: _walk(40, 0.0, "fig3gh-walk-even-phi0", "Fig. 3(g,h)")
    p["fig3ij-walk-even-phipi"] = lambda: _walk(40, math.pi, "fig3ij-walk-even-phipi", "Fig. 3(i,j)")
    p["fig3kl-walk-odd-phi0"] = lambda: _walk(41, 0.0, "fig3kl-walk-odd-phi0", "Fig. 3(k,l)")
    p["fig3mn-walk-odd-phipi"] = lambda: _walk(41, math.pi, "fig3mn-walk-odd-phipi", "Fig. 3(m,n)")
    p["fig4a-quarter-flux-closed"] = lambda: _band_scan(
        40, QUARTER_FLUX_CLOSED, "fig4a-quarter-flux-closed", "Fig. 4(a)", "b_lambda=1/4, central gap closed")
    p["fig4b-quarter-flux-gapped"] = lambda: _band_scan(
        40, QUARTER_FLUX_GAPPED, "fig4b-quarter-flux-gapped", "Fig. 4(b)", "b_lambda=1/4, central gap open")
    p["fig4c-quarter-flux-edges"] = lambda: _band_scan(
        40, QUARTER_FLUX_GAPPED, "fig4c-quarter-flux-edges", "Fig. 4(c)", "boundary qubits 1 and 40", [1, 40])
    p["fig4d-quarter-flux-bulk"] = lambda: _band_scan(
        40, QUARTER_FLUX_GAPPED, "fig4d-quarter-flux-bulk", "Fig. 4(d)", "bulk qubits only", [13, 15, 26, 32])
    p["fs-butterfly-n9"] = lambda: _butterfly(9, "fs-butterfly-n9", "finite-size butterfly", "N=9, v=2u")
    p["fs-butterfly-n20"] = lambda: _butterfly(20, "fs-butterfly-n20", "finite-size butterfly", "N=20, v=2u")
    p["fs-pi-flux-n20"] = lambda: _band_scan(20, PI_FLUX, "fs-pi-flux-n20", "finite-size pi-flux", "N=20")
    p["nnn-pi-flux-even"] = lambda: _band_scan(
        40, PI_FLUX, "nnn-pi-flux-even", "NNN robustness, pi-flux", "N=40 with disordered NNN", nnn=True)
    p["nnn-pi-flux-odd"] = lambda: _band_scan(
        41, PI_FLUX, "nnn-pi-flux-odd", "NNN robustness, pi-flux", "N=41 with disordered NNN", nnn=True)
    p["nnn-quarter-flux"] = lambda: _band_scan(
        40, QUARTER_FLUX_GAPPED, "nnn-quarter-flux", "NNN robustness, b_lambda=1/4", "N=40, lambda=1 with NNN", nnn=True)
    p["floquet-validate"] = lambda: ExperimentConfig(
        kind="floquet-validate", preset="floquet-validate", figure="Floquet coupling check",
        description="driven two-qubit swaps vs Bessel couplings",
        floquet=FloquetSettings(mu_mhz=[80.0, 160.0, 320.0], amplitudes_over_mu=[0.0, 1.0]),
    )
    p["calibration-fit"] = lambda: ExperimentConfig(
        kind="calibration-fit", preset="calibration-fit", figure="Floquet calibration",
        description="eta fit from a simulated amplitude sweep, phase alignment, drive waveform",
        floquet=FloquetSettings(amplitudes_over_mu=[0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 3.5, 4.0], phase_offset=0.3),
    )
    p["profile"] = lambda: ExperimentConfig(
        kind="profile", preset="profile", figure="line-shape profiles", description="T_m = T_2 = 1 us",
        profile=ProfileSettings(t_window=1.0, t2=1.0),
    )
    return p


PRESETS = _registry()


def preset_names() -> list[str]:
    return list(PRESETS)


def get_preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; see list-presets") from None


def describe(cfg: ExperimentConfig) -> str:
    m = cfg.model
    if cfg.kind in ("butterfly", "band-scan", "walk"):
        parts = [f"N={m.n_sites}", f"u={m.u_mhz:g} MHz", f"lambda={m.lam!r}", f"b_lambda={m.b_lambda:g}",
                 f"v={m.v_mhz:g} MHz"]
        if cfg.kind != "walk" and cfg.spectroscopy.targets:
            parts.append("targets=" + ",".join(str(t) for t in cfg.spectroscopy.targets))
        if cfg.nnn.enabled:
            parts.append("nnn")
        return " ".join(parts)
    if cfg.kind in ("floquet-validate", "calibration-fit"):
        f = cfg.floquet
        return f"g={f.g_mhz:g} MHz mu=" + ",".join(f"{x:g}" for x in f.mu_mhz) + " MHz"
    return f"T_m={cfg.profile.t_window:g} us T_2={cfg.profile.t2:g} us"


def preset_table() -> str:
    rows = []
    for name in PRESETS:
        cfg = get_preset(name)
        rows.append(f"{name}\t{cfg.figure}\t{cfg.kind}\t{describe(cfg)}")
    return "\n".join(["name\tfigure\tkind\tparameters"] + rows)
