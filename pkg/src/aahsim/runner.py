"""Execute an :class:`ExperimentConfig` and write its outputs.

Files are produced in a staging directory next to the output directory and
moved into place only after the whole run succeeded, so a failed run leaves
nothing behind.
"""

from __future__ import annotations

import json
import logging
import os
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import dynamics, floquet, io, spectral, spectroscopy
from ._version import __version__
from .config import ExperimentConfig, dump_config
from .errors import ConfigError
from .model import realize_chain, sample_nnn_disorder
from .units import TWO_PI, mhz, to_mhz

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _meta(cfg: ExperimentConfig, **extra) -> dict:
    meta = {
        "preset": cfg.preset or "-",
        "figure": cfg.figure or "-",
        "kind": cfg.kind,
        "seed": cfg.seed,
    }
    if cfg.kind in ("butterfly", "band-scan", "walk"):
        meta["model"] = json.dumps(cfg.model.__dict__, sort_keys=True)
    meta.update(extra)
    return meta


def _nnn(cfg: ExperimentConfig):
    if not cfg.nnn.enabled:
        return None
    return sample_nnn_disorder(cfg.nnn.to_spec(cfg.seed), cfg.model.n_sites)


def _run_scan(cfg: ExperimentConfig, out: Path, workers: int, render: bool) -> None:
    params = cfg.model.to_params()
    n = cfg.model.n_sites
    nnn = _nnn(cfg)
    scan = spectroscopy.ScanDefinition(cfg.scan.parameter, cfg.scan.grid())
    spec_cfg = cfg.spectroscopy.to_config()
    freqs = spectroscopy.default_freq_grid(params, spec_cfg, cfg.spectroscopy.n_freq)
    imap = spectroscopy.intensity_map(scan, params, n, spec_cfg, freqs, nnn, cfg.spectroscopy.normalize, workers)
    meta = _meta(cfg, spectroscopy=json.dumps(cfg.spectroscopy.__dict__, sort_keys=True),
                 normalize=imap.normalize)
    freq_mhz = to_mhz(freqs)
    io.write_table(
        out / "intensity_map.tsv", meta, ["scan_value", "freq_MHz", "intensity"],
        ["-", "MHz", "us^2" if imap.normalize == "raw" else "1"],
        ((s, f, v) for s, row in zip(imap.scan_values, imap.intensity) for f, v in zip(freq_mhz, row)),
    )
    shifted = to_mhz(imap.energies - params.omega_ref)
    io.write_table(
        out / "band_scan.tsv", meta, ["scan_value", "n", "E_n_MHz"], ["-", "-", "MHz"],
        ((s, k + 1, e) for s, row in zip(imap.scan_values, shifted) for k, e in enumerate(row)),
    )
    if cfg.kind == "band-scan":
        _edge_outputs(cfg, params, scan, nnn, out, meta, workers)
    if render:
        io.write_pgm(out / "intensity_map.pgm", imap.intensity.T[::-1])


def _edge_outputs(cfg, params, scan, nnn, out: Path, meta: dict, workers: int) -> None:
    n = cfg.model.n_sites
    window = cfg.edge.window_u * params.u

    def one(value):
        es = spectral.diagonalize_chain(spectral.chain_at(params, scan.parameter, value, n, nnn))
        reports = spectral.detect_edge_modes(es, window, cfg.edge.n_edge, cfg.edge.threshold, params.omega_ref)
        gap = spectral.central_gap(es, n // 2, exclude=[r.index for r in reports])
        return reports, gap

    results = spectral.parallel_map(one, list(scan.values), workers)
    rows = []
    for value, (reports, _) in zip(scan.values, results):
        for r in reports:
            rows.append((value, r.index + 1, to_mhz(r.energy - params.omega_ref), r.edge_weight_left,
                         r.edge_weight_right, r.ipr, r.side))
    io.write_table(
        out / "edge_modes.tsv", dict(meta, n_edge=cfg.edge.n_edge, threshold=cfg.edge.threshold),
        ["scan_value", "n", "E_MHz", "weight_left", "weight_right", "ipr", "side"],
        ["-", "-", "MHz", "1", "1", "1", "-"], rows,
    )
    io.write_table(
        out / "central_gap.tsv", dict(meta, band_split=n // 2), ["scan_value", "gap_MHz"], ["-", "MHz"],
        ((value, to_mhz(gap)) for value, (_, gap) in zip(scan.values, results)),
    )


def _run_walk(cfg: ExperimentConfig, out: Path, workers: int, render: bool) -> None:
    chain = realize_chain(cfg.model.to_params(), cfg.model.n_sites)
    nnn = _nnn(cfg)
    if nnn is not None:
        chain = chain.with_nnn(nnn)
    es = spectral.diagonalize_chain(chain)
    w = cfg.walk
    window = tuple(w.score_window)

    def one(site):
        return dynamics.quantum_walk(chain, int(site), w.t_max, w.dt, es)

    records = spectral.parallel_map(one, list(w.start_sites), workers)
    meta = _meta(cfg, walk=json.dumps(w.__dict__, sort_keys=True))
    scores = []
    for rec in records:
        t_ns = np.round(rec.times * 1000.0, 9)
        io.write_table(
            out / f"walk_site{rec.start_site}.tsv", dict(meta, start_site=rec.start_site),
            ["t_ns", "site", "P"], ["ns", "-", "1"],
            ((t, j + 1, rec.probabilities[j, k]) for k, t in enumerate(t_ns) for j in range(rec.n_sites)),
        )
        scores.append((rec.start_site, dynamics.localization_score(rec, rec.start_site, window)))
        if render:
            io.write_pgm(out / f"walk_site{rec.start_site}.pgm", rec.probabilities)
    io.write_table(out / "scores.tsv", dict(meta, window_us=list(window)), ["start_site", "score"], ["-", "1"], scores)


def _run_floquet_validate(cfg: ExperimentConfig, out: Path, workers: int, render: bool) -> None:
    f = cfg.floquet
    g = mhz(f.g_mhz)
    jobs = [(m, a) for m in f.mu_mhz for a in f.amplitudes_over_mu]

    def one(job):
        mu_mhz, a_over_mu = job
        mu = mhz(mu_mhz)
        drive = floquet.DriveSpec(a_over_mu * mu, mu, eta=f.eta) if a_over_mu > 0 else None
        return floquet.validate_rwa(g, drive, None, f.t_max, floquet.default_step(mu))

    reports = spectral.parallel_map(one, jobs, workers)
    io.write_table(
        out / "rwa.tsv", _meta(cfg, floquet=json.dumps(f.__dict__, sort_keys=True)),
        ["mu_MHz", "A_over_mu", "g_swap_exact_MHz", "g_swap_effective_MHz", "rel_error", "decoupled", "residual"],
        ["MHz", "1", "MHz", "MHz", "1", "-", "1"],
        ((m, a, to_mhz(r.f_swap_exact), to_mhz(r.f_swap_effective), r.rel_error, int(r.decoupled),
          r.residual_amplitude) for (m, a), r in zip(jobs, reports)),
    )


def _run_calibration(cfg: ExperimentConfig, out: Path, workers: int, render: bool) -> None:
    f = cfg.floquet
    g = mhz(f.g_mhz)
    mu = mhz(f.mu_mhz[0])
    amps = [a * mu for a in f.amplitudes_over_mu]
    rows = np.array(spectral.parallel_map(
        lambda a: floquet.swap_frequency_sweep(g, [a], mu, f.t_max, f.eta)[0], amps, workers))
    fit = floquet.fit_eta(rows, g, mu)
    phases = np.arange(f.n_phase) * (TWO_PI / f.n_phase) - np.pi
    a_phase = mhz(f.phase_amplitude_mhz)
    phase_rows = floquet.phase_scan_samples(g, a_phase, a_phase, mu, phases, f.phase_offset)
    delta_phi = floquet.align_phase(phase_rows)
    meta = _meta(cfg, floquet=json.dumps(f.__dict__, sort_keys=True))
    io.write_table(out / "amplitude_sweep.tsv", meta, ["A_MHz", "f_swap_MHz"], ["MHz", "MHz"],
                   ((to_mhz(a), fs) for a, fs in rows))
    io.write_table(out / "phase_sweep.tsv", meta, ["delta_phi", "f_swap_MHz"], ["rad", "MHz"], phase_rows)
    transmon = f.transmon()
    drive = floquet.DriveSpec(mhz(f.drive_amplitude_mhz), mu, mean_freq=mhz(f.mean_freq_mhz))
    times = np.arange(0, 401) * (2.0 * TWO_PI / mu / 400)
    zpa = floquet.synthesize_drive_zpa(transmon, drive, times)
    io.write_table(out / "drive_zpa.tsv", meta, ["t_ns", "zpa"], ["ns", "Zpa"],
                   zip(np.round(times * 1000.0, 9), zpa))
    io.write_key_values(out / "calibration.txt", meta, {
        "eta": fit.eta,
        "eta_residual_rms_MHz": fit.residual_rms,
        "n_amplitudes": fit.n_samples,
        "delta_phi": delta_phi,
        "injected_phase_offset": f.phase_offset,
        "zpa_mean": floquet.frequency_to_zpa(transmon, drive.mean_freq).item(),
    })


def _run_profile(cfg: ExperimentConfig, out: Path, workers: int, render: bool) -> None:
    p = cfg.profile
    det = np.linspace(-p.span_mhz, p.span_mhz, p.n_points)
    w = mhz(det)
    rows = zip(det,
               spectroscopy.profile_window(w, 0.0, p.t_window),
               spectroscopy.profile_decoherence(w, 0.0, p.t2),
               spectroscopy.profile_combined(w, 0.0, p.t_window, p.t2))
    meta = _meta(cfg, profile=json.dumps(p.__dict__, sort_keys=True))
    io.write_table(out / "profiles.tsv", meta, ["detuning_MHz", "window", "decoherence", "combined"],
                   ["MHz", "us^2", "us^2", "us^2"], rows)
    io.write_key_values(out / "widths.txt", meta, {
        "fwhm_window_MHz": to_mhz(spectroscopy.window_fwhm(p.t_window)),
        "fwhm_decoherence_MHz": to_mhz(spectroscopy.decoherence_fwhm(p.t2)),
        "fwhm_combined_MHz": to_mhz(spectroscopy.combined_fwhm(p.t_window, p.t2)),
    })


_HANDLERS = {
    "butterfly": _run_scan,
    "band-scan": _run_scan,
    "walk": _run_walk,
    "floquet-validate": _run_floquet_validate,
    "calibration-fit": _run_calibration,
    "profile": _run_profile,
}


def execute(cfg: ExperimentConfig, out_dir, workers: int = 1, render: bool = False) -> list[Path]:
    """Validate, run and publish; raises on failure after removing staged files."""
    cfg.validate()
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}.staging-", dir=out_dir.parent))
    try:
        (staging / "config.resolved.yaml").write_text(f"# aahsim {__version__}\n" + dump_config(cfg))
        _HANDLERS[cfg.kind](cfg, staging, max(1, int(workers)), render)
        out_dir.mkdir(exist_ok=True)
        published = []
        for item in sorted(staging.iterdir()):
            target = out_dir / item.name
            os.replace(item, target)
            published.append(target)
        return published
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def run(cfg: ExperimentConfig, out_dir, workers: int = 1, render: bool = False) -> int:
    """Exit-status wrapper around :func:`execute` for the command line."""
    try:
        files = execute(cfg, out_dir, workers, render)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # numerical or precondition failure inside a run
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in files:
        log.info("wrote %s", path)
    return EXIT_OK
