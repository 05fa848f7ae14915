import math

import numpy as np
import pytest

from aahsim.model import AahParams, ChainSpec, realize_chain
from aahsim.spectral import EigenSystem, default_phase_grid, diagonalize_chain
from aahsim.spectroscopy import (
    EchoSignal,
    ScanDefinition,
    SpectroscopyConfig,
    apply_decay_and_window,
    chain_intensity,
    combined_fwhm,
    decoherence_fwhm,
    default_freq_grid,
    fourier_intensity,
    ideal_echo,
    intensity_map,
    local_maxima,
    measure_fwhm,
    profile_combined,
    profile_decoherence,
    profile_window,
    window_fwhm,
)
from aahsim.units import TWO_PI, mhz

import oracles

NO_DECAY = dict(t1=math.inf, t2_star=math.inf)


def tone(config, e0=0.0):
    times = config.times()
    return apply_decay_and_window(EchoSignal(times, np.exp(-1j * e0 * times)), config)


def test_config_validation():
    with pytest.raises(ValueError):
        SpectroscopyConfig(t_window=0.0)
    with pytest.raises(ValueError):
        SpectroscopyConfig(t_window=1.0, dt=0.1)
    with pytest.raises(ValueError):
        SpectroscopyConfig(targets=())
    cfg = SpectroscopyConfig()
    assert cfg.gamma == pytest.approx(1 / 42 + 1 / 1.2)
    assert SpectroscopyConfig(**NO_DECAY).t2 == math.inf
    t = cfg.times()
    assert t[0] == -0.5 and t[-1] == pytest.approx(0.5) and t.size == 501


def test_single_level_echo():
    w0 = mhz(5020.0)
    es = diagonalize_chain(ChainSpec([w0], []))
    times = np.linspace(0, 0.01, 11)
    np.testing.assert_allclose(ideal_echo(es, 1, times).values, np.exp(-1j * w0 * times), rtol=1e-9)


def test_echo_completeness_and_pair():
    g, w = mhz(7.6), mhz(100.0)
    es = diagonalize_chain(ChainSpec([w, w], [g]))
    times = np.linspace(0, 0.3, 61)
    sig = ideal_echo(es, 1, times)
    assert sig.values[0] == 1.0
    np.testing.assert_allclose(sig.values, np.exp(-1j * w * times) * np.cos(g * times), atol=1e-12)
    assert np.abs(sig.values).max() <= 1 + 1e-9


def test_echo_rejects_bad_site():
    es = diagonalize_chain(ChainSpec([0.0, 0.0], [1.0]))
    with pytest.raises(IndexError):
        ideal_echo(es, 3, [0.0])


def test_decay_and_window_identity():
    cfg = SpectroscopyConfig(window_start=0.0, **NO_DECAY)
    times = np.linspace(0, 1, 101)
    vals = np.exp(1j * times)
    out = apply_decay_and_window(EchoSignal(times, vals), cfg)
    np.testing.assert_array_equal(out.values, vals)


def test_decay_value():
    cfg = SpectroscopyConfig(window_start=0.0, t1=math.inf, t2_star=1.0)
    times = np.linspace(0, 1, 101)
    out = apply_decay_and_window(EchoSignal(times, np.ones(101, complex)), cfg)
    assert out.values[-1] == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_window_drops_outside_samples():
    cfg = SpectroscopyConfig(window_start=0.0, **NO_DECAY)
    out = apply_decay_and_window(EchoSignal(np.linspace(-1, 2, 31), np.ones(31, complex)), cfg)
    assert out.times.min() == pytest.approx(0.0, abs=1e-12) and out.times.max() == pytest.approx(1.0)


def test_frame_shift_moves_peak():
    e0 = mhz(3.0)
    freqs = np.linspace(-mhz(8), mhz(8), 3201)
    base = fourier_intensity(tone(SpectroscopyConfig(**NO_DECAY), e0), freqs)
    shifted = fourier_intensity(tone(SpectroscopyConfig(frame_detuning=e0, **NO_DECAY), e0), freqs)
    assert freqs[np.argmax(base)] == pytest.approx(e0, abs=freqs[1] - freqs[0])
    assert freqs[np.argmax(shifted)] == pytest.approx(0.0, abs=freqs[1] - freqs[0])


def test_pure_tone_peak_and_zeros():
    cfg = SpectroscopyConfig(**NO_DECAY)
    e0 = mhz(2.0)
    out = fourier_intensity(tone(cfg, e0), [e0, e0 - TWO_PI, e0 + TWO_PI])
    assert out[0] == pytest.approx(1.0, rel=1e-12)
    assert out[1] < 1e-20 and out[2] < 1e-20


def test_two_tone_pair():
    g = mhz(7.6)
    es = diagonalize_chain(ChainSpec([0.0, 0.0], [g]))
    freqs = np.linspace(-mhz(20), mhz(20), 4001)
    spec = chain_intensity(es, SpectroscopyConfig(targets=(1,), **NO_DECAY), freqs)
    peaks = freqs[local_maxima(spec, 0.5)]
    # the sidelobes of each tone pull the other peak by a few percent of a width
    np.testing.assert_allclose(np.sort(peaks), [-g, g], atol=0.05 * window_fwhm(1.0))


@pytest.mark.parametrize("t_m", [0.5, 1.0, 2.0])
def test_window_fwhm_numeric(t_m):
    cfg = SpectroscopyConfig(t_window=t_m, dt=t_m / 500, **NO_DECAY)
    freqs = np.linspace(-mhz(3 / t_m), mhz(3 / t_m), 6001)
    width = measure_fwhm(freqs, fourier_intensity(tone(cfg), freqs)) / TWO_PI
    assert width == pytest.approx(0.89 / t_m, rel=0.05)


def test_profile_window_values():
    assert profile_window(1.0, 1.0, 2.0) == 4.0
    assert profile_window(TWO_PI, 0.0, 1.0) < 1e-30
    assert window_fwhm(1.0) == pytest.approx(5.57, rel=0.01)


def test_profile_decoherence_values():
    assert profile_decoherence(0.0, 0.0, 1.7) == pytest.approx(4 * 1.7**2)
    exact = 2 * math.sqrt(math.sqrt(2) - 1) / TWO_PI
    assert decoherence_fwhm(1.0) / TWO_PI == pytest.approx(exact, rel=1e-12)
    # the quoted 0.2 / T_2 is a rounding of 0.2049 / T_2
    assert decoherence_fwhm(1.0) / TWO_PI == pytest.approx(0.2, rel=0.025)
    half = profile_decoherence(decoherence_fwhm(1.0) / 2, 0.0, 1.0)
    assert half == pytest.approx(0.5 * profile_decoherence(0.0, 0.0, 1.0), rel=1e-12)


def test_combined_limits():
    w = np.linspace(-40, 40, 801)
    np.testing.assert_allclose(profile_combined(w, 0.0, 1.0, 1e6), profile_window(w, 0.0, 1.0), rtol=1e-3,
                               atol=1e-3 * profile_window(0.0, 0.0, 1.0))
    np.testing.assert_allclose(profile_combined(w, 0.0, 1e6, 1.0), profile_decoherence(w, 0.0, 1.0), rtol=1e-3)
    np.testing.assert_array_equal(profile_combined(w, 0.0, 1.0, math.inf), profile_window(w, 0.0, 1.0))


def test_combined_matches_quadrature_oracle():
    d = np.linspace(-30, 30, 61)
    ref = oracles.windowed_tone_ft(d, -0.5, 0.5, gamma=1.0)
    np.testing.assert_allclose(profile_combined(d, 0.0, 1.0, 1.0), ref, rtol=1e-9)


def test_combined_fwhm_between_limits():
    fw = combined_fwhm(1.0, 1.0)
    assert fw > max(window_fwhm(1.0), decoherence_fwhm(1.0)) * 0.5
    half = profile_combined(fw / 2, 0.0, 1.0, 1.0)
    assert half == pytest.approx(0.5 * profile_combined(0.0, 0.0, 1.0, 1.0), rel=1e-9)


def test_parseval():
    es = diagonalize_chain(realize_chain(AahParams(u=mhz(3.0), lam=0.3, b_lambda=0.5), 8))
    cfg = SpectroscopyConfig(targets=(2,))
    times = cfg.times()
    sig = apply_decay_and_window(ideal_echo(es, 2, times), cfg)
    w = np.linspace(-mhz(200), mhz(200), 40001)
    freq_energy = np.trapezoid(fourier_intensity(sig, w), w) / TWO_PI
    time_energy = np.trapezoid(np.abs(sig.values) ** 2, sig.times)
    assert freq_energy == pytest.approx(time_energy, rel=0.01)


def test_peak_positions_track_eigenvalues():
    energies = np.array([-mhz(10.0), -mhz(4.0), mhz(3.0), mhz(9.0)])
    es = EigenSystem(energies, np.eye(4))
    cfg = SpectroscopyConfig()
    freqs = np.linspace(-mhz(15), mhz(15), 6001)
    spec = chain_intensity(es, cfg, freqs)
    fw = combined_fwhm(cfg.t_window, cfg.t2)
    peaks = freqs[local_maxima(spec, 0.1)]
    assert peaks.size == 4
    assert np.abs(np.sort(peaks) - energies).max() < fw / 4


def test_target_permutation_invariance():
    es = diagonalize_chain(realize_chain(AahParams(u=mhz(4.0), v=mhz(6.0), b_v=0.3), 9))
    freqs = np.linspace(-mhz(20), mhz(20), 257)
    a = chain_intensity(es, SpectroscopyConfig(targets=(1, 4, 7)), freqs)
    b = chain_intensity(es, SpectroscopyConfig(targets=(7, 1, 4)), freqs)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_frame_shift_covariance():
    es = diagonalize_chain(realize_chain(AahParams(u=mhz(4.0), v=mhz(6.0), b_v=0.3), 9))
    delta = mhz(1.37)
    freqs = np.linspace(-mhz(25), mhz(25), 4001)
    base = chain_intensity(es, SpectroscopyConfig(), freqs)
    moved = chain_intensity(es, SpectroscopyConfig(frame_detuning=delta), freqs)
    inner = np.abs(freqs) < mhz(20)
    expected = np.interp(freqs[inner] + delta, freqs, base)
    np.testing.assert_allclose(moved[inner], expected, atol=1e-3 * base.max())


def test_single_site_ridge():
    cfg = SpectroscopyConfig(frame_detuning=mhz(1.0))
    freqs = np.linspace(-mhz(10), mhz(10), 2001)
    for w in mhz(np.array([-3.0, 0.5, 4.0])):
        spec = chain_intensity(diagonalize_chain(ChainSpec([w], [])), cfg, freqs)
        assert freqs[np.argmax(spec)] == pytest.approx(w - mhz(1.0), abs=freqs[1] - freqs[0])


def test_default_grid():
    p = AahParams(u=mhz(7.6), v=mhz(15.2), omega_ref=mhz(5107.0))
    cfg = SpectroscopyConfig(frame_detuning=mhz(5107.0))
    grid = default_freq_grid(p, cfg)
    assert grid.size == 1024
    assert grid.mean() == pytest.approx(0.0, abs=1e-9)
    assert grid[-1] >= 2 * p.u + p.v


def test_edge_target_zero_ridge():
    p = AahParams(u=mhz(4.78), lam=0.4, b_lambda=0.5, omega_ref=mhz(5020.0))
    cfg = SpectroscopyConfig(targets=(1,), frame_detuning=mhz(5020.0))
    grid = default_phase_grid()
    imap = intensity_map(ScanDefinition("phi_lambda", grid), p, 41, cfg, normalize="per-scan")
    k0 = int(np.argmin(np.abs(imap.freqs)))
    ridge = imap.intensity[:, k0]
    wrapped = np.angle(np.exp(1j * grid))
    far = np.abs(np.abs(wrapped) - np.pi / 2) >= 0.1
    inside = np.abs(wrapped) < np.pi / 2
    assert np.all(ridge[far & inside] > 0.9)
    assert np.all(ridge[far & ~inside] < 0.05)
    assert np.all(imap.intensity >= 0) and imap.intensity.shape == (121, 1024)


def test_map_rejects_empty_scan():
    with pytest.raises(ValueError):
        ScanDefinition("phi_lambda", [])
