"""Hypothesis property tests for the invariants of each module."""

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import special

from aahsim.dynamics import basis_state, evolve_driven, evolve_static, quantum_walk
from aahsim.floquet import DriveSpec, TransmonSpec, effective_coupling_full, frequency_to_zpa, zpa_to_frequency
from aahsim.model import AahParams, ChainSpec, assemble_hamiltonian, realize_chain
from aahsim.spectral import detect_edge_modes, diagonalize_chain, edge_weights
from aahsim.spectroscopy import profile_combined
from aahsim.units import mhz

finite = dict(allow_nan=False, allow_infinity=False)
phases = st.floats(-7.0, 7.0, **finite)


@st.composite
def aah_params(draw, b_lambda=None, lam=None, v=None):
    return AahParams(
        u=draw(st.floats(0.0, 60.0, **finite)),
        lam=draw(st.floats(-2.0, 2.0, **finite)) if lam is None else lam,
        b_lambda=draw(st.floats(0.0, 1.0, **finite)) if b_lambda is None else b_lambda,
        phi_lambda=draw(phases),
        v=draw(st.floats(0.0, 120.0, **finite)) if v is None else v,
        b_v=draw(st.floats(0.0, 1.0, **finite)),
        phi_v=draw(phases),
        omega_ref=draw(st.floats(-40000.0, 40000.0, **finite)),
    )


@st.composite
def chains(draw, max_sites=14, nnn=True):
    n = draw(st.integers(3, max_sites))
    vals = st.floats(-80.0, 80.0, **finite)
    onsite = draw(st.lists(vals, min_size=n, max_size=n))
    nn = draw(st.lists(vals, min_size=n - 1, max_size=n - 1))
    chain = ChainSpec(np.array(onsite), np.array(nn))
    if nnn and draw(st.booleans()):
        chain = chain.with_nnn(np.array(draw(st.lists(st.floats(0.0, 10.0, **finite), min_size=n - 2, max_size=n - 2))))
    return chain


@given(aah_params(), st.integers(2, 60))
def test_realize_is_pure(params, n):
    a, b = realize_chain(params, n), realize_chain(params, n)
    assert a.onsite.tobytes() == b.onsite.tobytes()
    assert a.nn_coupling.tobytes() == b.nn_coupling.tobytes()


@given(aah_params(lam=0.0, v=0.0), st.integers(2, 60))
def test_uniform_chain(params, n):
    chain = realize_chain(params, n)
    assert np.all(chain.nn_coupling == params.u)
    assert np.all(chain.onsite == params.omega_ref)


@given(aah_params(b_lambda=0.5), st.integers(4, 60))
def test_half_flux_bond_alternation(params, n):
    nn = realize_chain(params, n).nn_coupling
    np.testing.assert_allclose(nn[2:], nn[:-2], rtol=0, atol=1e-12 * max(1.0, params.u))


@given(chains())
def test_hamiltonian_symmetric_and_banded(chain):
    h = assemble_hamiltonian(chain)
    assert np.array_equal(h, h.T)
    rows, cols = np.nonzero(h)
    assert np.all(np.abs(rows - cols) <= 2)


@given(chains())
def test_trace_preserved(chain):
    es = diagonalize_chain(chain)
    total = np.sum(chain.onsite)
    scale = max(1.0, np.abs(chain.onsite).sum(), np.abs(es.energies).sum())
    assert abs(np.sum(es.energies) - total) <= 1e-8 * scale


@given(aah_params(v=0.0), st.integers(2, 40))
def test_chiral_symmetry(params, n):
    es = diagonalize_chain(realize_chain(params, n))
    shifted = np.sort(es.energies - params.omega_ref)
    np.testing.assert_allclose(shifted, -shifted[::-1], atol=1e-8 * max(1.0, params.u * 3))


@given(aah_params(b_lambda=0.5, v=0.0), st.floats(-0.9, 0.9, **finite), st.floats(-500.0, 500.0, **finite))
def test_edge_detection_shift_invariant(params, lam, shift):
    assume(params.u > 1.0)
    params = params.replace(lam=lam)
    chain = realize_chain(params, 21)
    moved = ChainSpec(chain.onsite + shift, chain.nn_coupling)
    window = 0.5 * params.u
    a = detect_edge_modes(diagonalize_chain(chain), window, 3, 0.5, params.omega_ref)
    b = detect_edge_modes(diagonalize_chain(moved), window, 3, 0.5, params.omega_ref + shift)
    # shifts only matter at the exact window/threshold boundaries
    es = diagonalize_chain(chain)
    left, right = edge_weights(es, 3)
    assume(np.all(np.abs(np.abs(es.energies - params.omega_ref) - window) > 1e-6 * (1 + abs(shift))))
    assume(np.all(np.abs(left + right - 0.5) > 1e-6) and np.all(np.abs(left - right) > 1e-6))
    assert [(r.index, r.side) for r in a] == [(r.index, r.side) for r in b]


@given(chains(max_sites=10), st.integers(0, 9), st.floats(0.01, 0.5, **finite))
def test_static_walk_norm_and_columns(chain, site, t_max):
    site = site % chain.n_sites + 1
    rec = quantum_walk(chain, site, t_max=t_max, dt=t_max / 20)
    np.testing.assert_allclose(rec.probabilities.sum(axis=0), 1.0, atol=1e-8)
    psi = evolve_static(diagonalize_chain(chain), basis_state(chain.n_sites, site), np.array([t_max]))
    assert abs(np.linalg.norm(psi[0]) - 1.0) < 1e-12


@given(st.floats(0.0, 3.0, **finite), st.floats(-3.2, 3.2, **finite), st.floats(1.0, 15.0, **finite))
def test_driven_norm_conservation(a_over_mu, phase, g_mhz):
    mu = mhz(80.0)
    chain = ChainSpec(np.zeros(3), np.array([mhz(g_mhz), mhz(g_mhz)]))
    drives = [DriveSpec(a_over_mu * mu, mu, phase), None, DriveSpec(0.5 * mu, mu)]
    dt = (2 * np.pi / mu) / 40
    times = np.arange(41) * dt
    psi = evolve_driven(chain, drives, basis_state(3, 1), times, dt)
    assert np.max(np.abs(np.linalg.norm(psi, axis=1) - 1.0)) < 1e-7


@given(st.integers(-30, 30), st.floats(-10.0, 10.0, **finite))
def test_bessel_parity(m, x):
    assert abs(special.jv(m, -x) - (-1) ** m * special.jv(m, x)) <= 1e-12


@given(st.floats(0.0, 4.0, **finite), st.floats(0.0, 4.0, **finite), phases, phases)
def test_swap_conjugates_coupling(x1, x2, p1, p2):
    mu = mhz(80.0)
    d1, d2 = DriveSpec(x1 * mu, mu, p1), DriveSpec(x2 * mu, mu, p2)
    a = effective_coupling_full(1.0, d1, d2)
    b = effective_coupling_full(1.0, d2, d1)
    assert abs(b - a.conjugate()) < 1e-12


TRANSMON = TransmonSpec(mhz(22250.0), mhz(200.0), 1.0, 0.0)


@given(st.floats(0.0, np.pi / 2, **finite))
def test_zpa_round_trip(vz):
    back = frequency_to_zpa(TRANSMON, zpa_to_frequency(TRANSMON, vz))
    # near the sweet spot the map is flat, so compare in frequency there
    w = zpa_to_frequency(TRANSMON, vz)
    assert abs(zpa_to_frequency(TRANSMON, back) - w) <= 1e-10 * abs(w)
    if 1e-3 < vz < np.pi / 2 - 1e-3:
        assert abs(back - vz) < 1e-10


@given(st.floats(-200.0, 200.0, **finite), st.floats(0.05, 5.0, **finite), st.floats(0.05, 50.0, **finite))
def test_combined_profile_non_negative(omega, t_m, t2):
    s = profile_combined(omega, 0.0, t_m, t2)
    assert s >= 0.0 and s <= t_m**2 * (1 + 1e-12)
