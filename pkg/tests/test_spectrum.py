import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topochain.errors import NoEdgeStateError, ValidationError
from topochain.lattice import LatticeParams, build_hamiltonian
from topochain.linalg import hermitian_eig
from topochain.spectrum import (
    DEFAULT_THETA_POINTS,
    density_profile,
    edge_theta_window,
    identify_edge_states,
    open_spectrum,
    spectrum_rows,
)


def test_density_profile_examples():
    np.testing.assert_array_equal(density_profile([1, 0, 0]).site_probabilities, [1, 0, 0])
    np.testing.assert_allclose(density_profile(np.ones(4)).site_probabilities, 0.25)
    np.testing.assert_allclose(density_profile(np.array([1, 1j]) / math.sqrt(2)).site_probabilities, 0.5)
    with pytest.raises(ValidationError):
        density_profile(np.zeros(3))


def test_topological_spectrum_has_two_edge_levels():
    table = open_spectrum(LatticeParams(J=1, delta=0, Je=1, L=10))
    counts = table.edge_counts()
    assert len(table.theta_grid) == DEFAULT_THETA_POINTS
    assert counts.max() == 2
    assert set(np.unique(counts)) <= {0, 2}
    # the edge branch crosses the gap around theta = pi/2
    lo, hi = edge_theta_window(table)
    assert lo < math.pi / 2 < hi
    assert np.all(np.diff(table.energies, axis=1) >= 0)


def test_trivial_spectrum_has_no_edge_levels():
    table = open_spectrum(LatticeParams(J=1, delta=0.6, Je=1, L=10))
    assert not table.edge_flags.any()
    assert edge_theta_window(table) is None


def test_uniform_chain_is_gapless():
    table = open_spectrum(LatticeParams(J=1, delta=0, Je=0, L=10))
    np.testing.assert_array_equal(table.gap_bounds, 0.0)
    assert not table.edge_flags.any()


def test_flags_only_inside_gap():
    table = open_spectrum(LatticeParams(delta=0.1, L=12))
    lo, hi = table.gap_bounds[:, :1], table.gap_bounds[:, 1:]
    assert np.all(~table.edge_flags | ((table.energies > lo) & (table.energies < hi)))


def test_edge_states_left_and_right():
    levels, profiles, ipr = identify_edge_states(LatticeParams(L=10), math.pi / 2)
    assert len(levels) == 2
    left, right = profiles
    assert left.boundary_weight()[0] > 0.5 and right.boundary_weight()[1] > 0.5
    assert min(ipr) > 0.2
    for prof in profiles:
        assert prof.site_probabilities.sum() == pytest.approx(1, abs=1e-10)
        assert np.all(prof.site_probabilities >= 0)


def test_edge_state_confinement_with_length():
    # zero-energy edge mode at theta=pi/2: amplitudes 1, -1/2, 1/4... on a-sites,
    # so site-0 weight tends to 1/(1 + 1/8) = 8/9 and IPR to 4/5
    weights, iprs = [], []
    for L in (10, 20, 40):
        _, profiles, ipr = identify_edge_states(LatticeParams(L=L), math.pi / 2)
        weights.append(profiles[0].site_probabilities[0])
        iprs.append(ipr[0])
    errors = [abs(w - 8 / 9) for w in weights]
    assert errors[0] > errors[1] > errors[2] and errors[2] < 1e-14
    assert iprs[-1] == pytest.approx(0.8, abs=1e-12)


def test_edge_splitting_shrinks_with_length():
    splits = []
    for L in (10, 20, 40):
        idx, _, _ = identify_edge_states(LatticeParams(L=L), math.pi / 2)
        vals, _ = hermitian_eig(build_hamiltonian(LatticeParams(L=L), theta=math.pi / 2))
        splits.append(np.ptp(vals[idx]))
    assert splits[0] > 100 * splits[1] > 1e4 * splits[2]


def test_no_edge_state_error():
    with pytest.raises(NoEdgeStateError):
        identify_edge_states(LatticeParams(delta=0.6), math.pi / 2)


def test_spectrum_rows():
    table = open_spectrum(LatticeParams(L=4), [0.0, 1.0])
    rows = list(spectrum_rows(table))
    assert len(rows) == 8
    assert rows[0][:2] == (0.0, 0) and rows[-1][:2] == (1.0, 3)
    assert all(r[3] in (0, 1) for r in rows)


params = st.builds(
    LatticeParams,
    J=st.floats(0.3, 2.0),
    delta=st.floats(-1.5, 1.5),
    Je=st.floats(0.3, 2.0),
    L=st.sampled_from([4, 6, 10, 16]),
)


@settings(max_examples=30, derandomize=True)
@given(p=params, theta=st.floats(0, 2 * math.pi))
def test_spectrum_symmetric_about_zero(p, theta):
    vals, _ = hermitian_eig(build_hamiltonian(p, theta=theta))
    np.testing.assert_allclose(vals, -vals[::-1], atol=1e-10)


@settings(max_examples=30, derandomize=True)
@given(p=params, theta=st.floats(0, 2 * math.pi))
def test_spectrum_mirror_in_theta(p, theta):
    a, _ = hermitian_eig(build_hamiltonian(p, theta=theta))
    b, _ = hermitian_eig(build_hamiltonian(p, theta=math.pi - theta))
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_shift_by_pi_is_not_a_symmetry():
    p = LatticeParams(delta=0.2, L=10)
    a, _ = hermitian_eig(build_hamiltonian(p, theta=0.3))
    b, _ = hermitian_eig(build_hamiltonian(p, theta=0.3 + math.pi))
    assert np.abs(np.sort(a) - np.sort(-b)).max() > 1e-3


@settings(max_examples=16, deadline=None, derandomize=True)
@given(J=st.floats(0.5, 1.5), Je=st.floats(0.5, 1.5), frac=st.floats(-0.9, 0.9))
def test_bulk_edge_topological(J, Je, frac):
    p = LatticeParams(J=J, Je=Je, delta=0.5 * Je * frac, L=40)
    assert open_spectrum(p).edge_flags.any()


@settings(max_examples=16, deadline=None, derandomize=True)
@given(J=st.floats(0.5, 1.5), Je=st.floats(0.5, 1.5), excess=st.floats(0.05, 1.0))
def test_bulk_edge_trivial(J, Je, excess):
    p = LatticeParams(J=J, Je=Je, delta=0.5 * Je + excess, L=40)
    assert not open_spectrum(p).edge_flags.any()


def test_negative_imbalance_trivial_phase_has_static_end_modes():
    # 2 delta < -Je: C = 0 yet every theta carries a pair of in-gap end modes
    table = open_spectrum(LatticeParams(delta=-0.6, L=20))
    assert np.all(table.edge_counts() == 2)
