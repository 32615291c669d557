import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topochain.bloch import (
    BlochVector,
    band_energies,
    berry_curvature,
    bloch_field,
    bulk_gap,
    chern_analytic,
    chern_gauge_link,
    chern_solid_angle,
    gap_edges,
    is_gapless,
)
from topochain.errors import GaplessError, ValidationError
from topochain.lattice import LatticeParams


def triangle_degree(p, n=96):
    """Degree of (kx, theta) -> h/|h| over the full 2pi x 2pi torus, from the
    signed solid angles of spherical triangles (no derivatives involved)."""
    k = np.linspace(0, 2 * math.pi, n, endpoint=False)
    K, T = np.meshgrid(k, k, indexing="ij")
    h = np.stack([
        2 * p.J * np.cos(K),
        (2 * p.delta - p.chirality * p.Je * np.sin(T)) * np.sin(K),
        p.Je * np.cos(T) + 0 * K,
    ], axis=-1)
    h /= np.linalg.norm(h, axis=-1, keepdims=True)
    a = h
    b = np.roll(h, -1, axis=0)
    c = np.roll(b, -1, axis=1)
    d = np.roll(h, -1, axis=1)

    def omega(x, y, z):
        num = np.einsum("...i,...i", x, np.cross(y, z))
        den = 1 + np.einsum("...i,...i", x, y) + np.einsum("...i,...i", y, z) + np.einsum("...i,...i", z, x)
        return 2 * np.arctan2(num, den)

    return (omega(a, b, c).sum() + omega(a, c, d).sum()) / (4 * math.pi)


gapped = st.builds(
    LatticeParams,
    J=st.floats(0.2, 2.0),
    delta=st.floats(-1.5, 1.5),
    Je=st.floats(0.2, 2.0),
    chirality=st.sampled_from([1, -1]),
).filter(lambda p: abs(abs(2 * p.delta) - p.Je) > 0.05)


def test_bloch_field_examples():
    p = LatticeParams(J=1, delta=0, Je=1)
    assert bloch_field(p, 0, 0) == (0, 2, 0, 1)
    h = bloch_field(p, math.pi / 2, math.pi / 2)
    np.testing.assert_allclose(h, (0, 0, -1, 0), atol=1e-15)
    h = bloch_field(p.replace(delta=0.6), math.pi / 2, 0)
    np.testing.assert_allclose(h, (0, 0, 1.2, 1), atol=1e-15)


def test_band_energy_examples():
    assert band_energies(BlochVector(0, 2, 0, 1)) == pytest.approx((-math.sqrt(5), math.sqrt(5)))
    assert band_energies(BlochVector(1, 0, 0, 0)) == (1, 1)
    assert band_energies(BlochVector(0, 0, -1, 0)) == (-1, 1)


def test_bulk_gap_examples():
    assert bulk_gap(LatticeParams(J=1, delta=0, Je=1)) == pytest.approx(2.0, abs=1e-12)
    assert bulk_gap(LatticeParams(J=1, delta=0, Je=0)) == pytest.approx(0.0, abs=1e-12)
    assert bulk_gap(LatticeParams(J=1, delta=0.5, Je=1)) < 1e-12
    with pytest.raises(ValidationError):
        bulk_gap(LatticeParams(), 8, 8)


@settings(max_examples=40, derandomize=True)
@given(p=gapped)
def test_gap_edges_match_fine_grid(p):
    for theta in np.linspace(0, 2 * math.pi, 7):
        k = np.linspace(0, math.pi, 20001)
        hx, hy, hz = 2 * p.J * np.cos(k), (2 * p.delta - p.chirality * p.Je * math.sin(theta)) * np.sin(k), p.Je * math.cos(theta)
        lo, hi = gap_edges(p, theta)
        assert hi == pytest.approx(np.sqrt(hx**2 + hy**2 + hz**2).min(), abs=1e-6)
        assert lo == -hi


def test_gapless_detection():
    assert is_gapless(LatticeParams(delta=0.5, Je=1))
    assert is_gapless(LatticeParams(delta=-0.5, Je=1))
    assert is_gapless(LatticeParams(J=0))
    assert not is_gapless(LatticeParams(delta=0.49, Je=1))


def test_chern_analytic_examples():
    assert chern_analytic(LatticeParams(delta=0)) == 1
    assert chern_analytic(LatticeParams(delta=0.6)) == 0
    assert chern_analytic(LatticeParams(delta=-0.3)) == 1
    assert chern_analytic(LatticeParams(delta=0, chirality=-1)) == -1
    for method in (chern_analytic, chern_solid_angle, chern_gauge_link):
        with pytest.raises(GaplessError):
            method(LatticeParams(delta=0.5))


def test_solid_angle_examples():
    r = chern_solid_angle(LatticeParams(delta=0), 256, 256)
    assert r.rounded == 1 and r.quantization_error < 1e-3 and r.grid == (256, 256)
    assert chern_solid_angle(LatticeParams(delta=0.6)).rounded == 0
    assert chern_solid_angle(LatticeParams(delta=0, chirality=-1)).rounded == -1
    with pytest.raises(ValidationError):
        chern_solid_angle(LatticeParams(), 16, 16)


def test_gauge_link_examples():
    r = chern_gauge_link(LatticeParams(delta=0), 32, 32)
    assert r.value == pytest.approx(1.0, abs=1e-12) and r.rounded == 1
    assert chern_gauge_link(LatticeParams(delta=0.6)).rounded == 0
    assert chern_gauge_link(LatticeParams(delta=0, chirality=-1)).rounded == -1


def test_gauge_link_steps_at_transition():
    below = [chern_gauge_link(LatticeParams(delta=d)).rounded for d in (0.40, 0.49, 0.499)]
    above = [chern_gauge_link(LatticeParams(delta=d)).rounded for d in (0.501, 0.51, 0.60)]
    assert below == [1, 1, 1] and above == [0, 0, 0]


def test_triangle_oracle_examples():
    assert triangle_degree(LatticeParams(delta=0)) == pytest.approx(2.0, abs=1e-9)
    assert triangle_degree(LatticeParams(delta=0.6)) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=50, deadline=None, derandomize=True)
@given(p=gapped)
def test_three_methods_agree(p):
    c = chern_analytic(p)
    assert chern_solid_angle(p, 128, 128).rounded == c
    assert chern_gauge_link(p, 32, 32).rounded == c
    assert round(triangle_degree(p, 64) / 2) == c


@settings(max_examples=20, deadline=None, derandomize=True)
@given(p=gapped)
def test_gauge_link_grid_independent(p):
    values = {chern_gauge_link(p, n, n).rounded for n in (8, 16, 64)}
    assert len(values) == 1


@settings(max_examples=30, derandomize=True)
@given(p=gapped, kx=st.floats(0, 2 * math.pi), theta=st.floats(0, 2 * math.pi))
def test_gauge_periodicity(p, kx, theta):
    h, h_shift = bloch_field(p, kx, theta), bloch_field(p, kx + math.pi, theta)
    assert h_shift.hx == pytest.approx(-h.hx, abs=1e-12)
    assert h_shift.hy == pytest.approx(-h.hy, abs=1e-12)
    assert h_shift.hz == pytest.approx(h.hz, abs=1e-12)
    scale = max(1.0, abs(berry_curvature(p, kx, theta)))
    assert abs(berry_curvature(p, kx + math.pi, theta) - berry_curvature(p, kx, theta)) < 1e-12 * scale


@settings(max_examples=20, deadline=None, derandomize=True)
@given(p=gapped)
def test_full_period_doubles(p):
    half = chern_solid_angle(p, 128, 128).value
    full = chern_solid_angle(p, 256, 128, kx_max=2 * math.pi).value
    assert full == pytest.approx(2 * half, abs=1e-10)


@settings(max_examples=30, derandomize=True)
@given(p=gapped, kx=st.floats(0, math.pi), theta=st.floats(0, 2 * math.pi))
def test_bands_symmetric_without_detuning(p, kx, theta):
    lo, hi = band_energies(bloch_field(p, kx, theta))
    assert lo == -hi


def test_chirality_flip_negates_quadrature():
    # flipping chirality mirrors theta, so the midpoint sum is reordered, not changed
    p = LatticeParams(delta=0.2)
    a = chern_solid_angle(p, 64, 64).value
    b = chern_solid_angle(p.replace(chirality=-1), 64, 64).value
    assert a == pytest.approx(-b, abs=1e-12)
