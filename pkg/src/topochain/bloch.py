"""Momentum-space two-band model and its Chern number.

With the mixing angle ``theta`` promoted to a second quasi-momentum, the
chain is described by ``h(kx, theta) = h0 + h . sigma`` with

    hx = 2 J cos kx
    hy = (2 delta - s Je sin theta) sin kx
    hz = Je cos theta

on the torus ``kx in [0, pi)``, ``theta in [0, 2 pi)``. ``h`` is only
pi-periodic in ``kx`` up to the gauge ``h(kx + pi) = sigma_z h(kx) sigma_z``,
which the gauge-link method applies as a transition function at the seam.

Three routes to the ground-band Chern number are provided: the closed-form
phase diagram, midpoint quadrature of the solid-angle density, and the
lattice field-strength (gauge-link) method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, GaplessError, ValidationError
from .lattice import TWO_PI, LatticeParams
from .linalg import hermitian_eig

GAPLESS_RTOL = 1e-12

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class BlochVector(NamedTuple):
    h0: float
    hx: float
    hy: float
    hz: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.hx**2 + self.hy**2 + self.hz**2)


@dataclass(frozen=True)
class ChernResult:
    value: float
    rounded: int
    quantization_error: float
    grid: tuple[int, int]


def _components(p: LatticeParams, kx, theta):
    kx = np.asarray(kx, dtype=float)
    theta = np.asarray(theta, dtype=float)
    amp = 2.0 * p.delta - p.chirality * p.Je * np.sin(theta)
    hx = 2.0 * p.J * np.cos(kx) + 0.0 * theta
    hy = amp * np.sin(kx)
    hz = p.Je * np.cos(theta) + 0.0 * kx
    return hx, hy, hz


def bloch_field(p: LatticeParams, kx: float, theta: float) -> BlochVector:
    hx, hy, hz = _components(p, kx, theta)
    return BlochVector(p.DeltaC, float(hx), float(hy), float(hz))


def band_energies(h: BlochVector) -> tuple[float, float]:
    return h.h0 - h.norm, h.h0 + h.norm


def _grid(Nk: int, Ntheta: int, kx_max: float = math.pi, midpoint: bool = False):
    shift = 0.5 if midpoint else 0.0
    kx = (np.arange(Nk) + shift) * (kx_max / Nk)
    theta = (np.arange(Ntheta) + shift) * (TWO_PI / Ntheta)
    return np.meshgrid(kx, theta, indexing="ij")


def bulk_gap(p: LatticeParams, Nk: int = 256, Ntheta: int = 256) -> float:
    """Smallest direct gap ``2|h|`` over a uniform ``(kx, theta)`` grid.

    Grids include ``kx = pi/2`` and ``theta = pi/2`` whenever the counts are
    divisible by 2 and 4 respectively, which is where the gap can close.
    """
    if Nk < 16 or Ntheta < 16:
        raise ValidationError("grid counts must be >= 16")
    K, T = _grid(Nk, Ntheta)
    hx, hy, hz = _components(p, K, T)
    return float(2.0 * np.sqrt(hx**2 + hy**2 + hz**2).min())


def gap_edges(p: LatticeParams, theta: float) -> tuple[float, float]:
    """Bulk band edges ``(max_kx E-, min_kx E+)`` at fixed ``theta``, detuning excluded.

    Minimizing ``4J^2 cos^2 kx + A^2 sin^2 kx`` over ``kx`` gives
    ``min(4J^2, A^2)``, so the edges are exact rather than grid-sampled.
    """
    amp = 2.0 * p.delta - p.chirality * p.Je * math.sin(theta)
    half = math.sqrt((p.Je * math.cos(theta)) ** 2 + min(4.0 * p.J**2, amp**2))
    return -half, half


def is_gapless(p: LatticeParams) -> bool:
    """True when ``|h|`` vanishes somewhere on the torus.

    That happens iff ``J = 0``, or ``|2 delta| = Je`` (which includes the
    uniform chain ``delta = Je = 0``).
    """
    scale = max(abs(p.J), abs(p.delta), p.Je)
    if scale == 0.0:
        return True
    tol = GAPLESS_RTOL * scale
    return abs(p.J) <= tol or abs(abs(2.0 * p.delta) - p.Je) <= tol


def _require_gapped(p: LatticeParams) -> None:
    if is_gapless(p):
        raise GaplessError(
            f"bulk gap closes (J={p.J}, delta={p.delta}, Je={p.Je}); Chern number undefined"
        )


def chern_analytic(p: LatticeParams) -> int:
    """Phase diagram: ``C = s`` inside ``-Je < 2 delta < Je``, else 0."""
    _require_gapped(p)
    return p.chirality if abs(2.0 * p.delta) < p.Je else 0


def berry_curvature(p: LatticeParams, kx, theta):
    """Solid-angle density ``(d_kx h^ x d_theta h^) . h^``.

    Uses the identity ``(d1 h x d2 h) . h / |h|^3`` with analytic derivatives;
    the Chern number is its integral over the torus divided by ``4 pi``.
    """
    kx = np.asarray(kx, dtype=float)
    theta = np.asarray(theta, dtype=float)
    hx, hy, hz = _components(p, kx, theta)
    s, sk, ck = p.chirality, np.sin(kx), np.cos(kx)
    st, ct = np.sin(theta), np.cos(theta)
    amp = 2.0 * p.delta - s * p.Je * st
    # d/dkx h and d/dtheta h
    ax, ay, az = -2.0 * p.J * sk, amp * ck, 0.0 * st
    bx, by, bz = 0.0 * sk, -s * p.Je * ct * sk, -p.Je * st
    cross_x = ay * bz - az * by
    cross_y = az * bx - ax * bz
    cross_z = ax * by - ay * bx
    norm = np.sqrt(hx**2 + hy**2 + hz**2)
    return (cross_x * hx + cross_y * hy + cross_z * hz) / norm**3


def chern_solid_angle(
    p: LatticeParams, Nk: int = 256, Ntheta: int = 256, kx_max: float = math.pi
) -> ChernResult:
    """Midpoint-rule quadrature of the solid-angle density.

    ``kx_max = 2 pi`` integrates over the doubled cell and returns twice the
    ``[0, pi)`` value.
    """
    _require_gapped(p)
    if Nk < 32 or Ntheta < 32:
        raise ValidationError("grid counts must be >= 32")
    K, T = _grid(Nk, Ntheta, kx_max, midpoint=True)
    density = berry_curvature(p, K, T)
    area = (kx_max / Nk) * (TWO_PI / Ntheta)
    value = math.fsum(density.ravel()) * area / (4.0 * math.pi)
    rounded = int(round(value))
    return ChernResult(value, rounded, abs(value - rounded), (Nk, Ntheta))


def lower_band_states(p: LatticeParams, kx, theta) -> np.ndarray:
    """Lower-band eigenvectors of ``h . sigma``, shape ``(..., 2)``."""
    hx, hy, hz = _components(p, kx, theta)
    hx, hy, hz = np.broadcast_arrays(hx, hy, hz)
    mats = (
        hx[..., None, None] * _SIGMA_X
        + hy[..., None, None] * _SIGMA_Y
        + hz[..., None, None] * _SIGMA_Z
    )
    _, vectors = hermitian_eig(mats)
    return vectors[..., :, 0]


LINK_FLOOR = 1e-10


def _links(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    overlap = np.sum(np.conj(u) * v, axis=-1)
    size = np.abs(overlap)
    if np.any(size < LINK_FLOOR):
        raise ConvergenceError(
            f"vanishing link overlap ({size.min():.2e}); refine the (kx, theta) grid"
        )
    return overlap / size


def chern_gauge_link(p: LatticeParams, Nk: int = 32, Ntheta: int = 32) -> ChernResult:
    """Lattice field-strength Chern number on ``kx in [0, pi)``, ``theta in [0, 2 pi)``.

    The ``kx`` seam is closed with ``u(pi, theta) = sigma_z u(0, theta)``.
    Sign convention: Berry connection ``i<u|du>``, so the result matches the
    degree of ``(kx, theta) -> h^``.
    """
    _require_gapped(p)
    if Nk < 2 or Ntheta < 2:
        raise ValidationError("grid counts must be >= 2")
    K, T = _grid(Nk, Ntheta)
    u = lower_band_states(p, K, T)
    # next point along kx; the last row wraps through the sigma_z transition function
    u_next_k = np.concatenate([u[1:], (u[:1] * np.array([1.0, -1.0]))], axis=0)
    u_next_t = np.roll(u, -1, axis=1)
    u_next_kt = np.roll(u_next_k, -1, axis=1)

    link_k = _links(u, u_next_k)
    link_t = _links(u, u_next_t)
    link_t_shift = _links(u_next_k, u_next_kt)
    link_k_shift = _links(u_next_t, u_next_kt)
    plaquette = link_k * link_t_shift * np.conj(link_k_shift) * np.conj(link_t)
    flux = np.angle(plaquette)
    value = -math.fsum(flux.ravel()) / TWO_PI
    rounded = int(round(value))
    return ChernResult(value, rounded, abs(value - rounded), (Nk, Ntheta))


def band_map(p: LatticeParams, Nk: int, Ntheta: int):
    """Rows ``(kx, theta, E_minus, E_plus, berry_curvature)`` on the midpoint grid.

    The curvature column is the ground-band Berry curvature, half the
    solid-angle density, so that its integral over the cell is ``2 pi C``.
    """
    K, T = _grid(Nk, Ntheta, midpoint=True)
    hx, hy, hz = _components(p, K, T)
    norm = np.sqrt(hx**2 + hy**2 + hz**2)
    curv = 0.5 * berry_curvature(p, K, T)
    for i in range(Nk):
        for j in range(Ntheta):
            yield (
                float(K[i, j]),
                float(T[i, j]),
                p.DeltaC - float(norm[i, j]),
                p.DeltaC + float(norm[i, j]),
                float(curv[i, j]),
            )
