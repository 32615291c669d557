"""Green-function scattering off the chain between two semi-infinite leads.

The leads are uniform chains with hopping ``-J/2`` (band ``|E| < J``) and
couple to the first and last resonators with the same strength. Their
surface self-energy is ``Sigma = (E - i sqrt(J^2 - E^2)) / 2``. The
reflection from the left lead follows from the Fisher-Lee relation
``r = -1 + i sqrt(J^2 - E^2) [G_D]_11``.

For a long device ``[G_D]_11`` has a closed form. The device is a
two-site-periodic continued fraction whose self-consistency condition is a
quadratic; its stable root gives

    [G_D]_11 = -2 (Ep + P1) / (m1 - i m2),   r = -(m1 + i m2) / (m1 - i m2)

with ``P1 = Je cos(theta)``, ``P2 = s Je sin(theta)`` and

    m1 = J1^2 - J2^2 + (Ep + P1)(DeltaC + P1) - (J1 + J2) P2 + sqrt(D)
    m2 = (Ep + P1) sqrt(J^2 - (Ep + DeltaC)^2)
    D  = [Ep^2 - (J1 + J2)^2 - P1^2] [Ep^2 - (P2 - J1 + J2)^2 - P1^2]

inside the gap. (Above all bulk bands the other root is stable and the sign
of ``sqrt(D)`` flips.) At ``Ep + P1 = 0`` an edge mode can be resonant with
the probe and both ``m1`` and ``m2`` vanish; that removable singularity is
handled with the rationalized root.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .driven import ReflectionTrace, trace_winding
from .errors import EvanescentLeadError, NotInGapError, ValidationError
from .lattice import LatticeParams, build_hamiltonian
from .linalg import inverse_element


class ScatterEnergy(NamedTuple):
    E: float
    Ep: float

    @classmethod
    def from_probe(cls, p: LatticeParams, Ep: float) -> "ScatterEnergy":
        return cls(Ep + p.DeltaC, Ep)


class ClosedFormParts(NamedTuple):
    m1: float
    m2: float
    P1: float
    P2: float


def _lead_velocity(E: float, J: float) -> float:
    if J <= 0:
        raise ValidationError(f"lead hopping scale must be > 0, got {J}")
    if abs(E) >= J:
        raise EvanescentLeadError(f"|E| = {abs(E):.6g} >= J = {J:.6g}: no propagating lead mode")
    return math.sqrt(J * J - E * E)


def lead_self_energy(E: float, J: float) -> tuple[complex, complex]:
    """Surface self-energies ``(Sigma_L, Sigma_R)`` of the two leads.

    ``Sigma_L`` is the retarded value. ``Sigma_R = (E + i sqrt(J^2 - E^2)) / 2``
    follows the negative-velocity convention for the right lead.
    """
    nu = _lead_velocity(E, J)
    return complex(0.5 * E, -0.5 * nu), complex(0.5 * E, 0.5 * nu)


def device_green_matrix(
    p: LatticeParams,
    E: float,
    theta: float | None = None,
    lead_J: float | None = None,
    retarded_right: bool = False,
) -> np.ndarray:
    """``E I - H_D - Sigma_L - Sigma_R`` with the self-energies on the corner sites.

    ``retarded_right`` attaches the retarded value to the right lead as
    well, which makes the S-matrix exactly unitary.
    """
    J = p.J if lead_J is None else lead_J
    sigma_l, sigma_r = lead_self_energy(E, J)
    if retarded_right:
        sigma_r = sigma_l
    a = E * np.eye(p.L, dtype=complex) - build_hamiltonian(p, include_detuning=True, theta=theta)
    a[0, 0] -= sigma_l
    a[-1, -1] -= sigma_r
    return a


def device_green_11_numeric(p: LatticeParams, E: float, theta: float | None = None,
                            lead_J: float | None = None, retarded_right: bool = False) -> complex:
    return inverse_element(device_green_matrix(p, E, theta, lead_J, retarded_right), 0, 0)


def reflection_fisher_lee(p: LatticeParams, E: float, theta: float | None = None,
                          lead_J: float | None = None, retarded_right: bool = False) -> complex:
    J = p.J if lead_J is None else lead_J
    nu = _lead_velocity(E, J)
    return -1.0 + 1j * nu * device_green_11_numeric(p, E, theta, lead_J, retarded_right)


def transmission_probability(p: LatticeParams, E: float, theta: float | None = None,
                             lead_J: float | None = None) -> float:
    """``|t|^2 = nu^2 |[G_D]_{L,1}|^2`` with retarded self-energies on both leads."""
    J = p.J if lead_J is None else lead_J
    nu = _lead_velocity(E, J)
    g = inverse_element(device_green_matrix(p, E, theta, lead_J, retarded_right=True), p.L - 1, 0)
    return nu * nu * abs(g) ** 2


def _closed_form(p: LatticeParams, Ep: float, theta: float | None, lead_J: float | None):
    """Return ``(parts, numerator, m1_eval, m2_eval)`` such that
    ``G11 = -numerator / (m1_eval - i m2_eval)``.
    """
    th = p.theta if theta is None else theta
    J = p.J if lead_J is None else lead_J
    E = Ep + p.DeltaC
    nu = _lead_velocity(E, J)
    J1, J2 = p.J1, p.J2
    P1 = p.Je * math.cos(th)
    P2 = p.chirality * p.Je * math.sin(th)

    first = Ep * Ep - (J1 + J2) ** 2 - P1 * P1
    second = Ep * Ep - (P2 - J1 + J2) ** 2 - P1 * P1
    D = first * second
    if D < 0:
        raise NotInGapError(f"Ep = {Ep:.6g} is inside a bulk band at theta = {th:.6g}")
    root = math.sqrt(D)
    # stable continued-fraction root: -sqrt(D) in m1 above all bands, +sqrt(D) in the gap
    sign = 1.0 if first < 0 else -1.0

    b = Ep + P1
    a = Ep - P1
    t1 = J1 - 0.5 * P2
    t2 = J2 + 0.5 * P2
    B = a * b + t2 * t2 - t1 * t1

    m1 = J1 * J1 - J2 * J2 + b * (p.DeltaC + P1) - (J1 + J2) * P2 + sign * root
    m2 = b * nu
    parts = ClosedFormParts(m1, m2, P1, P2)

    # B - s' sqrt(D) with s' = -sign is the cancellation-free combination when B * sign > 0
    if B * sign > 0:
        R = B + sign * root
        m1_eval = 0.5 * E * R - 2.0 * a * t2 * t2
        m2_eval = 0.5 * nu * R
        return parts, R, m1_eval, m2_eval
    return parts, 2.0 * b, m1, m2


def closed_form_parts(p: LatticeParams, Ep: float, theta: float | None = None,
                      lead_J: float | None = None) -> ClosedFormParts:
    return _closed_form(p, Ep, theta, lead_J)[0]


def device_green_11_closed(p: LatticeParams, Ep: float, theta: float | None = None,
                           lead_J: float | None = None) -> complex:
    _, num, m1, m2 = _closed_form(p, Ep, theta, lead_J)
    return -num / complex(m1, -m2)


def reflection_closed(p: LatticeParams, Ep: float, theta: float | None = None,
                      lead_J: float | None = None) -> complex:
    """Closed-form reflection; a ratio of conjugates, so ``|r| = 1`` exactly."""
    _, _, m1, m2 = _closed_form(p, Ep, theta, lead_J)
    return -complex(m1, m2) / complex(m1, -m2)


def pumped_charge_trace(p: LatticeParams, Ep: float = 0.0, Ntheta: int = 256,
                        lead_J: float | None = None) -> ReflectionTrace:
    return trace_winding(lambda th: reflection_closed(p, Ep, th, lead_J), Ntheta)


def pumped_charge(p: LatticeParams, Ep: float = 0.0, Ntheta: int = 256,
                  lead_J: float | None = None) -> int:
    """Photons pumped per cycle: the winding of ``r(theta)`` over one period."""
    return pumped_charge_trace(p, Ep, Ntheta, lead_J).winding


def pumped_charge_formula(p: LatticeParams) -> int:
    """``s [sgn(2 delta + Je) - sgn(2 delta - Je)] / 2``."""
    x = 2.0 * p.delta
    val = 0.5 * (np.sign(x + p.Je) - np.sign(x - p.Je))
    return int(p.chirality * val)


def fisher_lee_trace(p: LatticeParams, Ep: float = 0.0, Ntheta: int = 256,
                     lead_J: float | None = None) -> ReflectionTrace:
    E = Ep + p.DeltaC
    return trace_winding(lambda th: reflection_fisher_lee(p, E, th, lead_J), Ntheta)
