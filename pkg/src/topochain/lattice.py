"""Physical parameters and the real-space Hamiltonian of the resonator chain.

Sites are ordered ``a1, b1, a2, b2, ...`` with index 0 the leftmost (driven,
probed) resonator. Energies are in units of the qubit-assisted rate ``Je``
unless stated otherwise.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LatticeParams:
    """All couplings of one simulation instance.

    ``J`` and ``delta`` are the mean hopping and hopping imbalance, so the
    intra- and inter-cell capacitive hoppings are ``J1 = J + delta`` and
    ``J2 = J - delta``. ``chirality`` is the sign of the ``g2`` coupling; a
    negative sign mirrors ``theta -> -theta`` and flips the Chern number.
    """

    J: float = 1.0
    delta: float = 0.0
    Je: float = 1.0
    DeltaC: float = 0.0
    kappa: float = 0.0
    theta: float = 0.0
    L: int = 10
    g0: float | None = None
    DeltaQ: float | None = None
    chirality: int = 1

    def __post_init__(self):
        for name in ("J", "delta", "Je", "DeltaC", "kappa", "theta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        if isinstance(self.L, bool) or int(self.L) != self.L:
            raise ValidationError(f"L must be an integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        if self.L < 4 or self.L % 2:
            raise ValidationError(f"L must be even and >= 4, got {self.L}")
        if self.Je < 0:
            raise ValidationError(f"Je must be >= 0, got {self.Je}")
        if self.kappa < 0:
            raise ValidationError(f"kappa must be >= 0, got {self.kappa}")
        if self.chirality not in (1, -1):
            raise ValidationError(f"chirality must be +1 or -1, got {self.chirality}")
        if self.g0 is not None and self.g0 < 0:
            raise ValidationError(f"g0 must be >= 0, got {self.g0}")
        if self.DeltaQ is not None and self.DeltaQ == 0:
            raise ValidationError("DeltaQ must be nonzero")
        if self.g0 is not None and self.DeltaQ is not None:
            expected = self.g0**2 / self.DeltaQ
            if abs(expected - self.Je) > 1e-12 * max(abs(expected), abs(self.Je)):
                raise ValidationError(
                    f"Je = {self.Je} inconsistent with g0^2/DeltaQ = {expected}"
                )

    @classmethod
    def from_qubit(cls, g0: float, DeltaQ: float, **kwargs) -> "LatticeParams":
        """Build parameters with ``Je = g0**2 / DeltaQ`` from the dispersive coupling."""
        return cls(Je=g0**2 / DeltaQ, g0=g0, DeltaQ=DeltaQ, **kwargs)

    @property
    def J1(self) -> float:
        return self.J + self.delta

    @property
    def J2(self) -> float:
        return self.J - self.delta

    def replace(self, **changes) -> "LatticeParams":
        return dataclasses.replace(self, **changes)


class CouplingPair(NamedTuple):
    g1: float
    g2: float


def couplings_from_angle(g0: float, theta: float) -> CouplingPair:
    """Qubit-resonator couplings ``(g0 sin(theta/2), g0 cos(theta/2))``."""
    if g0 < 0:
        raise ValidationError(f"g0 must be >= 0, got {g0}")
    return CouplingPair(g0 * math.sin(theta / 2), g0 * math.cos(theta / 2))


def mixing_angle(pair: CouplingPair) -> float:
    """Inverse of :func:`couplings_from_angle`, reduced to ``[0, 2pi)``."""
    return (2.0 * math.atan2(pair.g1, pair.g2)) % TWO_PI


def couplings_from_flux(betaEJ: float, dpsi0: float, f3: float, f5: float) -> CouplingPair:
    """Couplings set by the SQUID-loop fluxes of the junction coupler.

    ``g_a = 2 beta E_J cos(f3) dpsi0`` and ``g_b = 2 beta E_J cos(f5) dpsi0``;
    with ``f5 = theta/2`` and ``f3 = (pi - theta)/2`` this reproduces
    :func:`couplings_from_angle` with ``g0 = 2 beta E_J dpsi0``.
    """
    return CouplingPair(
        2.0 * betaEJ * math.cos(f3) * dpsi0,
        2.0 * betaEJ * math.cos(f5) * dpsi0,
    )


def hoppings(p: LatticeParams, theta: float | None = None) -> tuple[float, float, float]:
    """Return ``(intra, inter, onsite)`` at mixing angle ``theta``.

    intra = J1 - s (Je/2) sin(theta), inter = J2 + s (Je/2) sin(theta) and
    onsite = Je cos(theta) (+ on a-sites, - on b-sites), with ``s`` the chirality.
    """
    th = p.theta if theta is None else theta
    mod = p.chirality * 0.5 * p.Je * math.sin(th)
    return p.J1 - mod, p.J2 + mod, p.Je * math.cos(th)


def build_hamiltonian(
    p: LatticeParams, include_detuning: bool = False, theta: float | None = None
) -> np.ndarray:
    """Open-boundary ``L x L`` Hamiltonian (real symmetric, tridiagonal).

    ``theta`` overrides ``p.theta`` so callers can sweep the mixing angle
    without rebuilding the parameter object.
    """
    intra, inter, onsite = hoppings(p, theta)
    L = p.L
    diag = np.where(np.arange(L) % 2 == 0, onsite, -onsite)
    if include_detuning:
        diag = diag + p.DeltaC
    off = np.where(np.arange(L - 1) % 2 == 0, intra, inter)
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
