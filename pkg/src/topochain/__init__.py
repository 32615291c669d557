"""Photonic Chern insulator in a one-dimensional circuit-QED resonator chain.

The mixing angle of the qubit-resonator couplings acts as a synthetic second
momentum. This package builds the chain, computes its Chern number three
ways, solves the driven-dissipative steady state, and checks that the
winding of the reflection phase over one pump cycle equals the Chern number.
"""

from .bloch import (
    BlochVector,
    ChernResult,
    band_energies,
    bloch_field,
    bulk_gap,
    chern_analytic,
    chern_gauge_link,
    chern_solid_angle,
)
from .driven import (
    DriveConfig,
    ReflectionTrace,
    SteadyState,
    build_T_matrix,
    evolve_expectations,
    reflection_dissipative,
    reflection_trace,
    steady_state,
)
from .lattice import (
    CouplingPair,
    LatticeParams,
    build_hamiltonian,
    couplings_from_angle,
    couplings_from_flux,
)
from .scattering import (
    device_green_11_closed,
    device_green_11_numeric,
    lead_self_energy,
    pumped_charge,
    reflection_closed,
    reflection_fisher_lee,
)
from .spectrum import DensityProfile, EdgeSpectrum, density_profile, identify_edge_states, open_spectrum

__version__ = "0.1.0"

__all__ = [
    "BlochVector",
    "ChernResult",
    "CouplingPair",
    "DensityProfile",
    "DriveConfig",
    "EdgeSpectrum",
    "LatticeParams",
    "ReflectionTrace",
    "SteadyState",
    "band_energies",
    "bloch_field",
    "build_T_matrix",
    "build_hamiltonian",
    "bulk_gap",
    "chern_analytic",
    "chern_gauge_link",
    "chern_solid_angle",
    "couplings_from_angle",
    "couplings_from_flux",
    "density_profile",
    "device_green_11_closed",
    "device_green_11_numeric",
    "evolve_expectations",
    "identify_edge_states",
    "lead_self_energy",
    "open_spectrum",
    "pumped_charge",
    "reflection_closed",
    "reflection_dissipative",
    "reflection_fisher_lee",
    "reflection_trace",
    "steady_state",
]
