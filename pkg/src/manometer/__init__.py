"""Perturbative and exact-diagonalization model of a particle in a box whose wall sits in a harmonic trap."""
from .basis_ops import BasisIndex, Channel, TruncatedBasis, channel_matrix, unperturbed_energies
from .entanglement import entanglement_report, purity, reduce_to_wall, von_neumann_entropy
from .observables import force_identity_check, observable_report, pressure_3d, x_wall_closed_form
from .oracle import convergence_sweep, run_oracle
from .params import SystemParams, derive_expansion_params, validate_regime
from .perturbation import ResonanceError, build_perturbed_state, first_order_energy
from .thermal import boltzmann_weights, gas_ensemble, thermal_report

__all__ = [
    "BasisIndex",
    "Channel",
    "ResonanceError",
    "SystemParams",
    "TruncatedBasis",
    "boltzmann_weights",
    "build_perturbed_state",
    "channel_matrix",
    "convergence_sweep",
    "derive_expansion_params",
    "entanglement_report",
    "first_order_energy",
    "force_identity_check",
    "gas_ensemble",
    "observable_report",
    "pressure_3d",
    "purity",
    "reduce_to_wall",
    "run_oracle",
    "thermal_report",
    "unperturbed_energies",
    "validate_regime",
    "von_neumann_entropy",
    "x_wall_closed_form",
]
