"""Canonical averaging over the gas levels.

``inv_temperature`` is ``1/(k_B T)``; it is deliberately not called beta,
which in this package is the mass-ratio expansion parameter.  Entropies
here are in units of ``k_B``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis_ops import gas_energy
from .observables import x_wall_closed_form
from .params import SystemParams

TAIL_TOL = 1e-12
MIN_LEVELS = 16
MAX_LEVELS = 10_000


class TruncationError(RuntimeError):
    """The highest retained level still carries non-negligible weight."""


@dataclass(frozen=True)
class ThermalEnsemble:
    inv_temperature: float
    energies: np.ndarray
    weights: np.ndarray
    log_partition: float
    quantum_numbers: np.ndarray

    @property
    def partition(self) -> float:
        return math.exp(self.log_partition)


def boltzmann_weights(
    levels,
    inv_temperature: float,
    tail_tol: float | None = TAIL_TOL,
    quantum_numbers=None,
) -> ThermalEnsemble:
    """Boltzmann weights ``exp(-theta E_i) / Z`` on a finite set of levels.

    Exponents are shifted by the lowest energy so nothing overflows;
    ``log_partition`` adds the shift back.  ``inv_temperature = inf`` puts
    all weight on the ground level.
    """
    E = np.asarray(levels, dtype=float)
    if E.ndim != 1 or E.size == 0:
        raise ValueError("levels must be a non-empty 1D sequence")
    if not inv_temperature >= 0:
        raise ValueError("inv_temperature must be >= 0")
    q = np.arange(1, E.size + 1) if quantum_numbers is None else np.asarray(quantum_numbers)
    e0 = E.min()
    if math.isinf(inv_temperature):
        w = (E == e0).astype(float)
        w /= w.sum()
        log_z = -math.inf
    else:
        # huge theta overflows the exponent to -inf, which is the right limit
        with np.errstate(over="ignore"):
            boltz = np.exp(-inv_temperature * (E - e0))
            z = boltz.sum()
            w = boltz / z
            log_z = float(np.log(z) - np.multiply(inv_temperature, e0))
    if tail_tol is not None and w[np.argmax(E)] > tail_tol:
        raise TruncationError(
            f"top level weight {w[np.argmax(E)]:.3e} exceeds {tail_tol:.1e} with {E.size} levels"
        )
    return ThermalEnsemble(float(inv_temperature), E, w, log_z, q)


def gas_ensemble(
    p: SystemParams,
    inv_temperature: float,
    n_levels: int | None = None,
    tail_tol: float = TAIL_TOL,
    max_levels: int = MAX_LEVELS,
) -> ThermalEnsemble:
    """Ensemble over box levels; grows the level count geometrically if not given."""
    if n_levels is not None:
        j = np.arange(1, n_levels + 1)
        return boltzmann_weights(gas_energy(j, p), inv_temperature, tail_tol, j)
    n = MIN_LEVELS
    while True:
        j = np.arange(1, n + 1)
        try:
            return boltzmann_weights(gas_energy(j, p), inv_temperature, tail_tol, j)
        except TruncationError:
            if n >= max_levels:
                raise
            n = min(2 * n, max_levels)


def thermal_entropy(e: ThermalEnsemble) -> float:
    w = e.weights[e.weights > 0]
    return float(-np.sum(w * np.log(w))) + 0.0  # no negative zero


def mean_energy(e: ThermalEnsemble) -> float:
    return float(np.dot(e.weights, e.energies))


def mean_energy_from_partition(levels, inv_temperature: float, rel_step: float = 1e-5) -> float:
    """``-d ln Z / d theta`` by central difference; independent of the weights path."""
    E = np.asarray(levels, dtype=float)
    e0 = E.min()
    h = rel_step * inv_temperature if inv_temperature > 0 else rel_step / max(np.ptp(E), 1e-300)

    def log_z(theta):
        return math.log(np.exp(-theta * (E - e0)).sum()) - theta * e0

    return -(log_z(inv_temperature + h) - log_z(inv_temperature - h)) / (2 * h)


def thermal_wall_displacement(e: ThermalEnsemble, p: SystemParams) -> float:
    """Ensemble average of the closed-form wall displacement."""
    j2 = np.asarray(e.quantum_numbers, dtype=float) ** 2
    return x_wall_closed_form(1, p) * float(np.dot(e.weights, j2))


@dataclass(frozen=True)
class ThermalReport:
    temperature: float
    mean_energy: float
    entropy: float
    x_wall: float
    n_levels: int


def thermal_report(p: SystemParams, temperature: float, tail_tol: float = TAIL_TOL) -> ThermalReport:
    """Temperature in energy units (``k_B = 1``); ``temperature = 0`` is the ground state."""
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    theta = math.inf if temperature == 0 else 1.0 / temperature
    e = gas_ensemble(p, theta, tail_tol=tail_tol)
    return ThermalReport(
        temperature, mean_energy(e), thermal_entropy(e), thermal_wall_displacement(e, p), e.energies.size
    )


def temperature_sweep(p: SystemParams, temperatures) -> list[ThermalReport]:
    return [thermal_report(p, float(t)) for t in temperatures]
