"""Reduced density matrix of the wall, purity and von Neumann entropy."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .perturbation import PerturbedState

CLIP_TOL = 1e-12
ASSEMBLY_TOL = 1e-9


class DensityMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class ReducedDensity:
    matrix: np.ndarray
    label: str = ""

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


@dataclass(frozen=True)
class EntanglementReport:
    purity: float
    entropy: float  # nats
    deficit: float  # 1 - purity


def reduce_to_wall(s: PerturbedState) -> ReducedDensity:
    """Trace out the gas from ``|psi><psi| / N^2``.

    With amplitudes ``A[k_g, k_W]`` the wall block is ``A^T A / N^2``; each
    gas level contributes one rank-1 term.
    """
    a = s.amplitudes
    rho = a.T @ a / s.normalization**2
    rho = 0.5 * (rho + rho.T)
    return ReducedDensity(rho, f"j_g={s.reference.j_g}, mode={s.mode}")


def reduce_amplitudes(amplitudes: np.ndarray) -> ReducedDensity:
    """Same partial trace for an arbitrary ``(n_gas, n_wall)`` amplitude array."""
    a = np.asarray(amplitudes, dtype=float)
    rho = a.T @ a / np.sum(a**2)
    return ReducedDensity(0.5 * (rho + rho.T))


def purity(rd: ReducedDensity) -> float:
    # Tr(rho^2) = sum of squared entries for symmetric rho
    return float(np.sum(rd.matrix**2))


def purity_deficit(rd: ReducedDensity) -> float:
    """``1 - Tr(rho^2)`` from the eigenvalues, avoiding cancellation near 1."""
    ev = np.linalg.eigvalsh(rd.matrix)
    ev = ev / ev.sum()
    top = ev[-1]
    rest = ev[:-1]
    # 1 - sum p^2 = 2 sum_{i<j} p_i p_j, split into top-with-rest and rest-with-rest
    tail = float(rest.sum())
    return float(2 * top * tail + tail**2 - np.sum(rest**2))


def von_neumann_entropy(rd: ReducedDensity) -> float:
    ev = np.linalg.eigvalsh(rd.matrix)
    if ev.min() < -ASSEMBLY_TOL:
        raise DensityMatrixError(f"negative eigenvalue {ev.min():.3e} in reduced density")
    ev = ev[ev > CLIP_TOL]
    return float(-np.sum(ev * np.log(ev)))


def purity_closed_form(lam: float, beta: float, normalization: float) -> float:
    """Printed ground-state purity ``N^-4 [1 + pi^4 l^6/b^4 - pi^2 l^4/b^2 + l^2/8]``."""
    pi2 = np.pi**2
    bracket = 1 + pi2**2 * lam**6 / beta**4 - pi2 * lam**4 / beta**2 + lam**2 / 8
    return float(bracket / normalization**4)


def entanglement_report(s: PerturbedState) -> EntanglementReport:
    rd = reduce_to_wall(s)
    return EntanglementReport(purity(rd), von_neumann_entropy(rd), purity_deficit(rd))
