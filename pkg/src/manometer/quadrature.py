"""Numerical-integration cross-check of the closed-form matrix elements.

Box factors are integrated with composite Gauss-Legendre on ``[0, L]``
(32-node panels; a single high-order rule loses ~1e-13 to node error) using the
explicit sine eigenfunctions and their analytic derivatives.  Wall factors
use Gauss-Hermite quadrature on Hermite functions built from
``numpy.polynomial.hermite`` (no ladder algebra), so this path shares
nothing with :mod:`manometer.basis_ops` except the table saying which
operator sits in which channel.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numpy.polynomial import hermite as H
from numpy.polynomial.legendre import leggauss

from .basis_ops import (
    CHANNEL_TERMS,
    BasisIndex,
    Channel,
    TruncatedBasis,
    channel_matrix,
    channel_matrix_element,
    channel_prefactor,
)
from .params import SystemParams

DEFAULT_LEGENDRE_POINTS = 2048
DEFAULT_HERMITE_NODES = 64
PANEL_NODES = 32
CONVERGENCE_RTOL = 1e-8

# (power of y, derivative order) for each box operator
_BOX_OPS = {
    "identity": (0, 0),
    "position1": (1, 0),
    "position2": (2, 0),
    "position3": (3, 0),
    "derivative": (0, 1),
    "second_derivative": (0, 2),
    "y_times_derivative": (1, 1),
    "y2_second_derivative": (2, 2),
}
_OSC_OPS = {
    "identity": (0, 0),
    "position1": (1, 0),
    "position2": (2, 0),
    "position3": (3, 0),
    "derivative": (0, 1),
    "y_times_derivative": (1, 1),
}


class QuadratureError(RuntimeError):
    """Doubling the quadrature resolution moved the result too much."""


class QuadratureCheck(NamedTuple):
    analytic: float
    numeric: float
    abs_diff: float


@lru_cache(maxsize=8)
def _panel_rule(n: int, L: float):
    panels = max(n // PANEL_NODES, 1)
    x, w = leggauss(PANEL_NODES)
    h = L / panels
    left = np.arange(panels) * h
    y = (left[:, None] + 0.5 * h * (x + 1.0)).ravel()
    return y, np.tile(0.5 * h * w, panels)


@lru_cache(maxsize=8)
def _hermite(n: int):
    return H.hermgauss(n)


def box_matrix_numeric(kind: str, n_gas: int, L: float, n_points: int = DEFAULT_LEGENDRE_POINTS):
    power, order = _BOX_OPS[kind]
    y, w = _panel_rule(n_points, L)
    j = np.arange(1, n_gas + 1)[:, None]
    kj = j * np.pi / L
    phi = np.sqrt(2.0 / L) * np.sin(kj * y)
    if order == 0:
        dphi = phi
    elif order == 1:
        dphi = np.sqrt(2.0 / L) * kj * np.cos(kj * y)
    else:
        dphi = -np.sqrt(2.0 / L) * kj**2 * np.sin(kj * y)
    return (phi * w) @ (y**power * dphi).T


def _hermite_function_values(n_wall: int, xi: np.ndarray):
    """Polynomial parts ``N_n H_n(xi)`` and ``N_n (H_n' - xi H_n)`` (Gaussian stripped)."""
    rows, drows = [], []
    for n in range(n_wall):
        c = np.zeros(n + 1)
        c[n] = 1.0
        norm = 1.0 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
        hn = H.hermval(xi, c)
        dhn = H.hermval(xi, H.hermder(c)) if n else np.zeros_like(xi)
        rows.append(norm * hn)
        drows.append(norm * (dhn - xi * hn))
    return np.array(rows), np.array(drows)


def oscillator_matrix_numeric(kind: str, n_wall: int, length: float, n_nodes: int = DEFAULT_HERMITE_NODES):
    power, order = _OSC_OPS[kind]
    xi, w = _hermite(n_nodes)
    f, df = _hermite_function_values(n_wall, xi)
    # psi_n(y) = f_n(xi) exp(-xi^2/2) / sqrt(a), y = a xi; dy = a dxi
    right = df / length if order else f
    return (f * w) @ ((length * xi) ** power * right).T


def channel_matrix_numeric(
    ch: Channel,
    p: SystemParams,
    basis: TruncatedBasis,
    n_points: int = DEFAULT_LEGENDRE_POINTS,
    n_nodes: int = DEFAULT_HERMITE_NODES,
) -> np.ndarray:
    term = CHANNEL_TERMS[Channel(ch)]
    box = box_matrix_numeric(term.box_kind, basis.n_gas, p.box_length, n_points)
    wall = oscillator_matrix_numeric(term.wall_kind, basis.n_wall, p.oscillator_length, n_nodes)
    return channel_prefactor(ch, p) * np.kron(box, wall)


def _converged(coarse, fine, what):
    scale = np.maximum(np.abs(fine), 1.0)
    drift = np.max(np.abs(fine - coarse) / scale)
    if drift > CONVERGENCE_RTOL:
        raise QuadratureError(f"{what}: doubling the grid changed the result by {drift:.2e}")


def quadrature_check(
    ch: Channel,
    bra: BasisIndex,
    ket: BasisIndex,
    p: SystemParams,
    n_points: int = DEFAULT_LEGENDRE_POINTS,
    n_nodes: int = DEFAULT_HERMITE_NODES,
) -> QuadratureCheck:
    """Compare one closed-form channel element against quadrature."""
    bra, ket = BasisIndex(*bra).check(), BasisIndex(*ket).check()
    basis = TruncatedBasis(max(bra.j_g, ket.j_g, 2), max(bra.j_W, ket.j_W, 1) + 1)
    coarse = channel_matrix_numeric(ch, p, basis, n_points, n_nodes)
    fine = channel_matrix_numeric(ch, p, basis, 2 * n_points, 2 * n_nodes)
    _converged(coarse, fine, f"{Channel(ch).value} {tuple(bra)}<-{tuple(ket)}")
    numeric = float(coarse[basis.index(bra), basis.index(ket)])
    analytic = channel_matrix_element(ch, bra, ket, p)
    return QuadratureCheck(analytic, numeric, abs(analytic - numeric))


def quadrature_block_check(
    p: SystemParams,
    basis: TruncatedBasis = TruncatedBasis(10, 6),
    channels=tuple(Channel),
    n_points: int = DEFAULT_LEGENDRE_POINTS,
    n_nodes: int = DEFAULT_HERMITE_NODES,
) -> dict[Channel, float]:
    """Max ``|analytic - numeric|`` per channel over every index pair of ``basis``."""
    out = {}
    for ch in channels:
        coarse = channel_matrix_numeric(ch, p, basis, n_points, n_nodes)
        fine = channel_matrix_numeric(ch, p, basis, 2 * n_points, 2 * n_nodes)
        _converged(coarse, fine, Channel(ch).value)
        out[Channel(ch)] = float(np.max(np.abs(channel_matrix(ch, p, basis) - coarse)))
    return out
