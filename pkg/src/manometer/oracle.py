"""Exact diagonalization of the transformed Hamiltonian on a truncated basis.

The perturbation terms are not symmetric in the flat ``dy_g dy_W`` measure
(the operator is symmetric in the ``(1 + y_W/L)``-weighted one).  We use
``(H + H^T)/2``, which agrees with ``J^(1/2) H J^(-1/2)`` to first order in
``y_W/L``.  Its eigenvectors ``chi`` are therefore flat-measure amplitudes:
physical expectation values are plain ``<chi|O|chi>``, and the amplitudes
comparable to the perturbative coefficients are ``psi = J^(-1/2) chi``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .basis_ops import (
    BasisIndex,
    Channel,
    TruncatedBasis,
    channel_matrix,
    oscillator_matrix,
    unperturbed_energies,
)
from .observables import x_wall_closed_form, x_wall_from_state
from .params import SystemParams, derive_expansion_params
from .perturbation import (
    ResonanceError,
    build_perturbed_state,
    coefficient_closed_form_c,
    coefficient_closed_form_f,
    loglog_slope,
)

DIM_CAP = 2000


class AmbiguityError(RuntimeError):
    """No eigenvector is dominated by the requested unperturbed state."""


class AssembledHamiltonian(NamedTuple):
    matrix: np.ndarray  # symmetrized
    asymmetry: float  # ||H - H^T||_F / 2 before symmetrizing
    coupling_norm: float  # ||sum_ch W_ch||_F


def assemble_hamiltonian(
    p: SystemParams,
    basis: TruncatedBasis,
    channels=tuple(Channel),
    cap: int = DIM_CAP,
) -> AssembledHamiltonian:
    if basis.dim > cap:
        raise ValueError(f"basis dimension {basis.dim} exceeds cap {cap}")
    W = np.zeros((basis.dim, basis.dim))
    for ch in channels:
        W += channel_matrix(ch, p, basis)
    asym = 0.5 * float(np.linalg.norm(W - W.T))
    H = 0.5 * (W + W.T)
    H[np.diag_indices_from(H)] += unperturbed_energies(p, basis).ravel()
    return AssembledHamiltonian(H, asym, float(np.linalg.norm(W)))


@dataclass(frozen=True)
class OracleResult:
    eigenvalues: np.ndarray
    vector: np.ndarray  # flat-measure amplitudes, shape (n_gas, n_wall)
    overlap: float
    index: int
    reference: BasisIndex
    basis: TruncatedBasis
    asymmetry: float = math.nan
    trace_residual: float = math.nan

    @property
    def energy(self) -> float:
        return float(self.eigenvalues[self.index])


def diagonalize_and_select(H, basis: TruncatedBasis, ref: BasisIndex) -> OracleResult:
    """Full eigendecomposition; pick the eigenvector with the largest overlap with ``ref``."""
    if isinstance(H, AssembledHamiltonian):
        mat, asym = H.matrix, H.asymmetry
    else:
        mat, asym = np.asarray(H), math.nan
    if not np.array_equal(mat, mat.T):
        raise ValueError("Hamiltonian must be symmetric")
    ref = BasisIndex(*ref).check()
    evals, evecs = np.linalg.eigh(mat)
    row = evecs[basis.index(ref)]
    i = int(np.argmax(np.abs(row)))
    if row[i] ** 2 <= 0.5:
        raise AmbiguityError(f"max overlap^2 {row[i] ** 2:.3f} with {tuple(ref)} is not dominant")
    vec = evecs[:, i] * np.sign(row[i])
    tr = abs(np.trace(mat) - evals.sum()) / max(abs(np.trace(mat)), 1e-300)
    return OracleResult(
        evals, vec.reshape(basis.n_gas, basis.n_wall), float(abs(row[i])), i, ref, basis, asym, tr
    )


def run_oracle(
    ref: BasisIndex, p: SystemParams, basis: TruncatedBasis = TruncatedBasis(), channels=tuple(Channel)
) -> OracleResult:
    return diagonalize_and_select(assemble_hamiltonian(p, basis, channels), basis, ref)


def _wall_expectation(r: OracleResult, op: np.ndarray) -> float:
    v = r.vector
    return float(np.sum(v * (v @ op.T)))


class OracleWallPosition(NamedTuple):
    weighted: float  # <chi|(y + y^2/L)|chi> / <chi|(1 + y/L)|chi>
    coupling: float  # <chi|y|chi>: the physical displacement
    remnant: float  # weighted - coupling


def oracle_x_wall(r: OracleResult, p: SystemParams) -> OracleWallPosition:
    n, L = r.basis.n_wall, p.box_length
    y = oscillator_matrix("position1", n, p.oscillator_length)
    y2 = oscillator_matrix("position2", n, p.oscillator_length)
    ey, ey2 = _wall_expectation(r, y), _wall_expectation(r, y2)
    weighted = (ey + ey2 / L) / (1.0 + ey / L)
    return OracleWallPosition(weighted, ey, weighted - ey)


def oracle_variance(r: OracleResult, p: SystemParams) -> float:
    n = r.basis.n_wall
    y = oscillator_matrix("position1", n, p.oscillator_length)
    y2 = oscillator_matrix("position2", n, p.oscillator_length)
    return _wall_expectation(r, y2) - _wall_expectation(r, y) ** 2


def weighted_frame_amplitudes(r: OracleResult, p: SystemParams) -> np.ndarray:
    """``psi = (1 - y_W/(2L)) chi``, scaled so the reference amplitude is 1."""
    y = oscillator_matrix("position1", r.basis.n_wall, p.oscillator_length)
    psi = r.vector - (r.vector @ y.T) / (2 * p.box_length)
    return psi / psi[r.reference.j_g - 1, r.reference.j_W]


# --------------------------------------------------------------------------
# convergence sweeps


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    lam: float
    beta: float
    n_gas: int
    n_wall: int
    observable: str
    pt_value: float
    oracle_value: float
    rel_error: float
    flags: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.flags)


@dataclass
class SweepResult:
    rows: list[ConvergenceRow]
    slopes: dict[str, float] = field(default_factory=dict)

    def rows_for(self, observable: str) -> list[ConvergenceRow]:
        return [r for r in self.rows if r.observable == observable]


SWEEP_OBSERVABLES = ("x_wall", "coefficient_j1", "energy_shift")


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def sweep_point(eps: float, p: SystemParams, ref: BasisIndex, basis: TruncatedBasis) -> list[ConvergenceRow]:
    e = derive_expansion_params(p)
    head = (eps, e.lam, e.beta, basis.n_gas, basis.n_wall)
    try:
        state = build_perturbed_state(ref, p, basis, "leading")
        r = run_oracle(ref, p, basis)
    except (ResonanceError, AmbiguityError) as exc:
        tag = type(exc).__name__
        return [ConvergenceRow(*head, obs, math.nan, math.nan, math.nan, tag) for obs in SWEEP_OBSERVABLES]
    rows = []
    x_pt = x_wall_from_state(state).coupling
    x_or = oracle_x_wall(r, p).coupling
    rows.append(ConvergenceRow(*head, "x_wall", x_pt, x_or, _rel(x_or, x_pt)))
    j = ref.j_g
    c_pt = coefficient_closed_form_c(j, j, 1, e.lam, e.beta) + coefficient_closed_form_f(j, j, 1, e.lam, e.beta)
    c_or = float(weighted_frame_amplitudes(r, p)[j - 1, 1])
    rows.append(ConvergenceRow(*head, "coefficient_j1", c_pt, c_or, _rel(c_or, c_pt)))
    e0 = float(unperturbed_energies(p, basis)[j - 1, 0])
    rows.append(ConvergenceRow(*head, "energy_shift", e0, r.energy, _rel(r.energy, e0)))
    return rows


def convergence_sweep(
    ref: BasisIndex,
    eps_grid,
    basis: TruncatedBasis = TruncatedBasis(),
    beta_over_lambda: float = 1.0,
    jobs: int = 1,
    params_for=None,
) -> SweepResult:
    """Oracle vs perturbation theory over ``lambda = eps``, ``beta = ratio * eps``.

    Failed rows (resonance, ambiguous labeling) are kept and flagged; slopes
    are fitted over the rest.
    """
    ref = BasisIndex(*ref).check()
    if params_for is None:
        def params_for(eps):
            return SystemParams.from_expansion(eps, beta_over_lambda * eps)
    eps_grid = [float(x) for x in eps_grid]
    points = [(eps, params_for(eps)) for eps in eps_grid]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda a: sweep_point(a[0], a[1], ref, basis), points))
    else:
        chunks = [sweep_point(eps, p, ref, basis) for eps, p in points]
    rows = [row for chunk in chunks for row in chunk]
    result = SweepResult(rows)
    for obs in SWEEP_OBSERVABLES:
        ok = [r for r in result.rows_for(obs) if not r.failed and r.rel_error > 0]
        if len(ok) >= 2:
            result.slopes[obs] = loglog_slope([r.eps for r in ok], [r.rel_error for r in ok])
    return result


def basis_doubling_drift(ref: BasisIndex, p: SystemParams, basis: TruncatedBasis = TruncatedBasis()) -> float:
    """Relative change of the oracle displacement when both truncations double."""
    a = oracle_x_wall(run_oracle(ref, p, basis), p).coupling
    b = oracle_x_wall(run_oracle(ref, p, basis.doubled()), p).coupling
    return abs(b - a) / abs(a)


def closed_form_reference(ref: BasisIndex, p: SystemParams) -> float:
    return x_wall_closed_form(BasisIndex(*ref).j_g, p)
