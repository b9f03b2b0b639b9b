"""Wall displacement, its variance, the force identity and the 3D pressure.

State-based values evaluate the wall position with the Jacobian of the
coordinate change, ``x_W dx_g = (y_W + y_W^2/L) dy_g`` to first order,
linear in the perturbation coefficients.

In that frame the zero-point term ``<0|y_W^2|0>/L = lambda^2 L / 2`` is
cancelled exactly by the ``Wf`` same-level coefficient ``-lambda/(2 sqrt 2)``,
which is a measure artefact rather than gas pressure.  Both pieces are
reported separately so that the coupling part (what the gas actually
pushes) can be compared to the closed form.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .basis_ops import Channel, gas_energy, oscillator_matrix
from .params import SystemParams, derive_expansion_params
from .perturbation import PerturbedState

FD_STEP = 1e-6  # central-difference step, relative to L


def x_wall_closed_form(j_g: int, p: SystemParams) -> float:
    """Mean wall displacement ``pi^2 hbar^2 j^2 / (M_g L^3 f_W)``."""
    if j_g < 1:
        raise ValueError("box quantum numbers start at 1")
    return math.pi**2 * p.hbar**2 * j_g**2 / (p.gas_mass * p.box_length**3 * p.spring_constant)


def x_wall_dimensionless(j_g: int, lam: float, beta: float, L: float = 1.0) -> float:
    return math.pi**2 * j_g**2 * L * lam**4 / beta**2


@dataclass(frozen=True)
class WallPosition:
    """Breakdown of the state-based ``<x_W>``.

    ``total = jacobian_remnant + frame_shift + coupling``.
    """

    total: float
    jacobian_remnant: float
    frame_shift: float
    coupling: float


def _wall_ops(s: PerturbedState):
    n = s.basis.n_wall
    return {
        k: oscillator_matrix(k, n, s.params.oscillator_length)
        for k in ("position1", "position2", "position3")
    }


def _same_level_row(s: PerturbedState, table: np.ndarray) -> np.ndarray:
    return table[s.reference.j_g - 1]


def x_wall_from_state(s: PerturbedState) -> WallPosition:
    L = s.params.box_length
    ops = _wall_ops(s)
    weight = ops["position1"][0] + ops["position2"][0] / L  # <0| y + y^2/L |n>
    row = _same_level_row(s, s.coefficients)
    remnant = float(weight[0])
    # Wf on the reference gas level is the J^(1/2) frame factor, not pressure
    f_row = _same_level_row(s, s.by_channel.get(Channel.Wf, np.zeros_like(s.coefficients)))
    shift = float(2 * np.dot(f_row[1:], weight[1:]))
    total = remnant + float(2 * np.dot(row[1:], weight[1:]))
    return WallPosition(total, remnant, shift, total - remnant - shift)


def x2_wall_from_state(s: PerturbedState) -> float:
    L = s.params.box_length
    ops = _wall_ops(s)
    weight = ops["position2"][0] + ops["position3"][0] / L
    row = _same_level_row(s, s.coefficients)
    return float(weight[0] + 2 * np.dot(row[1:], weight[1:]))


def variance_closed_form(j_g: int, lam: float, beta: float, L: float = 1.0) -> float:
    r = lam**2 / beta**2
    return L**2 * (
        1.5 * math.pi**2 * j_g**2 * lam**4 * r
        + 0.5 * lam**2
        - 0.75 * lam**4
        - math.pi**4 * j_g**4 * lam**4 * r**2
    )


def variance_from_state(s: PerturbedState) -> float:
    """``<x_W^2> - <x_W>^2`` with both moments linear in the coefficients."""
    return x2_wall_from_state(s) - x_wall_from_state(s).total ** 2


@dataclass(frozen=True)
class ForceCheck:
    spectral_analytic: float
    spectral_fd: float
    spring: float
    rel_gap: float  # analytic spectral force vs spring force
    fd_rel_gap: float  # finite difference vs analytic


def force_identity_check(j_g: int, p: SystemParams) -> ForceCheck:
    """``-dE^g/dL`` against ``f_W <x_W>``."""
    L = p.box_length
    h = FD_STEP * L
    fd = -(gas_energy(j_g, p, L + h) - gas_energy(j_g, p, L - h)) / (2 * h)
    analytic = math.pi**2 * p.hbar**2 * j_g**2 / (p.gas_mass * L**3)
    spring = p.spring_constant * x_wall_closed_form(j_g, p)
    return ForceCheck(
        analytic,
        float(fd),
        spring,
        abs(spring - analytic) / analytic,
        abs(float(fd) - analytic) / analytic,
    )


@dataclass(frozen=True)
class PressureCheck:
    classical: float
    from_wall: float
    rel_gap: float


def pressure_3d(j, dims, p: SystemParams) -> PressureCheck:
    """Classical ``-dE/dV`` against spring force over the wall area ``L2 L3``.

    Only ``j[0]`` enters: the transverse modes do not couple to the wall.
    """
    j1, j2, j3 = (int(x) for x in j)
    if min(j1, j2, j3) < 1:
        raise ValueError("box quantum numbers start at 1")
    L1, L2, L3 = (float(d) for d in dims)
    if min(L1, L2, L3) <= 0:
        raise ValueError("box dimensions must be positive")
    V = L1 * L2 * L3
    classical = math.pi**2 * p.hbar**2 / p.gas_mass * j1**2 * L2**2 * L3**2 / V**3
    q = SystemParams(p.gas_mass, p.wall_mass, V / (L2 * L3), p.spring_constant, p.hbar, (V / (L2 * L3), L2, L3))
    from_wall = p.spring_constant * x_wall_closed_form(j1, q) / (L2 * L3)
    return PressureCheck(classical, from_wall, abs(from_wall - classical) / classical)


@dataclass(frozen=True)
class ObservableReport:
    j_g: int
    x_wall_closed: float
    x_wall_state: float
    x_wall_coupling: float
    jacobian_remnant: float
    frame_shift: float
    variance_closed: float
    variance_state: float
    force: float
    pressure: float | None
    x_wall_rel_gap: float
    variance_rel_gap: float

    def as_dict(self) -> dict:
        return asdict(self)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a - b)


def observable_report(s: PerturbedState) -> ObservableReport:
    p = s.params
    e = derive_expansion_params(p)
    j = s.reference.j_g
    xc = x_wall_closed_form(j, p)
    xs = x_wall_from_state(s)
    vc = variance_closed_form(j, e.lam, e.beta, p.box_length)
    vs = variance_from_state(s)
    force = force_identity_check(j, p).spectral_analytic
    pressure = None
    if p.is_3d:
        pressure = pressure_3d((j, 1, 1), p.dims, p).classical
    return ObservableReport(
        j, xc, xs.total, xs.coupling, xs.jacobian_remnant, xs.frame_shift,
        vc, vs, force, pressure, _rel(xs.coupling, xc), _rel(vs, vc),
    )
