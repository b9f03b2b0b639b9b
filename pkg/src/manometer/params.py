"""Physical parameters of the manometer and the derived expansion parameters.

Everything downstream works in natural units with ``hbar = 1`` unless a
different ``hbar`` is carried explicitly on :class:`SystemParams`.  SI input
is converted once at the boundary with :func:`to_natural_units`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

HBAR_SI = 1.054571817e-34  # J s

DEFAULT_MAX_EPS = 1e-2
# lambda and beta more than this factor apart trigger a "disparate orders" warning
DISPARITY_LIMIT = 1e2


@dataclass(frozen=True)
class SystemParams:
    """Gas particle in a box whose right wall sits on a spring.

    Parameters
    ----------
    gas_mass, wall_mass : float
        Masses ``M_g`` and ``M_W``.
    box_length : float
        Equilibrium box length ``L``.  In 3D mode this is ``L1``.
    spring_constant : float
        ``f_W`` of the wall spring.
    hbar : float
        Reduced Planck constant, 1 in natural units.
    dims : tuple of float, optional
        ``(L1, L2, L3)`` for the three-dimensional box; the wall moves
        along axis 1.
    """

    gas_mass: float
    wall_mass: float
    box_length: float
    spring_constant: float
    hbar: float = 1.0
    dims: tuple[float, float, float] | None = None

    def __post_init__(self):
        for name in ("gas_mass", "wall_mass", "box_length", "spring_constant", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if self.dims is not None:
            dims = tuple(float(d) for d in self.dims)
            if len(dims) != 3 or not all(math.isfinite(d) and d > 0 for d in dims):
                raise ValueError(f"dims must be three positive lengths, got {self.dims!r}")
            if not math.isclose(dims[0], self.box_length, rel_tol=1e-14):
                raise ValueError("box_length must equal L1 in 3D mode")
            object.__setattr__(self, "dims", dims)

    @property
    def is_3d(self) -> bool:
        return self.dims is not None

    @property
    def volume(self) -> float:
        if self.dims is None:
            raise ValueError("volume is only defined in 3D mode")
        L1, L2, L3 = self.dims
        return L1 * L2 * L3

    @property
    def wall_area(self) -> float:
        """``L2 * L3``, the area the gas pushes against (1 in 1D)."""
        if self.dims is None:
            return 1.0
        return self.dims[1] * self.dims[2]

    @property
    def omega(self) -> float:
        return math.sqrt(self.spring_constant / self.wall_mass)

    @property
    def oscillator_length(self) -> float:
        return math.sqrt(self.hbar / (self.wall_mass * self.omega))

    def with_length(self, L: float) -> "SystemParams":
        dims = None if self.dims is None else (L, self.dims[1], self.dims[2])
        return replace(self, box_length=L, dims=dims)

    @classmethod
    def from_expansion(
        cls,
        lam: float,
        beta: float,
        box_length: float = 1.0,
        wall_mass: float = 1.0,
        hbar: float = 1.0,
        dims: tuple[float, float, float] | None = None,
    ) -> "SystemParams":
        """Canonical instantiation for given ``lambda`` and ``beta``.

        ``L``, ``M_W`` and ``hbar`` are fixed (1 by default); ``M_g`` and
        ``f_W`` are solved for.
        """
        if lam <= 0 or beta <= 0:
            raise ValueError("lambda and beta must be > 0")
        gas_mass = beta**2 * wall_mass
        spring = hbar**2 / (wall_mass * lam**4 * box_length**4)
        return cls(gas_mass, wall_mass, box_length, spring, hbar, dims)


@dataclass(frozen=True)
class ExpansionParams:
    lam: float
    beta: float
    omega: float
    oscillator_length: float


def derive_expansion_params(p: SystemParams) -> ExpansionParams:
    lam = math.sqrt(p.hbar) / ((p.wall_mass * p.spring_constant) ** 0.25 * p.box_length)
    beta = math.sqrt(p.gas_mass / p.wall_mass)
    return ExpansionParams(lam, beta, p.omega, p.oscillator_length)


@dataclass(frozen=True)
class RegimeReport:
    ok: bool
    max_eps: float
    lam: float
    beta: float
    ratio: float  # beta / lambda
    disparate: bool
    warnings: list[str] = field(default_factory=list)


def validate_regime(e: ExpansionParams, max_eps: float = DEFAULT_MAX_EPS) -> RegimeReport:
    """Flag parameter sets outside the small-coupling regime.

    Never raises for physical input; the caller decides what to do with a
    failed report.
    """
    if max_eps <= 0:
        raise ValueError("max_eps must be > 0")
    warnings = []
    ok = max(e.lam, e.beta) <= max_eps
    if not ok:
        warnings.append(
            f"max(lambda, beta) = {max(e.lam, e.beta):.3g} exceeds max_eps = {max_eps:.3g}"
        )
    ratio = e.beta / e.lam
    disparate = not (1 / DISPARITY_LIMIT <= ratio <= DISPARITY_LIMIT)
    if disparate:
        warnings.append(f"lambda and beta differ by more than two orders (beta/lambda = {ratio:.3g})")
    return RegimeReport(ok, max_eps, e.lam, e.beta, ratio, disparate, warnings)


@dataclass(frozen=True)
class UnitScale:
    """SI value of one natural unit of each quantity."""

    length: float
    mass: float
    energy: float
    time: float

    @property
    def force(self) -> float:
        return self.energy / self.length

    @property
    def pressure(self) -> float:
        return self.energy / self.length**3


def to_natural_units(
    gas_mass: float,
    wall_mass: float,
    box_length: float,
    spring_constant: float,
    dims: tuple[float, float, float] | None = None,
    hbar: float = HBAR_SI,
) -> tuple[SystemParams, UnitScale]:
    """Convert SI inputs to natural units with ``hbar = M_W = L = 1``."""
    length, mass = box_length, wall_mass
    energy = hbar**2 / (mass * length**2)
    time = hbar / energy
    scale = UnitScale(length, mass, energy, time)
    nat_dims = None if dims is None else tuple(d / length for d in dims)
    p = SystemParams(
        gas_mass / mass,
        1.0,
        1.0,
        spring_constant * length**2 / energy,
        1.0,
        nat_dims,
    )
    return p, scale
