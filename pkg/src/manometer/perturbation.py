"""First-order stationary perturbation theory around ``|j_g, 0>``.

Coefficients are ``<k| W |ref> / (E0_ref - E0_k)`` channel by channel.  Two
modes are exposed:

``"leading"``
    only ``Wc`` and ``Wf`` (the terms first order in lambda, beta);
``"all"``
    all seven channels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis_ops import (
    HIGHER_CHANNELS,
    LEADING_CHANNELS,
    BasisIndex,
    Channel,
    TruncatedBasis,
    channel_column,
    channel_matrix_element,
    gas_energy,
    unperturbed_energies,
    wall_energy,
)
from .params import SystemParams

MODES = ("leading", "all")
DEFAULT_RESONANCE_RTOL = 1e-6


class ResonanceError(ArithmeticError):
    """Energy denominator vanishes: a box transition matches oscillator quanta."""

    def __init__(self, target: BasisIndex, denominator: float, scale: float):
        self.target = BasisIndex(*target)
        self.denominator = denominator
        super().__init__(
            f"resonant denominator {denominator:.3e} (scale {scale:.3e}) "
            f"at (k_g, k_W) = {tuple(self.target)}"
        )


def channels_for(mode: str) -> tuple[Channel, ...]:
    if mode == "leading":
        return LEADING_CHANNELS
    if mode == "all":
        return LEADING_CHANNELS + HIGHER_CHANNELS
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _gas_scale(p: SystemParams) -> float:
    return float(gas_energy(1, p))


@dataclass(frozen=True)
class CoefficientBreakdown:
    target: BasisIndex
    contributions: dict[Channel, float]

    @property
    def total(self) -> float:
        return math.fsum(self.contributions.values())

    def __getitem__(self, ch) -> float:
        return self.contributions[Channel(ch)]


def energy_denominator(ref: BasisIndex, target: BasisIndex, p: SystemParams) -> float:
    e_ref = gas_energy(ref.j_g, p) + wall_energy(ref.j_W, p)
    e_tgt = gas_energy(target.j_g, p) + wall_energy(target.j_W, p)
    return float(e_ref - e_tgt)


def coefficient_generic(
    ref: BasisIndex,
    target: BasisIndex,
    p: SystemParams,
    basis: TruncatedBasis | None = None,
    rtol: float = DEFAULT_RESONANCE_RTOL,
) -> CoefficientBreakdown:
    ref, target = BasisIndex(*ref).check(), BasisIndex(*target).check()
    if ref == target:
        raise ValueError("the reference state carries no first-order coefficient")
    if basis is not None:
        basis.index(target)
    den = energy_denominator(ref, target, p)
    scale = _gas_scale(p)
    if abs(den) < rtol * scale:
        raise ResonanceError(target, den, scale)
    return CoefficientBreakdown(
        target, {ch: channel_matrix_element(ch, target, ref, p) / den for ch in Channel}
    )


def coefficient_closed_form_c(j_g: int, k_g: int, k_W: int, lam: float, beta: float) -> float:
    if k_W != 1 or k_g != j_g:
        return 0.0
    return math.pi**2 * j_g**2 / math.sqrt(2) * lam**3 / beta**2


def resonance_bracket(j_g: int, k_g: int, lam: float, beta: float) -> float:
    """``pi^2 (j^2 - k^2) - 2 beta^2 / lambda^2``; zero when ``E^g_j - E^g_k = hbar w``."""
    return math.pi**2 * (j_g**2 - k_g**2) - 2 * beta**2 / lam**2


def coefficient_closed_form_f(
    j_g: int, k_g: int, k_W: int, lam: float, beta: float, rtol: float = DEFAULT_RESONANCE_RTOL
) -> float:
    if k_W != 1:
        return 0.0
    if k_g == j_g:
        return -lam / (2 * math.sqrt(2))
    bracket = resonance_bracket(j_g, k_g, lam, beta)
    # the bracket is the denominator in units of E^g_1 * 2/pi^2
    if abs(bracket) < rtol * math.pi**2:
        raise ResonanceError(BasisIndex(k_g, k_W), bracket, math.pi**2)
    sign = -1.0 if (j_g + k_g) % 2 else 1.0
    d2 = j_g**2 - k_g**2
    return -2 * math.sqrt(2) * j_g * k_g * sign / (bracket * d2) * beta**2 / lam


@dataclass(frozen=True)
class PerturbedState:
    """``|ref> + sum_k C_k |k>`` on a truncated basis.

    ``coefficients[k_g - 1, k_W]`` holds the total first-order coefficient;
    the reference entry is zero (it is excluded from the sum).
    ``by_channel[ch]`` holds the same table split by perturbation channel.
    """

    reference: BasisIndex
    coefficients: np.ndarray
    by_channel: dict[Channel, np.ndarray]
    normalization: float
    params: SystemParams
    basis: TruncatedBasis
    mode: str
    denominators: np.ndarray = field(repr=False, default=None)

    def coefficient(self, k_g: int, k_W: int) -> float:
        return float(self.coefficients[k_g - 1, k_W])

    def as_dict(self) -> dict[tuple[int, int], float]:
        out = {}
        for (g, w), c in np.ndenumerate(self.coefficients):
            if (g + 1, w) != tuple(self.reference):
                out[(g + 1, w)] = float(c)
        return out

    @property
    def amplitudes(self) -> np.ndarray:
        """Unnormalized amplitudes with 1 on the reference entry."""
        a = self.coefficients.copy()
        a[self.reference.j_g - 1, self.reference.j_W] = 1.0
        return a

    def table_rows(self):
        """``(k_g, k_W, channel, value)`` rows for every nonzero coefficient."""
        rows = []
        for (g, w), total in np.ndenumerate(self.coefficients):
            if total == 0.0 and not any(self.by_channel[ch][g, w] for ch in self.by_channel):
                continue
            for ch, table in self.by_channel.items():
                if table[g, w] != 0.0:
                    rows.append((g + 1, w, ch.value, float(table[g, w])))
            rows.append((g + 1, w, "total", float(total)))
        return rows


def build_perturbed_state(
    ref: BasisIndex,
    p: SystemParams,
    basis: TruncatedBasis = TruncatedBasis(),
    mode: str = "leading",
    rtol: float = DEFAULT_RESONANCE_RTOL,
) -> PerturbedState:
    ref = BasisIndex(*ref).check()
    if ref.j_W != 0:
        raise ValueError("only wall ground-state references (j_W = 0) are supported")
    basis.index(ref)
    chans = channels_for(mode)
    energies = unperturbed_energies(p, basis)
    den = energies[ref.j_g - 1, ref.j_W] - energies
    den[ref.j_g - 1, ref.j_W] = np.inf
    numerators = {ch: channel_column(ch, ref, p, basis) for ch in chans}
    coupled = np.zeros(den.shape, dtype=bool)
    for num in numerators.values():
        coupled |= num != 0.0
    coupled[ref.j_g - 1, ref.j_W] = False
    resonant = coupled & (np.abs(den) < rtol * _gas_scale(p))
    if resonant.any():
        g, w = np.argwhere(resonant)[0]
        raise ResonanceError(BasisIndex(int(g) + 1, int(w)), float(den[g, w]), _gas_scale(p))
    by_channel = {
        ch: np.divide(num, den, out=np.zeros_like(num), where=coupled)
        for ch, num in numerators.items()
    }
    total = sum(by_channel.values())
    norm = math.sqrt(1.0 + float(np.sum(total**2)))
    return PerturbedState(ref, total, by_channel, norm, p, basis, mode, den)


@dataclass(frozen=True)
class FirstOrderEnergy:
    value: float
    relative_to_gas: float  # value / E^g_{j_g}
    by_channel: dict[Channel, float]


def first_order_energy(ref: BasisIndex, p: SystemParams, mode: str = "leading") -> FirstOrderEnergy:
    """Diagonal ``<ref| W |ref>`` over the channels of ``mode``."""
    ref = BasisIndex(*ref).check()
    if ref.j_W != 0:
        raise ValueError("only wall ground-state references (j_W = 0) are supported")
    parts = {ch: channel_matrix_element(ch, ref, ref, p) for ch in channels_for(mode)}
    value = math.fsum(parts.values())
    return FirstOrderEnergy(value, value / float(gas_energy(ref.j_g, p)), parts)


def max_coefficient_by_channel(state: PerturbedState) -> dict[Channel, float]:
    return {ch: float(np.max(np.abs(t))) for ch, t in state.by_channel.items()}


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def order_scaling(
    eps_grid=(1e-2, 1e-3, 1e-4),
    ref: BasisIndex = BasisIndex(1, 0),
    basis: TruncatedBasis = TruncatedBasis(),
) -> dict[Channel, float]:
    """Log-log slope of ``max |C_ch|`` against ``eps`` with ``lambda = beta = eps``."""
    maxima = {ch: [] for ch in Channel}
    for eps in eps_grid:
        state = build_perturbed_state(ref, SystemParams.from_expansion(eps, eps), basis, "all")
        for ch, v in max_coefficient_by_channel(state).items():
            maxima[ch].append(v)
    return {ch: loglog_slope(eps_grid, v) for ch, v in maxima.items()}
