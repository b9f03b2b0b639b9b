"""Matrix elements of the coupled box/oscillator operators in the unperturbed basis.

Box states are ``sqrt(2/L) sin(j pi y / L)`` with ``j >= 1``; wall states are
harmonic oscillator eigenfunctions in ``y_W`` with ``n >= 0``.  Every
element is a closed form: box factors come from the cosine moments of
``u**n`` on ``[0, 1]``, oscillator factors from ladder-operator products.

Matrix convention throughout: ``M[k, j] = <k| O |j>`` (bra row, ket column),
with box rows/columns indexed by ``j - 1``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .params import SystemParams

BOX_KINDS = (
    "identity",
    "position1",
    "position2",
    "position3",
    "derivative",
    "second_derivative",
    "y_times_derivative",
    "y2_second_derivative",
)
OSC_KINDS = (
    "identity",
    "position1",
    "position2",
    "position3",
    "derivative",
    "y_times_derivative",
)


class BasisIndex(NamedTuple):
    j_g: int
    j_W: int

    def check(self) -> "BasisIndex":
        if int(self.j_g) != self.j_g or self.j_g < 1:
            raise ValueError(f"box quantum number starts at 1, got j_g={self.j_g}")
        if int(self.j_W) != self.j_W or self.j_W < 0:
            raise ValueError(f"oscillator quantum number must be >= 0, got j_W={self.j_W}")
        return self


@dataclass(frozen=True)
class TruncatedBasis:
    """Product basis with ``j_g = 1..n_gas`` and ``j_W = 0..n_wall-1``."""

    n_gas: int = 40
    n_wall: int = 8

    def __post_init__(self):
        if self.n_gas < 2 or self.n_wall < 2:
            raise ValueError("truncation needs n_gas >= 2 and n_wall >= 2")

    @property
    def dim(self) -> int:
        return self.n_gas * self.n_wall

    def index(self, b: BasisIndex) -> int:
        if not (1 <= b.j_g <= self.n_gas and 0 <= b.j_W < self.n_wall):
            raise IndexError(f"{tuple(b)} outside truncation {self.n_gas}x{self.n_wall}")
        return (b.j_g - 1) * self.n_wall + b.j_W

    def label(self, i: int) -> BasisIndex:
        g, w = divmod(i, self.n_wall)
        return BasisIndex(g + 1, w)

    def doubled(self) -> "TruncatedBasis":
        return TruncatedBasis(2 * self.n_gas, 2 * self.n_wall)


class Channel(str, enum.Enum):
    """The seven perturbation terms of the transformed Hamiltonian."""

    Wa = "Wa"
    Wb = "Wb"
    Wc = "Wc"
    Wd = "Wd"
    We = "We"
    Wf = "Wf"
    Wh = "Wh"

    @property
    def short(self) -> str:
        return self.value[1]


LEADING_CHANNELS = (Channel.Wc, Channel.Wf)
HIGHER_CHANNELS = (Channel.Wa, Channel.Wb, Channel.Wd, Channel.We, Channel.Wh)


class ChannelTerm(NamedTuple):
    box_kind: str
    wall_kind: str


# operator content of each term; the numeric prefactor lives in channel_prefactor
CHANNEL_TERMS = {
    Channel.Wa: ChannelTerm("y2_second_derivative", "identity"),
    Channel.Wb: ChannelTerm("y_times_derivative", "identity"),
    Channel.Wc: ChannelTerm("second_derivative", "position1"),
    Channel.Wd: ChannelTerm("y2_second_derivative", "position1"),
    Channel.We: ChannelTerm("y_times_derivative", "position1"),
    Channel.Wf: ChannelTerm("y_times_derivative", "derivative"),
    Channel.Wh: ChannelTerm("y_times_derivative", "y_times_derivative"),
}


def channel_prefactor(ch: Channel, p: SystemParams) -> float:
    hb2, L = p.hbar**2, p.box_length
    Mg, MW = p.gas_mass, p.wall_mass
    return {
        Channel.Wa: -hb2 / (2 * MW * L**2),
        Channel.Wb: -hb2 / (MW * L**2),
        Channel.Wc: hb2 / (Mg * L),
        Channel.Wd: hb2 / (MW * L**3),
        Channel.We: 2 * hb2 / (MW * L**3),
        Channel.Wf: hb2 / (MW * L),
        Channel.Wh: -hb2 / (MW * L**2),
    }[Channel(ch)]


# --------------------------------------------------------------------------
# box factors


def _cos_moment(n: int, m):
    """``int_0^1 u**n cos(m pi u) du`` for integer ``m`` (array-valued)."""
    m = np.asarray(m)
    out = np.empty(m.shape, dtype=float)
    zero = m == 0
    out[zero] = 1.0 / (n + 1)
    mm = m[~zero]
    c = mm * np.pi
    s = np.where(mm % 2 == 0, 1.0, -1.0)
    if n == 0:
        val = np.zeros_like(c)
    elif n == 1:
        val = (s - 1) / c**2
    elif n == 2:
        val = 2 * s / c**2
    elif n == 3:
        val = 3 * s / c**2 - 6 * (s - 1) / c**4
    else:
        raise ValueError(f"moment order {n} not tabulated")
    out[~zero] = val
    return out


def _box_moment(n, k, j):
    """Dimensionless ``2 int_0^1 u**n sin(k pi u) sin(j pi u) du``."""
    return _cos_moment(n, k - j) - _cos_moment(n, k + j)


def _box_block(kind: str, k, j, L: float):
    k = np.asarray(k, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    k, j = np.broadcast_arrays(k, j)
    diag = k == j
    if kind == "identity":
        return diag.astype(float)
    if kind in ("position1", "position2", "position3"):
        n = int(kind[-1])
        return L**n * _box_moment(n, k, j)
    if kind == "second_derivative":
        return np.where(diag, -((j * np.pi / L) ** 2), 0.0)
    if kind == "y2_second_derivative":
        # y**2 d2/dy2 acting on box state j is -(j pi / L)**2 y**2 |j>
        return -((j * np.pi) ** 2) * _box_moment(2, k, j)
    sign = np.where((k + j) % 2 == 0, 1.0, -1.0)
    den = np.where(diag, 1, j**2 - k**2)
    if kind == "derivative":
        # nonzero only between states of opposite parity
        return np.where(diag | (sign > 0), 0.0, 4.0 * j * k / (k**2 - j**2 + diag) / L)
    if kind == "y_times_derivative":
        return np.where(diag, -0.5, 2.0 * j * k * sign / den)
    raise ValueError(f"unknown box operator kind {kind!r}")


def box_matrix_element(kind: str, j: int, k: int, L: float = 1.0) -> float:
    """``<k| O |j>`` between box states ``j`` (ket) and ``k`` (bra)."""
    if kind not in BOX_KINDS:
        raise ValueError(f"unknown box operator kind {kind!r}")
    if j < 1 or k < 1:
        raise ValueError("box quantum numbers start at 1")
    return float(_box_block(kind, k, j, L))


def box_matrix(kind: str, n_gas: int, L: float = 1.0) -> np.ndarray:
    if kind not in BOX_KINDS:
        raise ValueError(f"unknown box operator kind {kind!r}")
    idx = np.arange(1, n_gas + 1)
    return _box_block(kind, idx[:, None], idx[None, :], L)


# --------------------------------------------------------------------------
# oscillator factors


@lru_cache(maxsize=64)
def _ladder_matrices(n: int, a: float):
    pad = n + 4  # cubic products touch at most three levels beyond the block
    b = np.diag(np.sqrt(np.arange(1.0, pad)), 1)
    y = a / np.sqrt(2.0) * (b + b.T)
    d = (b - b.T) / (np.sqrt(2.0) * a)
    mats = {
        "identity": np.eye(pad),
        "position1": y,
        "position2": y @ y,
        "position3": y @ y @ y,
        "derivative": d,
        "y_times_derivative": y @ d,
    }
    for m in mats.values():
        m.setflags(write=False)
    return mats


def oscillator_matrix(kind: str, n_wall: int, length: float) -> np.ndarray:
    """``M[m, n] = <m| O |n>`` for ``m, n < n_wall``; ``length`` is sqrt(hbar/(M w))."""
    if kind not in OSC_KINDS:
        raise ValueError(f"unknown oscillator operator kind {kind!r}")
    return _ladder_matrices(int(n_wall), float(length))[kind][:n_wall, :n_wall].copy()


def oscillator_matrix_element(
    kind: str, m: int, n: int, wall_mass: float, omega: float, hbar: float = 1.0
) -> float:
    if m < 0 or n < 0:
        raise ValueError("oscillator quantum numbers must be >= 0")
    length = np.sqrt(hbar / (wall_mass * omega))
    size = max(m, n) + 1
    return float(oscillator_matrix(kind, size, length)[m, n])


# --------------------------------------------------------------------------
# channels


def channel_factors(ch: Channel, p: SystemParams, basis: TruncatedBasis):
    """``(prefactor, box_matrix, wall_matrix)`` whose Kronecker product is the channel."""
    term = CHANNEL_TERMS[Channel(ch)]
    box = box_matrix(term.box_kind, basis.n_gas, p.box_length)
    wall = oscillator_matrix(term.wall_kind, basis.n_wall, p.oscillator_length)
    return channel_prefactor(ch, p), box, wall


def channel_matrix_element(
    ch: Channel, bra: BasisIndex, ket: BasisIndex, p: SystemParams
) -> float:
    """``<bra| W_ch |ket>`` in the unperturbed product basis."""
    bra, ket = BasisIndex(*bra).check(), BasisIndex(*ket).check()
    term = CHANNEL_TERMS[Channel(ch)]
    box = box_matrix_element(term.box_kind, ket.j_g, bra.j_g, p.box_length)
    if box == 0.0:
        return 0.0
    size = max(bra.j_W, ket.j_W) + 1
    wall = oscillator_matrix(term.wall_kind, size, p.oscillator_length)[bra.j_W, ket.j_W]
    return channel_prefactor(ch, p) * box * float(wall)


def channel_matrix(ch: Channel, p: SystemParams, basis: TruncatedBasis) -> np.ndarray:
    pref, box, wall = channel_factors(ch, p, basis)
    return pref * np.kron(box, wall)


def channel_column(ch: Channel, ref: BasisIndex, p: SystemParams, basis: TruncatedBasis) -> np.ndarray:
    """All ``<k| W_ch |ref>`` as an ``(n_gas, n_wall)`` array without building the full matrix."""
    pref, box, wall = channel_factors(ch, p, basis)
    return pref * np.outer(box[:, ref.j_g - 1], wall[:, ref.j_W])


def unperturbed_energies(p: SystemParams, basis: TruncatedBasis) -> np.ndarray:
    """``E0[k_g - 1, k_W] = E^g_{k_g} + E^W_{k_W}``."""
    return np.add.outer(
        gas_energy(np.arange(1, basis.n_gas + 1), p),
        wall_energy(np.arange(basis.n_wall), p),
    )


def gas_energy(j, p: SystemParams, L: float | None = None):
    L = p.box_length if L is None else L
    return np.pi**2 * p.hbar**2 * np.asarray(j, dtype=float) ** 2 / (2 * p.gas_mass * L**2)


def wall_energy(n, p: SystemParams):
    return p.hbar * p.omega * (np.asarray(n, dtype=float) + 0.5)
