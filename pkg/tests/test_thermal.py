import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manometer.observables import x_wall_closed_form
from manometer.params import SystemParams
from manometer.thermal import (
    TruncationError,
    boltzmann_weights,
    gas_ensemble,
    mean_energy,
    mean_energy_from_partition,
    temperature_sweep,
    thermal_entropy,
    thermal_report,
    thermal_wall_displacement,
)

TWO_LEVEL = json.loads((Path(__file__).parent / "fixtures" / "two_level.json").read_text())


def two_level():
    return boltzmann_weights(
        TWO_LEVEL["levels"], TWO_LEVEL["inv_temperature"], None, TWO_LEVEL["quantum_numbers"]
    )


def test_two_level_weights():
    e = two_level()
    assert e.weights[0] == pytest.approx(1 / (1 + math.exp(-1)), rel=1e-15)
    assert e.weights[0] == pytest.approx(0.7311, abs=1e-4)


def test_two_level_entropy():
    # -(w ln w + (1-w) ln(1-w)) at w = 0.7311 is 0.5822
    assert thermal_entropy(two_level()) == pytest.approx(0.5822, abs=1e-4)


def test_two_level_displacement(canonical):
    e = two_level()
    factor = thermal_wall_displacement(e, canonical) / x_wall_closed_form(1, canonical)
    # exact 1 + 3 w_2; rounding the weights to four digits first gives 1.8067
    assert factor == pytest.approx(1 + 3 / (1 + math.e), rel=1e-14)
    assert factor == pytest.approx(1.8067, abs=2e-4)


def test_zero_temperature_ground_state():
    e = boltzmann_weights([1.0, 2.0, 5.0], math.inf)
    assert list(e.weights) == [1.0, 0.0, 0.0]
    assert thermal_entropy(e) == 0.0


def test_infinite_temperature_uniform():
    e = boltzmann_weights(np.arange(1.0, 6.0), 0.0, tail_tol=None)
    assert np.allclose(e.weights, 0.2)
    assert thermal_entropy(e) == pytest.approx(math.log(5), rel=1e-14)


def test_no_overflow_for_large_energies():
    e = boltzmann_weights([1e6, 1e6 + 1, 1e6 + 2], 1.0, tail_tol=None)
    assert np.all(np.isfinite(e.weights))
    assert e.log_partition == pytest.approx(-1e6 + math.log(1 + math.exp(-1) + math.exp(-2)), rel=1e-14)


def test_tail_check():
    with pytest.raises(TruncationError):
        boltzmann_weights([1.0, 1.1], 1.0)
    with pytest.raises(TruncationError):
        gas_ensemble(SystemParams(1, 1, 1, 1), 1e-9, max_levels=64)


def test_ensemble_grows_levels(canonical):
    cold = gas_ensemble(canonical, 1 / (0.1 * math.pi**2 / (2 * canonical.gas_mass)))
    hot = gas_ensemble(canonical, 1 / (400 * math.pi**2 / (2 * canonical.gas_mass)))
    assert hot.energies.size > cold.energies.size
    assert hot.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_mean_energy_two_routes(canonical):
    e1 = math.pi**2 / (2 * canonical.gas_mass)
    e = gas_ensemble(canonical, 1 / (5 * e1))
    assert mean_energy(e) == pytest.approx(mean_energy_from_partition(e.energies, e.inv_temperature), rel=1e-8)


def test_report_zero_temperature(canonical):
    r = thermal_report(canonical, 0.0)
    assert r.entropy == 0.0
    assert r.x_wall == pytest.approx(x_wall_closed_form(1, canonical), rel=1e-15)
    with pytest.raises(ValueError):
        thermal_report(canonical, -1.0)


@given(st.lists(st.floats(0.0, 50.0), min_size=2, max_size=8, unique=True))
@settings(max_examples=40, deadline=None)
def test_sweep_monotone(ts):
    p = SystemParams.from_expansion(1e-3, 1e-3)
    e1 = math.pi**2 / (2 * p.gas_mass)
    rows = temperature_sweep(p, sorted(t * e1 for t in ts))
    for a, b in zip(rows, rows[1:]):
        assert b.mean_energy >= a.mean_energy * (1 - 1e-12)
        assert b.entropy >= a.entropy - 1e-12
        assert b.x_wall >= a.x_wall * (1 - 1e-12)
    for r in rows:
        assert r.entropy >= 0
