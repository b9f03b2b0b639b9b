"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from manometer import SystemParams, TruncatedBasis
from manometer.basis_ops import HIGHER_CHANNELS, LEADING_CHANNELS, BasisIndex
from manometer.config import DEFAULTS
from manometer.entanglement import entanglement_report
from manometer.observables import (
    force_identity_check,
    variance_closed_form,
    variance_from_state,
    x_wall_closed_form,
    x_wall_from_state,
)
from manometer.oracle import basis_doubling_drift, convergence_sweep
from manometer.perturbation import (
    ResonanceError,
    build_perturbed_state,
    coefficient_closed_form_c,
    coefficient_closed_form_f,
    coefficient_generic,
    first_order_energy,
    order_scaling,
)
from manometer.quadrature import quadrature_block_check
from manometer.thermal import gas_ensemble, temperature_sweep
from manometer.verify import QUADRATURE_PARAMS, random_regime_params
from manometer.observables import pressure_3d


def record(n: int, name: str, ok: bool, detail: str, elapsed: float, budget: float):
    in_time = elapsed < budget
    line = f"[{'PASS' if ok and in_time else 'FAIL'}] {n:2d} {name}: {detail} ({elapsed:.2f}s / {budget:g}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert in_time, line


def test_01_purity_deficit():
    t0 = time.perf_counter()
    s = build_perturbed_state((1, 0), SystemParams.from_expansion(1e-3, 1e-3))
    d = entanglement_report(s).deficit
    record(1, "purity deficit", 5e-9 <= d <= 1.2e-8, f"1-P = {d:.4e} in [5e-9, 1.2e-8]",
           time.perf_counter() - t0, 1)


def test_02_wall_displacement():
    t0 = time.perf_counter()
    p = SystemParams.from_expansion(1e-3, 1e-3)
    gaps = []
    for j in (1, 2, 3):
        s = build_perturbed_state((j, 0), p)
        xc = x_wall_closed_form(j, p)
        gaps.append(abs(x_wall_from_state(s).coupling - xc) / xc)
    worst = max(gaps)
    record(2, "wall displacement", worst <= 1e-4, f"max rel gap {worst:.2e} <= 1e-4",
           time.perf_counter() - t0, 1)


def test_03_force_identity():
    t0 = time.perf_counter()
    p = SystemParams.from_expansion(1e-3, 1e-3)
    checks = [force_identity_check(j, p) for j in (1, 2, 3)]
    exact = max(c.rel_gap for c in checks)
    fd = max(c.fd_rel_gap for c in checks)
    record(3, "force identity", exact <= 1e-12 and fd <= 1e-8,
           f"spring vs spectral {exact:.2e} <= 1e-12, finite difference {fd:.2e} <= 1e-8",
           time.perf_counter() - t0, 1)


def test_04_first_order_energy():
    t0 = time.perf_counter()
    worst_lead, worst_all = 0.0, 0.0
    for eps in (1e-2, 1e-3):
        p = SystemParams.from_expansion(eps, eps)
        for j in (1, 2, 3):
            worst_lead = max(worst_lead, abs(first_order_energy((j, 0), p, "leading").value))
            rel = abs(first_order_energy((j, 0), p, "all").relative_to_gas) / eps**2
            worst_all = max(worst_all, rel)
    record(4, "first-order energy", worst_lead <= 1e-12 and worst_all <= 10,
           f"leading |E1| {worst_lead:.1e} <= 1e-12, all-channel |E1/Eg|/beta^2 {worst_all:.3f} <= 10",
           time.perf_counter() - t0, 1)


def test_05_coefficient_closed_forms():
    t0 = time.perf_counter()
    p = SystemParams.from_expansion(1e-3, 1e-3)
    worst, n = 0.0, 0
    for j in range(1, 6):
        for k in range(1, 11):
            try:
                got = coefficient_generic((j, 0), (k, 1), p)
                f = coefficient_closed_form_f(j, k, 1, 1e-3, 1e-3)
            except ResonanceError:
                continue
            c = coefficient_closed_form_c(j, k, 1, 1e-3, 1e-3)
            for closed, value in ((c, got["Wc"]), (f, got["Wf"])):
                n += 1
                worst = max(worst, abs(value) if closed == 0 else abs(value - closed) / abs(closed))
    record(5, "coefficient closed forms", worst <= 1e-10, f"{n} comparisons, worst {worst:.2e} <= 1e-10",
           time.perf_counter() - t0, 1)


def test_06_order_scaling():
    t0 = time.perf_counter()
    slopes = order_scaling((1e-2, 1e-3, 1e-4))
    lead = {ch.value: slopes[ch] for ch in LEADING_CHANNELS}
    high = {ch.value: slopes[ch] for ch in HIGHER_CHANNELS}
    ok = all(abs(s - 1.0) <= 0.1 for s in lead.values()) and all(s >= 1.8 for s in high.values())
    fmt = ", ".join(f"{k}={v:.2f}" for k, v in {**lead, **high}.items())
    record(6, "order scaling", ok, fmt, time.perf_counter() - t0, 10)


def test_07_oracle_convergence():
    t0 = time.perf_counter()
    ref, basis = BasisIndex(1, 0), TruncatedBasis(40, 8)
    res = convergence_sweep(ref, (10**-1.5, 1e-2, 10**-2.5), basis)
    rows = {round(math.log10(r.eps), 2): r for r in res.rows_for("x_wall")}
    centre = rows[-2.0].rel_error
    slope = res.slopes["x_wall"]
    drift = basis_doubling_drift(ref, SystemParams.from_expansion(1e-2, 1e-2), basis)
    ok = centre <= 0.05 and abs(slope - 2.0) <= 0.3 and drift < 1e-8
    record(7, "oracle convergence", ok,
           f"rel error at 1e-2 {centre:.2e} <= 5e-2, slope {slope:.3f} in 2.0+-0.3, doubling drift {drift:.1e} < 1e-8",
           time.perf_counter() - t0, 60)


def test_08_variance():
    t0 = time.perf_counter()
    p = SystemParams.from_expansion(1e-3, 1e-3)
    ratios = []
    gap = None
    for j in range(1, 6):
        s = build_perturbed_state((j, 0), p)
        v = variance_from_state(s)
        if j == 1:
            vc = variance_closed_form(1, 1e-3, 1e-3)
            gap = abs(v - vc) / abs(vc)
        ratios.append(math.sqrt(v) / x_wall_closed_form(j, p))
    decreasing = all(a > b for a, b in zip(ratios, ratios[1:]))
    ok = gap <= 1e-3 and ratios[0] > 1 and decreasing
    record(8, "variance", ok,
           f"rel gap {gap:.1e} <= 1e-3, sqrt(var)/x = {', '.join(f'{r:.2f}' for r in ratios)}",
           time.perf_counter() - t0, 1)


def test_09_pressure_3d():
    t0 = time.perf_counter()
    worst = max(pressure_3d(j, p.dims, p).rel_gap for p, j in random_regime_params(100, seed=7))
    record(9, "3D pressure", worst <= 1e-12, f"100 random sets, worst {worst:.1e} <= 1e-12",
           time.perf_counter() - t0, 1)


def test_10_thermal():
    t0 = time.perf_counter()
    p = SystemParams.from_expansion(1e-3, 1e-3)
    temps = DEFAULTS["thermal"]["temperatures"]
    assert len(temps) == 20
    unit = math.pi**2 / (2 * p.gas_mass)
    rows = temperature_sweep(p, [t * unit for t in temps])
    sums = [abs(gas_ensemble(p, 1 / (t * unit) if t else math.inf).weights.sum() - 1) for t in temps]
    E = np.array([r.mean_energy for r in rows])
    S = np.array([r.entropy for r in rows])
    X = np.array([r.x_wall for r in rows])
    mono = all(np.all(np.diff(a) >= 0) for a in (E, S, X))
    ok = max(sums) <= 1e-12 and S.min() >= 0 and S[0] <= 1e-10 and mono
    record(10, "thermal", ok,
           f"max |sum w - 1| {max(sums):.1e}, S(0) {S[0]:.1e}, monotone {mono}",
           time.perf_counter() - t0, 1)


def test_11_quadrature():
    t0 = time.perf_counter()
    diffs = quadrature_block_check(QUADRATURE_PARAMS, TruncatedBasis(10, 6))
    worst = max(diffs.values())
    record(11, "quadrature oracle", worst <= 1e-10, f"7 channels over 10x6, worst {worst:.1e} <= 1e-10",
           time.perf_counter() - t0, 10)
