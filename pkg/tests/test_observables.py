import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manometer.basis_ops import TruncatedBasis
from manometer.observables import (
    force_identity_check,
    observable_report,
    pressure_3d,
    variance_closed_form,
    variance_from_state,
    x_wall_closed_form,
    x_wall_dimensionless,
    x_wall_from_state,
)
from manometer.params import SystemParams
from manometer.perturbation import build_perturbed_state


def test_x_wall_closed_value(canonical):
    assert x_wall_closed_form(1, canonical) == pytest.approx(9.8696e-6, rel=1e-4)
    assert x_wall_closed_form(2, canonical) / x_wall_closed_form(1, canonical) == pytest.approx(4.0, rel=1e-15)
    assert x_wall_dimensionless(1, 1e-3, 1e-3) == pytest.approx(x_wall_closed_form(1, canonical), rel=1e-12)


def test_x_wall_from_state(canonical):
    s = build_perturbed_state((1, 0), canonical)
    w = x_wall_from_state(s)
    assert w.coupling == pytest.approx(9.8696e-6, rel=1e-4)
    assert w.jacobian_remnant == pytest.approx(0.5e-6, rel=1e-12)
    assert w.total == pytest.approx(w.coupling + w.jacobian_remnant + w.frame_shift, rel=1e-14)
    s3 = build_perturbed_state((3, 0), canonical)
    assert x_wall_from_state(s3).coupling / w.coupling == pytest.approx(9.0, rel=1e-3)


def test_x_wall_uncoupled_limit():
    p = SystemParams.from_expansion(1e-3, 1e-3)
    s = build_perturbed_state((1, 0), p, TruncatedBasis(10, 4))
    zero = type(s)(s.reference, 0 * s.coefficients, {k: 0 * v for k, v in s.by_channel.items()},
                   1.0, p, s.basis, s.mode)
    w = x_wall_from_state(zero)
    assert w.total == pytest.approx(1e-6 / 2, rel=1e-12)
    assert w.coupling == pytest.approx(0.0, abs=1e-20)


def test_variance_values(canonical):
    assert variance_closed_form(1, 1e-3, 1e-3) == pytest.approx(5.0e-7, rel=1e-3)
    assert variance_closed_form(1, 1e-9, 1e-3) == pytest.approx(0.0, abs=1e-17)
    s = build_perturbed_state((1, 0), canonical)
    assert variance_from_state(s) == pytest.approx(5.0e-7, rel=1e-3)
    ratio = math.sqrt(variance_closed_form(1, 1e-3, 1e-3)) / x_wall_closed_form(1, canonical)
    assert ratio == pytest.approx(71.6, rel=1e-3)


def test_force_identity(canonical):
    f = force_identity_check(1, canonical)
    assert f.rel_gap <= 1e-12
    assert f.fd_rel_gap <= 1e-8
    assert force_identity_check(2, canonical).spring == pytest.approx(4 * f.spring, rel=1e-14)


def test_pressure_unit_cube():
    p = SystemParams(1.0, 1.0, 1.0, 1.0, dims=(1.0, 1.0, 1.0))
    r = pressure_3d((1, 1, 1), p.dims, p)
    assert r.classical == pytest.approx(math.pi**2, rel=1e-15)
    assert r.rel_gap <= 1e-15


def test_pressure_scaling_and_transverse_independence():
    p = SystemParams(1.0, 1.0, 1.0, 1.0)
    a = pressure_3d((2, 1, 1), (1.0, 1.0, 1.0), p).classical
    b = pressure_3d((2, 1, 1), (2.0, 2.0, 2.0), p).classical
    assert b / a == pytest.approx(2.0**-5, rel=1e-14)
    assert pressure_3d((2, 5, 3), (1.0, 1.0, 1.0), p).classical == a


def test_report(canonical):
    r = observable_report(build_perturbed_state((1, 0), canonical))
    assert r.x_wall_rel_gap <= 1e-4
    assert r.variance_rel_gap <= 1e-3
    assert r.pressure is None
    assert set(r.as_dict()) >= {"x_wall_closed", "jacobian_remnant", "variance_state"}


@given(
    lam=st.floats(1e-4, 1e-2),
    beta=st.floats(1e-4, 1e-2),
    L=st.floats(0.1, 10),
    M=st.floats(0.01, 100),
    j=st.integers(1, 20),
)
@settings(max_examples=100)
def test_force_identity_holds_for_random_params(lam, beta, L, M, j):
    p = SystemParams.from_expansion(lam, beta, box_length=L, wall_mass=M)
    f = force_identity_check(j, p)
    assert f.rel_gap <= 1e-12
    assert f.fd_rel_gap <= 1e-7
